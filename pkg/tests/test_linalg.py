import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from jensenlab.errors import InputError, ShapeError, SingularMatrixError, DomainError
from jensenlab.linalg import SymMatrix, eigh, expm_sym, hs_norm, log_det2, logdet_batch, lu_logdet, solve_complex

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (6, 6), elements=finite), st.floats(0, 2))
def test_expm_sym_matches_scipy(m, t):
    s = SymMatrix(m)
    ref = sla.expm(-t * s.entries)
    assert np.allclose(expm_sym(s, t).entries, ref, rtol=1e-9, atol=1e-9 * np.max(np.abs(ref)))


@settings(max_examples=40, deadline=None)
@given(arrays(float, (5, 5), elements=finite))
def test_eigh_reconstructs(m):
    s = SymMatrix(m)
    ed = eigh(s)
    assert np.all(np.diff(ed.values) >= 0)
    assert np.allclose(ed.reconstruct(), s.entries, atol=1e-10 * max(1, np.max(np.abs(m))))


def test_symmatrix_symmetrizes_and_validates():
    s = SymMatrix([[1.0, 2.0], [0.0, 1.0]])
    assert np.array_equal(s.entries, [[1, 1], [1, 1]])
    with pytest.raises(ShapeError):
        SymMatrix(np.zeros((2, 3)))
    with pytest.raises(InputError):
        SymMatrix([[np.nan]])
    with pytest.raises(InputError):
        SymMatrix([[1.0]], basis_weight=0)
    with pytest.raises(DomainError):
        expm_sym(SymMatrix([[1.0]]), -1)


def test_log_det2_closed_form_diagonal():
    lam = np.array([0.3, -0.5, 0.1 + 0.2j])
    want = np.sum(np.log(1 - lam) + lam)
    got = log_det2(np.diag(lam))
    assert abs(got.real - want.real) < 1e-14
    assert abs(np.exp(1j * got.imag) - np.exp(1j * want.imag)) < 1e-14


def test_log_det2_singular_is_minus_inf():
    assert log_det2(np.eye(3)).real == -np.inf


def test_lu_logdet_matches_slogdet():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((8, 8))
    sign, logabs = np.linalg.slogdet(m)
    la, ph = lu_logdet(m)
    assert la == pytest.approx(logabs, rel=1e-13)
    assert np.cos(ph) == pytest.approx(sign)
    la_b, s_b = logdet_batch(np.stack([m, 2 * m]))
    assert la_b[1] - la_b[0] == pytest.approx(8 * np.log(2))


def test_solve_complex_and_singular():
    m = np.array([[2, 1j], [-1j, 3]])
    x = solve_complex(m, np.array([1, 2]))
    assert np.allclose(m @ x, [1, 2])
    with pytest.raises(SingularMatrixError) as err:
        solve_complex(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))
    assert err.value.pivot_index == 1


def test_hs_norm_weight():
    assert hs_norm(np.ones((2, 2)), 0.5) == pytest.approx(1.0)
