import math

import numpy as np
import pytest
from scipy import linalg

from jensenlab import wkb
from jensenlab.errors import DomainError, InputError, ResolutionError


def test_predicted_exponent():
    assert wkb.predicted_exponent(0.75) == pytest.approx(-1.2)
    assert wkb.predicted_exponent(1.0) == pytest.approx(-2.0)


def test_wkb_count_and_box():
    L, n = wkb.suggested_box(1.5, 40)
    assert wkb.wkb_count(1.5, L) >= 40
    assert n == int(2 * L) + 1


def test_sturm_matches_dense_eigh():
    diag, off, _ = wkb.tridiagonal(0.75, 200.0, 801)
    dense = linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    neg = dense[dense < 0]
    assert np.allclose(wkb.sturm_eigen(diag, off, neg.size), neg, atol=1e-11)
    assert np.allclose(wkb.negative_tridiagonal_eigs(diag, off), neg, atol=1e-11)
    assert wkb.sturm_count(diag, off, 0.0)[0] == neg.size


def test_sturm_reports_missing_bracket():
    diag, off, _ = wkb.tridiagonal(1.5, 10.0, 41)
    have = int(wkb.sturm_count(diag, off, 0.0)[0])
    with pytest.raises(ResolutionError, match=f"index {have}"):
        wkb.sturm_eigen(diag, off, have + 1)


@pytest.mark.parametrize("depth,a", [(6.0, 1.0), (10.0, 1.0)])
def test_square_well_against_transcendental_roots(depth, a):
    roots = wkb.square_well_roots(depth, a)
    got = wkb.square_well_extrapolated(depth, a, 12.0, 241, levels=3)
    deep = roots[roots < -0.5]
    assert deep.size >= 2
    assert np.allclose(got[:deep.size], deep, atol=1e-7)


def test_square_well_root_count():
    # bound states on the line: ceil(2 a sqrt(depth) / pi)
    for depth, a in ((1.0, 1.0), (6.0, 1.0), (30.0, 0.7)):
        assert wkb.square_well_roots(depth, a).size == math.ceil(2 * a * math.sqrt(depth) / math.pi)


def test_sweep_exponent_and_verdicts():
    s = wkb.wkb_sweep(0.75)
    assert s.relative_error < 0.1
    assert s.eigenvalues.size >= wkb.MIN_STATES
    assert np.all(np.diff(s.partial_sums) > 0)
    assert wkb.wkb_sweep(1.5).sum_verdict == "convergent"
    d = wkb.wkb_sweep(0.6)
    assert d.sum_growth_exponent > 0 and d.sum_verdict == "divergent"


def test_sweep_too_coarse_box_raises():
    with pytest.raises(ResolutionError) as err:
        wkb.wkb_sweep(0.75, L=20.0, n=41)
    assert err.value.suggested_L > 20


def test_l2_membership():
    assert wkb.l2_membership(0.6).member and wkb.l2_membership(0.6).consistent
    low = wkb.l2_membership(0.4)
    assert not low.member and low.consistent
    with pytest.raises(DomainError):
        wkb.l2_membership(0.0)


def test_tridiagonal_validation():
    with pytest.raises(InputError):
        wkb.tridiagonal(0.75, 10.0, 2)
