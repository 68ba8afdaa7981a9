import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from jensenlab import bounds
from jensenlab.errors import DomainError, StructureError
from jensenlab.grid import GridSpec, assemble, build_laplacian
from jensenlab.potential import gaussian_well
from jensenlab.semigroup import semigroup_difference


def test_j_p_anchors():
    assert bounds.j_p(1, 0.5) == pytest.approx(2.0, rel=1e-12)
    for p in (1.5, 2, 2.5, 3):
        assert bounds.j_p(p, 0.0) == pytest.approx(math.gamma(p), rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3.0, 0.95))
def test_j1_closed_form(a):
    # J_1(a) = 1 / (1 - a)
    assert bounds.j_p(1, a) == pytest.approx(1 / (1 - a), rel=1e-9)


def test_j2_grows_like_log():
    for k in (3, 6, 9):
        a = 1 - 10.0**-k
        assert 0.9 < bounds.j_p(2, a) / math.log(10.0**k) < 1.1


def test_j_p_domain():
    with pytest.raises(DomainError):
        bounds.j_p(0, 0.5)
    with pytest.raises(DomainError):
        bounds.j_p(2, 1.0)


def m_series(d, t, z, terms=4000):
    """M(z)^2 = sum_{m >= 2} (m - 1) z^m (pi / (m t))^(d/2) for real 0 < z < 1."""
    m = np.arange(2, terms)
    return math.sqrt(float(np.sum((m - 1) * z**m * (math.pi / (m * t)) ** (d / 2))))


@pytest.mark.parametrize("d,t,z", [(1, 1.0, 0.5), (3, 0.5, 0.9), (5, 2.0, 0.99), (4, 1.0, 0.3)])
def test_m_z_matches_series(d, t, z):
    assert bounds.m_z(d, t, z) == pytest.approx(m_series(d, t, z), rel=1e-9)


def test_m_z_complex_against_direct_quadrature():
    z, t, d = 0.4 + 0.5j, 0.7, 3

    def f(rho):
        e = math.exp(-t * rho * rho)
        return rho ** (d - 1) * e * e / abs(1 - z * e) ** 2

    val = integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-12)[0]
    assert bounds.m_z(d, t, z) == pytest.approx(abs(z) * math.sqrt(bounds.omega(d) * val), rel=1e-9)


def test_m_z_regimes():
    r4 = [bounds.m_z(4, 1.0, 1 - 10.0**-k) ** 2 / math.log(10.0**k) for k in (4, 6, 8)]
    assert r4[0] < r4[1] < r4[2] < math.pi**2
    m5 = [bounds.m_z(5, 1.0, 1 - 10.0**-k) for k in (6, 8, 10)]
    assert abs(m5[2] - m5[1]) < 1e-3 * m5[2]


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 6), st.floats(0.2, 3), st.floats(0.05, 0.99), st.floats(-1.4, 1.4))
def test_sb_chain(d, t, rad, ang):
    z = rad * complex(math.cos(ang), math.sin(ang))
    assert bounds.sb_chain_check(d, t, z).holds


def test_sb_needs_right_half_plane():
    with pytest.raises(DomainError):
        bounds.sb_chain_check(5, 1.0, -0.5)
    with pytest.raises(DomainError):
        bounds.m_z(5, 1.0, 1.0)


def test_discrete_m_converges_to_continuum_in_1d():
    # the discrete kernel lives in x space; the continuum M in xi space carries (2 pi)^(d/2)
    z, t = 0.8, 0.5
    exact = bounds.m_z(1, t, z)
    errs = []
    for n in (256, 512, 1024):
        g = GridSpec(1, 20.0, n, "periodic")
        md = bounds.discrete_gz(build_laplacian(g), z, t).m_discrete
        errs.append(abs(math.sqrt(2 * math.pi) * md - exact) / exact)
    assert errs[-1] < 2e-5
    assert 3.5 < errs[0] / errs[1] < 4.5 and 3.5 < errs[1] / errs[2] < 4.5


def test_discrete_gz_is_the_matrix_function():
    g = GridSpec(1, 3.0, 24, "periodic")
    a = build_laplacian(g)
    z, t = 0.6 - 0.3j, 0.4
    e = a.eig
    semi = (e.vectors * np.exp(-t * e.values)) @ e.vectors.T
    want = z * semi @ np.linalg.inv(np.eye(a.n) - z * semi)
    f = np.random.default_rng(0).standard_normal((a.n, 3))
    assert np.allclose(bounds.discrete_gz(a, z, t).apply(f), want @ f, atol=1e-12)
    with pytest.raises(StructureError):
        bounds.discrete_gz(build_laplacian(GridSpec(1, 3.0, 24)), z, t)


def test_bound_chain_and_dominance_near_one():
    g = GridSpec(1, 6.0, 64, "periodic")
    a, b = build_laplacian(g), assemble(g, gaussian_well(1, 3.0, 1.0))
    dt = semigroup_difference(a, b, 1.0)
    for z in (0.3, 0.9 + 0.05j, 1 - 1e-6, -0.7):
        rep = bounds.bound_chain(a, b, 1.0, z, dt=dt)
        assert rep.holds, rep.to_dict()
    assert bounds.cb_bound_check(a, b, 1.0, 0.99, dt=dt).holds
    assert bounds.prod_bound_check(a, dt, 0.99).holds
    rows = bounds.compare_ob_fo(a, dt)
    assert all(r["bound_fo"] <= r["bound_ob"] for r in rows)


def test_log_one_minus_cos_integral():
    assert bounds.log_one_minus_cos_integral() == pytest.approx(2 * math.pi * math.log(2), rel=1e-12)
