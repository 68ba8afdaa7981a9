import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jensenlab.acceptance import random_instance
from jensenlab.errors import DomainError, InputError, NonConvergenceError
from jensenlab.grid import GridSpec, assemble, build_laplacian, direct_negative_sum, from_matrix
from jensenlab.jensen import (_Sampler, adaptive_circle, default_schedule, eigensum_jensen, f_of_z,
                              itt_check, jensen_circle, log_h, ob_check, winding_number,
                              zero_correspondence_check)
from jensenlab.potential import gaussian_well
from jensenlab.semigroup import semigroup_difference


def scalar_pair():
    return from_matrix([[1.0]], kind="free"), from_matrix([[-1.0]])


def scalar_h(z):
    """Det_2 for A = 1, B = -1, t = 1 in closed form."""
    f = z * (math.e - 1 / math.e) / (1 - z / math.e)
    return (1 - z * math.e) / (1 - z / math.e) * np.exp(f)


def test_log_h_matches_scalar_closed_form():
    a, b = scalar_pair()
    dt = semigroup_difference(a, b, 1.0)
    for z in (0.3, -0.5, 0.2 + 0.6j):
        assert log_h(a, dt, z) == pytest.approx(math.log(abs(scalar_h(z))), rel=1e-12)


@pytest.mark.parametrize("r", [0.2, 0.5, 0.9])
def test_circle_mean_is_jensen_formula(r):
    a, b = scalar_pair()
    dt = semigroup_difference(a, b, 1.0)
    ev = jensen_circle(a, dt, 1.0, r, 256)
    want = max(0.0, math.log(r * math.e))
    assert ev.circle_average == pytest.approx(want, abs=1e-12)
    assert ev.winding == (1 if r > 1 / math.e else 0)


def test_toy_log2():
    a, b = from_matrix([[0.0]], kind="free"), from_matrix([[-math.log(2)]])
    res = eigensum_jensen(a, b, 1.0)
    assert res.jensen_sum == pytest.approx(math.log(2), rel=1e-12)
    assert res.zero_count == 1 and res.correction_applied == "zero_count"


def test_no_negative_spectrum_gives_zero():
    a = from_matrix(np.diag([0.5, 1.0, 2.0]), kind="free")
    b = from_matrix(np.diag([0.7, 1.0, 3.0]))
    res = eigensum_jensen(a, b, 1.0)
    assert res.jensen_sum == 0.0 and res.zero_count == 0 and res.correction_applied == "none"


def test_multiplicity_counted():
    a = from_matrix(np.eye(2), kind="free")
    b = from_matrix(-0.5 * np.eye(2))
    res = eigensum_jensen(a, b, 1.0)
    assert res.zero_count == 2
    assert res.jensen_sum == pytest.approx(1.0, rel=1e-10)
    rep = zero_correspondence_check(a, b, 1.0)
    assert rep.clusters == [(-0.5, 2)] and rep.holds


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10_000), st.integers(5, 40), st.integers(1, 4))
def test_random_instances_match_direct(seed, n, rank):
    a, b = random_instance(np.random.default_rng(seed), n, rank)
    res = eigensum_jensen(a, b, 1.0)
    assert res.relative_gap <= 1e-8
    assert res.zero_count == int(np.sum(np.linalg.eigvalsh(b.entries) < 0))


def test_well_instance_and_zero_check():
    g = GridSpec(1, 8.0, 160)
    a, b = build_laplacian(g), assemble(g, gaussian_well(1, 3.0, 1.0))
    res = eigensum_jensen(a, b, 1.0)
    assert res.jensen_sum == pytest.approx(direct_negative_sum(b), rel=1e-9)
    assert zero_correspondence_check(a, b, 1.0).holds


def test_compressed_sampler_matches_full():
    g = GridSpec(1, 8.0, 96)
    a, b = build_laplacian(g), assemble(g, gaussian_well(1, 3.0, 0.5))
    dt = semigroup_difference(a, b, 1.0)
    full, small = _Sampler(a, dt, compress=False), _Sampler(a, dt)
    assert small.rank < full.rank
    z = 0.7 * np.exp(1j * np.linspace(0, 6, 9))
    assert np.allclose(small.log_abs_h(z), full.log_abs_h(z), atol=1e-10)
    ref = [log_h(a, dt, zz) for zz in z]
    assert np.allclose(full.log_abs_h(z), ref, atol=1e-10)


def test_worker_count_does_not_change_result():
    a, b = random_instance(np.random.default_rng(3), 60, 3)
    r1 = eigensum_jensen(a, b, 1.0, workers=1)
    r3 = eigensum_jensen(a, b, 1.0, workers=3)
    assert r1.jensen_sum == r3.jensen_sum


def test_winding_number():
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    assert winding_number(np.exp(2j * th))[0] == 2
    assert winding_number(np.exp(-1j * th))[0] == -1


def test_adaptive_circle_converges():
    a, b = scalar_pair()
    dt = semigroup_difference(a, b, 1.0)
    ev = adaptive_circle(a, dt, 0.95)
    assert ev.converged and ev.circle_average == pytest.approx(math.log(0.95 * math.e), abs=1e-11)


def test_input_errors():
    a, b = scalar_pair()
    dt = semigroup_difference(a, b, 1.0)
    with pytest.raises(InputError):
        jensen_circle(a, dt, 1.0, 0.5, 100)
    with pytest.raises(DomainError):
        jensen_circle(a, dt, 1.0, 1.0)
    with pytest.raises(InputError):
        jensen_circle(a, dt, 2.0, 0.5)
    with pytest.raises(InputError):
        eigensum_jensen(a, b, 1.0, [0.5, 0.4])


def test_short_schedule_does_not_stabilize():
    a, b = scalar_pair()
    with pytest.raises(NonConvergenceError) as err:
        eigensum_jensen(a, b, 1.0, default_schedule(4, 5))
    assert len(err.value.trace) == 2


def test_itt_and_ob_hold_on_random_points():
    a, b = random_instance(np.random.default_rng(1), 30, 2)
    dt = semigroup_difference(a, b, 0.5)
    rng = np.random.default_rng(2)
    for _ in range(10):
        z = 0.99 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        assert itt_check(a, dt, z).holds
        assert ob_check(a, dt, z).holds
    assert np.all(f_of_z(a, dt, 0) == 0)
