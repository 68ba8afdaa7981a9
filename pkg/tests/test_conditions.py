import json
import math

import numpy as np
import pytest

from jensenlab import conditions as C
from jensenlab.errors import ConfigError, DomainError, InputError
from jensenlab.potential import (Constant, PotentialSpec, gaussian_well, power_tail_well,
                                 singular_well, zero)


def test_classify_sequence_synthetic():
    scales = 2.0 ** np.arange(10)
    assert C.classify_sequence(1 - 2.0 ** -(2 * np.arange(10)), scales)[0] == "convergent"
    assert C.classify_sequence(scales**0.5, scales)[0] == "divergent"
    assert C.classify_sequence(np.zeros(6), scales[:6])[0] == "convergent"
    assert C.classify_sequence([1, 2, 1.5, 3], scales[:4])[0] == "inconclusive"


def test_gaussian_cond0_matches_oracle():
    v = gaussian_well(5, 1.0, 1.0)
    rep = C.condition_integral(v, "cond0", {"c": 1.0}, seed=1, samples=100_000)
    oracle = C.gaussian_cond0_oracle(1.0, 1.0, 1.0, 5)
    assert rep.verdict == "convergent"
    assert abs(rep.value - oracle) <= 3 * rep.std_error
    assert rep.std_error < 0.05 * oracle


def test_gaussian_cond0_oracle_d1_by_quadrature():
    from scipy import integrate
    val = integrate.dblquad(lambda y, x: math.exp(-x * x - y * y - 0.5 * (x - y) ** 2),
                            -10, 10, -10, 10)[0]
    assert C.gaussian_cond0_oracle(1.0, 1.0, 0.5, 1) == pytest.approx(val, rel=1e-8)


def test_zero_potential_all_convergent_at_zero():
    v = zero(5)
    for cid in ("cond0", "cond1"):
        rep = C.condition_integral(v, cid, samples=1000)
        assert rep.verdict == "convergent" and rep.value == 0.0
    assert C.u2_split(v, 1.0, samples=1000).value == 0.0
    assert C.kato_norm(v, 0.5) == 0.0


def test_power_tail_verdicts():
    slow = C.condition_integral(power_tail_well(5, 2.0), "cond1", seed=2, samples=100_000)
    fast = C.condition_integral(power_tail_well(5, 6.0), "cond1", seed=2, samples=100_000)
    assert slow.verdict == "divergent" and fast.verdict == "convergent"


def test_singular_cond1_exponent_rule_and_mc():
    assert C.singular_cond1_converges(2.0, 5) and not C.singular_cond1_converges(4.8, 5)
    assert not C.singular_cond1_converges(5.0, 5)
    good = C.condition_integral(singular_well(5, 2.0), "cond1", seed=0, samples=100_000)
    bad = C.condition_integral(singular_well(5, 4.8), "cond1", seed=0, samples=100_000)
    assert good.verdict == "convergent" and bad.verdict == "divergent"


def test_u2_split_and_kernel_bound():
    rep = C.u2_split(gaussian_well(5, 1.0, 1.0), 0.1, seed=0, samples=50_000)
    assert rep.verdict == "convergent"
    assert rep.extra["kernel_bound"]["holds"]


def test_i1_constant_and_alpha0():
    assert C.i1_pointwise_constant(5) == pytest.approx(math.sqrt(8) * math.gamma(0.5))
    a0 = C.alpha0()
    assert 0 < a0 < 1


def test_cond_dimension_rules():
    with pytest.raises(ConfigError):
        C.condition_integral(gaussian_well(4), "cond1")
    with pytest.raises(ConfigError):
        C.condition_integral(gaussian_well(5), "cond2")
    with pytest.raises(ConfigError):
        C.condition_integral(gaussian_well(5), "cond9")
    with pytest.raises(InputError):
        C.condition_integral(gaussian_well(5), "cond0", refinement=C.default_refinement(3))


def test_kato_constant_potential_exact():
    v = PotentialSpec(3, (Constant(-1.0),))
    assert C.kato_norm(v, 0.5) == pytest.approx(C.omega(3) / 8, rel=1e-10)
    with pytest.raises(DomainError):
        C.kato_norm(gaussian_well(2), 0.5)
    with pytest.raises(InputError):
        C.kato_norm(v, 0.5, sample_count=8)


def test_kato_singular_verdicts():
    assert C.kato_report(singular_well(3, 1.5)).verdict == "convergent"
    assert C.kato_report(singular_well(3, 2.5)).verdict == "divergent"


@pytest.mark.parametrize("d,p,rules", [
    (5, 10 / 9, {"corollary1_range", "hls_endpoint"}),
    (4, 1.0, {"corollary1_range", "corollary2_L1_kato"}),
    (4, 2.0, {"corollary1_range", "lieb_thirring_range"}),
    (4, 3.0, {"lieb_thirring_range"}),
    (5, 3.0, {"lieb_thirring_range"}),
    (6, 1.0, {"corollary2_L1_kato"}),
])
def test_lp_classify_boundaries(d, p, rules):
    assert set(C.lp_classify(d, p).rules_fired) == rules


def test_lp_classify_low_dimensions():
    rep = C.lp_classify(3, 1.2)
    assert rep.rule_fired == "none" and not rep.admissible and rep.note
    assert C.lp_classify(1, 2.0).note
    with pytest.raises(InputError):
        C.lp_classify(4, 0.5)


def test_power_tail_in_lp():
    assert C.power_tail_in_lp(0.75, 1, 2) and not C.power_tail_in_lp(0.5, 1, 2)


def test_lt_quantity_closed_forms():
    box = PotentialSpec(3, (Constant(0.0),))
    ind = C.lt_quantity(gaussian_well(3, 1.0, 1.0), 3, 1.0)
    assert ind.value == pytest.approx((math.pi / 2.5) ** 1.5, rel=1e-8)
    assert C.lt_quantity(box, 3, 1.0).value == 0.0


def test_report_serialization():
    rep = C.condition_integral(gaussian_well(5), "cond0", samples=5000)
    doc = json.loads(rep.to_json())
    assert doc["condition_id"] == "cond0" and len(doc["estimates"]) == 10
    assert rep.to_csv().splitlines()[0].startswith("condition_id,k")


def test_same_seed_same_numbers():
    v = gaussian_well(5, 1.0, 0.7)
    r1 = C.condition_integral(v, "cond1", seed=9, samples=20_000)
    r2 = C.condition_integral(v, "cond1", seed=9, samples=20_000)
    assert r1.values == r2.values
