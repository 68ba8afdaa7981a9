"""The ten acceptance criteria as plain functions.

Each ``criterion_k(scale=1.0, seed=...)`` returns a ``CriterionResult``.
``scale < 1`` shrinks instance counts for a quick self test; the stated
tolerances never change with scale.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds, conditions, wkb
from .grid import GridSpec, assemble, build_laplacian, from_matrix
from .jensen import default_schedule, eigensum_jensen, zero_correspondence_check
from .linalg import expm_sym
from .grid import DiscreteOperator
from .linalg import SymMatrix
from .potential import PotentialSpec, Gaussian, gaussian_well, square_well
from .semigroup import duhamel_difference, hs_split_check, semigroup_difference


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.cid:2d}: {self.name} ({self.seconds:.1f} s)"


def _count(n, scale, minimum=1):
    return max(minimum, int(round(n * scale)))


# instances -------------------------------------------------------------------
def random_instance(rng, n, rank, gap=0.05):
    """``A = Q diag(a) Q^T`` with ``a`` in [0.2, 4]; ``B = A - sum c_k v_k v_k^T``.

    Redrawn until no eigenvalue of ``B`` lies within ``gap`` of zero.
    """
    while True:
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        a = (q * rng.uniform(0.2, 4.0, n)) @ q.T
        v = rng.standard_normal((n, rank))
        v /= np.linalg.norm(v, axis=0)
        b = a - (v * rng.uniform(1.0, 4.0, rank)) @ v.T
        if np.min(np.abs(np.linalg.eigvalsh(b))) > gap:
            return from_matrix(a, kind="free"), from_matrix(b)


def well_instance(rng, n, gap=0.05):
    """1-D Dirichlet Gaussian or square well with no eigenvalue in ``(-gap, 0)``."""
    while True:
        L = float(rng.uniform(8.0, 12.0))
        g = GridSpec(1, L, n)
        depth = float(rng.uniform(1.0, 10.0))
        if rng.random() < 0.5:
            v = gaussian_well(1, depth, float(rng.uniform(0.5, 2.0)), float(rng.uniform(-2, 2)))
        else:
            v = square_well(1, depth, float(rng.uniform(0.5, 2.0)), float(rng.uniform(-2, 2)))
        b = assemble(g, v)
        ev = np.linalg.eigvalsh(b.entries)
        if not np.any((ev < 0) & (ev > -gap)):
            return build_laplacian(g), b


def jensen_instances(scale=1.0, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(_count(50, scale)):
        n = int(rng.integers(20, 201))
        out.append(("random", 1.0) + random_instance(rng, n, int(rng.integers(1, 11))))
    sizes = [128, 192, 256, 320, 384, 448, 512, 256, 384, 512]
    for k in range(_count(10, scale)):
        out.append(("well", 1.0) + well_instance(rng, sizes[k % len(sizes)]))
    return out


# criteria ----------------------------------------------------------------------
def criterion_1(scale=1.0, seed=2024, instances=None):
    """Jensen sum vs direct sum, relative gap <= 1e-6, runtime <= 60 s."""
    t0 = time.perf_counter()
    insts = instances or jensen_instances(scale, seed)
    gaps, zeros = [], []
    for kind, t, a, b in insts:
        res = eigensum_jensen(a, b, t)
        gaps.append(res.relative_gap if res.direct_sum > 0 else abs(res.jensen_sum))
        zeros.append(res.zero_count)
    secs = time.perf_counter() - t0
    worst = float(max(gaps))
    ok = worst <= 1e-6 and secs <= 60.0
    return CriterionResult(1, "Jensen identity reproduction", ok, secs,
                           {"instances": len(insts), "worst_relative_gap": worst,
                            "zero_counts": zeros, "budget_s": 60.0})


def criterion_2(scale=1.0, seed=2024, instances=None):
    """Zero correspondence on the instances of criterion 1."""
    t0 = time.perf_counter()
    insts = instances or jensen_instances(scale, seed)
    fails = []
    worst = 0.0
    for i, (kind, t, a, b) in enumerate(insts):
        rep = zero_correspondence_check(a, b, t)
        worst = max([worst] + [h / th for h, th in zip(rep.h_at_zeros, rep.thresholds)])
        if not rep.holds:
            fails.append({"instance": i, "winding": rep.winding, "expected": rep.expected_count})
    return CriterionResult(2, "zero correspondence", not fails, time.perf_counter() - t0,
                           {"instances": len(insts), "failures": fails,
                            "worst_h_over_threshold": worst})


def periodic_instances(scale=1.0, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(_count(20, scale)):
        d = 1 if i % 5 < 3 else 2
        g = GridSpec(d, float(rng.uniform(4.0, 8.0)), int(rng.integers(48, 129)) if d == 1 else 16,
                     "periodic")
        terms = [Gaussian(-float(rng.uniform(0.5, 5.0)), tuple(rng.uniform(-2, 2, d)),
                          float(rng.uniform(0.4, 2.0))) for _ in range(int(rng.integers(1, 3)))]
        a = build_laplacian(g)
        out.append((a, assemble(g, PotentialSpec(d, terms)), float(rng.uniform(0.5, 2.0))))
    return out


def criterion_3(scale=1.0, seed=7):
    """Bound chain at every radius of the schedule, and (fo) below (ob) near z = 1."""
    t0 = time.perf_counter()
    insts = periodic_instances(scale, seed)
    radii = default_schedule(4, 40)
    broken, dominated = [], 0
    for i, (a, b, t) in enumerate(insts):
        dt = semigroup_difference(a, b, t)
        for r in radii:
            rep = bounds.bound_chain(a, b, t, r, rel=1e-9, dt=dt)
            if not rep.holds:
                broken.append({"instance": i, "r": r,
                               "failed": [q.label for q in rep.inequalities if not q.holds]})
        rows = bounds.compare_ob_fo(a, dt, range(2, 9))
        dominated += all(row["bound_fo"] <= row["bound_ob"] for row in rows)
    need = math.ceil(0.9 * len(insts))
    ok = not broken and dominated >= need
    return CriterionResult(3, "bound chain and (fo) vs (ob)", ok, time.perf_counter() - t0,
                           {"instances": len(insts), "violations": broken[:10],
                            "fo_dominates": dominated, "required": need})


def criterion_4(scale=1.0, seed=0):
    t0 = time.perf_counter()
    errs = {"J1(0.5)": abs(bounds.j_p(1, 0.5) - 2) / 2}
    for p in (1.5, 2, 2.5, 3):
        errs[f"J{p}(0)"] = abs(bounds.j_p(p, 0.0) - math.gamma(p)) / math.gamma(p)
    ratios = [bounds.j_p(2, 1 - 10.0**-k) / math.log(10.0**k) for k in range(2, 11)]
    tails = {p: [bounds.j_p(p, 1 - 10.0**-k) for k in range(2, 11)] for p in (2.5, 3, 4)}
    # bounded as a -> 1: the last two decades move by less than 1e-3 relative
    bounded = all(abs(v[-1] - v[-3]) <= 1e-3 * v[-1] for v in tails.values())
    ok = max(errs.values()) <= 1e-8 and all(0.5 <= r <= 3 for r in ratios) and bounded
    return CriterionResult(4, "J_p anchors", ok, time.perf_counter() - t0,
                           {"relative_errors": errs, "J2_log_ratios": ratios,
                            "tail_values": {str(k): v for k, v in tails.items()}})


def criterion_5(scale=1.0, seed=11):
    t0 = time.perf_counter()
    r4 = [bounds.m_z(4, 1.0, 1 - 10.0**-k) ** 2 / math.log(10.0**k) for k in range(1, 9)]
    # leading constant of M^2 / log(1/(1-r)) for d = 4, t = 1 is omega_4 / 2 = pi^2
    bounded4 = max(r4) <= 2 * math.pi**2
    plateaus = {}
    for d in (5, 6):
        m8, m10 = bounds.m_z(d, 1.0, 1 - 1e-8), bounds.m_z(d, 1.0, 1 - 1e-10)
        plateaus[d] = abs(m10 - m8) / m10
    rng = np.random.default_rng(seed)
    n = _count(100, scale, 10)
    worst, held = 0.0, 0
    for _ in range(n):
        d = int(rng.integers(4, 7))
        t = float(rng.uniform(0.2, 2.0))
        rad, ang = math.sqrt(rng.random()) * 0.999, rng.uniform(-0.49 * math.pi, 0.49 * math.pi)
        z = rad * complex(math.cos(ang), math.sin(ang))
        q = bounds.sb_chain_check(d, t, z)
        held += q.holds
        worst = max(worst, q.ratio)
    ok = bounded4 and all(v < 1e-3 for v in plateaus.values()) and held == n
    return CriterionResult(5, "M(z) regimes", ok, time.perf_counter() - t0,
                           {"d4_ratios": r4, "plateau_change": plateaus, "sb_held": held,
                            "sb_samples": n, "sb_max_ratio": worst})


def criterion_6(scale=1.0, seed=0):
    t0 = time.perf_counter()
    g = GridSpec(1, 6.0, 64)
    a, b = build_laplacian(g), assemble(g, gaussian_well(1, 5.0, 1.0))
    t = 0.1
    exact = semigroup_difference(a, b, t).matrix
    norm = np.max(np.abs(exact))
    steps = [64, 128, 256, 512]
    gaps = [float(np.max(np.abs(duhamel_difference(a, b, t, s).matrix - exact)) / norm) for s in steps]
    order = -float(np.polyfit(np.log(steps), np.log(gaps), 1)[0])
    ok = gaps[-1] <= 1e-6 and order >= 1.9
    return CriterionResult(6, "Duhamel consistency", ok, time.perf_counter() - t0,
                           {"panels": steps, "relative_gaps": gaps, "fitted_order": order})


def criterion_7(scale=1.0, seed=5):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    n = _count(50, scale, 5)
    dom_fail, chain_fail = [], []
    for i in range(n):
        d = 1 if i % 3 else 2
        g = GridSpec(d, float(rng.uniform(3, 8)), int(rng.integers(24, 80)) if d == 1 else 12)
        vals = -rng.uniform(0, 6) * rng.random(g.unknowns) ** 2
        a = build_laplacian(g)
        b = DiscreteOperator(g, SymMatrix(a.entries + np.diag(vals), g.cell_volume),
                             "with_potential", None, vals)
        t = float(rng.uniform(0.05, 2.0))
        ea, eb = expm_sym(a.eig, t).entries, expm_sym(b.eig, t).entries
        if np.any(ea > eb + 1e-12):
            dom_fail.append(i)
        if not hs_split_check(a, b, t).holds:
            chain_fail.append(i)
    ok = not dom_fail and not chain_fail
    return CriterionResult(7, "semigroup domination and hs2 chain", ok, time.perf_counter() - t0,
                           {"potentials": n, "domination_failures": dom_fail,
                            "chain_failures": chain_fail})


def criterion_8(scale=1.0, seed=0):
    t0 = time.perf_counter()
    val = bounds.log_one_minus_cos_integral() / (2 * math.pi)
    err = abs(val - math.log(2))
    return CriterionResult(8, "log(1/(1-cos)) base integral", err <= 1e-8, time.perf_counter() - t0,
                           {"value": val, "abs_error": err})


def criterion_9(scale=1.0, seed=0):
    t0 = time.perf_counter()
    s75 = wkb.wkb_sweep(0.75)
    s60 = wkb.wkb_sweep(0.6)
    s150 = wkb.wkb_sweep(1.5)
    l2 = wkb.l2_membership(0.6)
    secs = time.perf_counter() - t0
    ok = (s75.relative_error <= 0.10 and s60.sum_growth_exponent > 0 and s60.sum_verdict == "divergent"
          and bool(l2) and l2.consistent and s150.sum_verdict == "convergent" and secs <= 120)
    return CriterionResult(9, "WKB counterexample", ok, secs,
                           {"alpha_0.75": {"fitted": s75.fitted_exponent, "predicted": s75.predicted_exponent},
                            "alpha_0.6": {"sum_growth_exponent": s60.sum_growth_exponent,
                                          "verdict": s60.sum_verdict, "l2": bool(l2)},
                            "alpha_1.5": {"verdict": s150.sum_verdict}})


def criterion_10(scale=1.0, seed=3):
    t0 = time.perf_counter()
    samples = _count(200_000, scale, 50_000)
    g5 = gaussian_well(5, 1.0, 1.0)
    c0 = conditions.condition_integral(g5, "cond0", {"c": 1.0}, seed=seed, samples=samples)
    c1 = conditions.condition_integral(g5, "cond1", seed=seed, samples=samples)
    u2 = conditions.u2_split(g5, 0.1, seed=seed, samples=samples)
    oracle = conditions.gaussian_cond0_oracle(1.0, 1.0, 1.0, 5)
    z = abs(c0.value - oracle) / c0.std_error
    gauss_ok = (c0.verdict == c1.verdict == u2.verdict == "convergent") and z <= 3
    counter, premise = [], 0
    for v in conditions.builtin_family(scale):
        near = "cond2" if v.d == 4 else "cond1"
        r0 = conditions.condition_integral(v, "cond0", {"c": 1.0}, seed=seed, samples=samples // 2)
        r1 = conditions.condition_integral(v, near, seed=seed, samples=samples // 2)
        if r0.verdict == r1.verdict == "convergent":
            premise += 1
            ru = conditions.u2_split(v, 0.1, seed=seed, samples=samples // 2)
            if ru.verdict != "convergent":
                counter.append({"potential": v.to_dict(), "u2": ru.verdict})
    lp = {
        "d5_p10/9": conditions.lp_classify(5, 10 / 9).rules_fired,
        "d4_p1": conditions.lp_classify(4, 1).rules_fired,
        "d4_p2": conditions.lp_classify(4, 2).rules_fired,
        "d4_p3": conditions.lp_classify(4, 3).rules_fired,
    }
    lp_ok = (set(lp["d5_p10/9"]) == {"corollary1_range", "hls_endpoint"}
             and set(lp["d4_p1"]) == {"corollary1_range", "corollary2_L1_kato"}
             and set(lp["d4_p2"]) == {"corollary1_range", "lieb_thirring_range"}
             and set(lp["d4_p3"]) == {"lieb_thirring_range"})
    ok = gauss_ok and premise > 0 and not counter and lp_ok
    return CriterionResult(10, "condition machinery", ok, time.perf_counter() - t0,
                           {"cond0": c0.value, "oracle": oracle, "z_score": z,
                            "verdicts": [c0.verdict, c1.verdict, u2.verdict],
                            "family_premise_met": premise, "counterexamples": counter, "lp": lp})


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(scale=1.0, only=None, report=print):
    shared = jensen_instances(scale)
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only and k not in only:
            continue
        res = fn(scale, instances=shared) if k in (1, 2) else fn(scale)
        results.append(res)
        if report:
            report(res.line())
    return results
