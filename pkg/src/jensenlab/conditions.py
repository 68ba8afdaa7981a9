"""Numerical classification of potentials against the finiteness conditions.

The double integrals

* cond0: ``int int e^{-c|w-w'|^2} |V_-(w)| |V_-(w')|``
* cond2 (d = 4): ``int int_{|w-w'|<1} log(1/|w-w'|) |V_-(w)| |V_-(w')|``
* cond1 (d >= 5): ``int int_{|w-w'|<1} |V_-(w)| |V_-(w')| / |w-w'|^(d-4)``
* u2: the time integrated heat-kernel pairing, split as ``I1 + I2``

are estimated by importance sampling in R^{2d}. One sample set is drawn per
report and reused on every refinement level (truncation radius ``R_k`` up,
cutoff ``eps_k`` down), so the partial integrals of these nonnegative
integrands are monotone by construction and differences between levels are
exact shell contributions.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConfigError, DomainError, InputError
from .potential import PotentialSpec, gaussian_well, power_tail_well, singular_well

CONDITIONS = ("kato", "cond0", "cond2", "cond1", "u2")
CAUCHY_TOL = 1e-3
MIN_R2 = 0.99


def omega(d: int) -> float:
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


# verdicts -------------------------------------------------------------------
def _fit(x, y):
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return float(slope), r2


def classify_sequence(values, scales, cauchy_tol=CAUCHY_TOL, min_levels=4):
    """Verdict for a nondecreasing refinement sequence.

    ``scales`` grow with refinement (``R_k`` or ``1 / eps_k``). Returns
    ``(verdict, info)``; ``info`` carries the fitted growth exponent and R^2.
    """
    v = np.asarray(values, dtype=float)
    s = np.asarray(scales, dtype=float)
    info = {"growth_exponent": None, "r2": None, "limit": float(v[-1]) if v.size else None}
    if v.size and np.all(v == 0):
        return "convergent", info
    rel = np.abs(np.diff(v)) / np.maximum(np.abs(v[1:]), 1e-300)
    if rel.size >= 3 and np.all(rel[-3:] < cauchy_tol):
        return "convergent", info
    pos = v > 0
    if pos.sum() >= min_levels:
        x, y = np.log(s[pos]), np.log(v[pos])
        slope, r2 = _fit(x[-min_levels - 2:], y[-min_levels - 2:])
        info.update(growth_exponent=slope, r2=r2)
        inc = np.diff(v)
        ok = inc > 0
        inc_slope = _fit(np.log(s[1:][ok]), np.log(inc[ok]))[0] if ok.sum() >= 3 else -math.inf
        info["increment_exponent"] = inc_slope
        if slope > 0.05 and r2 >= MIN_R2 and inc_slope > -0.05:
            return "divergent", info
    return "inconclusive", info


@dataclass
class ConditionReport:
    condition_id: str
    verdict: str
    levels: list
    values: list
    std_errors: list
    extrapolation: dict
    parameters: dict
    extra: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return self.values[-1]

    @property
    def std_error(self) -> float:
        return self.std_errors[-1]

    def to_dict(self):
        return {
            "condition_id": self.condition_id,
            "verdict": self.verdict,
            "estimates": [{"level": lv, "value": v, "std_error": e}
                          for lv, v, e in zip(self.levels, self.values, self.std_errors)],
            "extrapolation": self.extrapolation,
            "parameters": self.parameters,
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        keys = sorted(self.levels[0]) if self.levels else []
        w.writerow(["condition_id", "k"] + keys + ["value", "std_error"])
        for k, (lv, v, e) in enumerate(zip(self.levels, self.values, self.std_errors)):
            w.writerow([self.condition_id, k] + [lv[x] for x in keys] + [repr(v), repr(e)])
        return buf.getvalue()


# proposals --------------------------------------------------------------------
def _directions(rng, n, d):
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


class _Gauss:
    def __init__(self, center, s):
        self.c, self.s = np.asarray(center, float), float(s)

    def sample(self, rng, n):
        return self.c + self.s * rng.standard_normal((n, self.c.size))

    def logpdf(self, x):
        d = self.c.size
        r2 = np.sum((x - self.c) ** 2, axis=-1)
        return -0.5 * r2 / self.s**2 - d * math.log(self.s) - 0.5 * d * math.log(2 * math.pi)


class _Radial:
    """Isotropic law about ``center`` given by a radial sampler and log radial pdf."""

    def __init__(self, center, draw, logf):
        self.c = np.asarray(center, float)
        self.draw, self.logf = draw, logf

    def sample(self, rng, n):
        d = self.c.size
        return self.c + self.draw(rng, n)[:, None] * _directions(rng, n, d)

    def logpdf(self, x):
        d = self.c.size
        r = np.sqrt(np.sum((x - self.c) ** 2, axis=-1))
        with np.errstate(divide="ignore"):
            return self.logf(r) - math.log(omega(d)) - (d - 1) * np.log(r)


def _power_radial(center, rho0, kappa):
    """``r = rho0 U^(1/kappa)``: radial pdf ``kappa r^(kappa-1) / rho0^kappa`` on ``[0, rho0]``."""
    def draw(rng, n):
        return rho0 * rng.random(n) ** (1 / kappa)

    def logf(r):
        with np.errstate(divide="ignore"):
            out = math.log(kappa) + (kappa - 1) * np.log(r) - kappa * math.log(rho0)
        return np.where(r <= rho0, out, -np.inf)
    return _Radial(center, draw, logf)


def _lomax_radial(center, s, nu):
    """Heavy radial tail, pdf ``(nu / s) (1 + r/s)^(-nu-1)``."""
    def draw(rng, n):
        return s * (rng.random(n) ** (-1 / nu) - 1)

    def logf(r):
        return math.log(nu / s) - (nu + 1) * np.log1p(r / s)
    return _Radial(center, draw, logf)


def _gamma2_radial(center, scale):
    """``r = sqrt(scale * G)``, ``G ~ Gamma(2)``: pdf ``2 r^3 e^{-r^2/scale} / scale^2``."""
    def draw(rng, n):
        return np.sqrt(scale * rng.gamma(2.0, size=n))

    def logf(r):
        with np.errstate(divide="ignore"):
            return math.log(2) + 3 * np.log(r) - r**2 / scale - 2 * math.log(scale)
    return _Radial(center, draw, logf)


class _Mixture:
    def __init__(self, comps):
        self.comps = comps

    def sample(self, rng, n):
        pick = rng.integers(len(self.comps), size=n)
        out = np.empty((n, self.comps[0].c.size))
        for i, c in enumerate(self.comps):
            m = pick == i
            out[m] = c.sample(rng, int(m.sum()))
        return out

    def logpdf(self, x):
        parts = np.stack([c.logpdf(x) for c in self.comps])
        return special.logsumexp(parts, axis=0) - math.log(len(self.comps))


class _Joint:
    """Pairs near one singular center, radial in R^{2d}."""

    def __init__(self, center, rho0, kappa):
        self.c = np.asarray(center, float)
        self.rad = _power_radial(np.zeros(2 * self.c.size), rho0, kappa)

    def sample(self, rng, n):
        z = self.rad.sample(rng, n)
        d = self.c.size
        return self.c + z[:, :d], self.c + z[:, d:]

    def logpdf(self, w, w2):
        return self.rad.logpdf(np.concatenate([w - self.c, w2 - self.c], axis=1))


def _w_proposal(v: PotentialSpec, reach):
    d = v.d
    comps = []
    for c, s in v.blobs():
        comps.append(_Gauss(c, max(s, 1e-3)))
    for c, _, rad in v.singular_centers():
        comps.append(_power_radial(c, rad, 0.5))
    center = v.radial_center()
    center = np.zeros(d) if center is None else center
    scale = max([s for _, s in v.blobs()] + [1.0])
    comps.append(_Gauss(center, 2 * scale))
    comps.append(_lomax_radial(center, scale, 0.5))
    if reach > 8 * scale:
        comps.append(_Gauss(center, reach / 2))
    return _Mixture(comps)


# kernels ------------------------------------------------------------------------
def _upper_gamma(s, x):
    """Unregularized upper incomplete gamma ``Gamma(s, x)`` for ``s >= 0``."""
    if s == 0:
        return special.exp1(x)
    return special.gammaincc(s, x) * special.gamma(s)


def i1_time_integral(r, t, d):
    """``int_0^t u^(1-d/2) e^{-r^2/4u} du`` for ``d >= 4`` (exact, incomplete gamma)."""
    a = np.asarray(r, float) ** 2 / 4
    with np.errstate(divide="ignore", over="ignore"):
        return a ** (2 - d / 2) * _upper_gamma(d / 2 - 2, a / t)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def i2_time_integral(r, t, d):
    """``int_0^t u (4 pi (2t - u))^(-d/2) e^{-r^2 / 4(2t-u)} du`` by Gauss-Legendre."""
    u = 0.5 * t * (_GL_X + 1)
    wts = 0.5 * t * _GL_W
    r = np.asarray(r, float)[..., None]
    s = 2 * t - u
    return np.sum(wts * u * (4 * math.pi * s) ** (-d / 2) * np.exp(-r**2 / (4 * s)), axis=-1)


def i1_pointwise_constant(d):
    """``C`` with ``int_0^t u^(1-d/2) e^{-r^2/4u} du <= C e^{-r^2/8t} / r^(d-4)`` (d >= 5)."""
    return 8 ** (d / 2 - 2) * math.gamma(d / 2 - 2)


def alpha0(tol=1e-14) -> float:
    """Largest ``alpha`` in (0, 1) with ``int_alpha^inf v^-1 e^{-v/2} dv <= 2 log(1/alpha)`` below it.

    ``phi(alpha) = 2 log(1/alpha) - E1(alpha/2)`` has ``phi' = (e^{-alpha/2} - 2) / alpha < 0``,
    so the admissible set is an interval ``(0, root]``; bisection finds the root.
    """
    def phi(a):
        return 2 * math.log(1 / a) - float(special.exp1(a / 2))
    return float(optimize.bisect(phi, 1e-6, 1.0, xtol=tol))


def d4_log_bound(r, t, a0):
    """Two-regime bound on ``int_0^t u^-1 e^{-r^2/4u} du`` for d = 4."""
    r = np.asarray(r, float)
    near = r <= 2 * math.sqrt(a0 * t)
    with np.errstate(divide="ignore"):
        logs = np.where(near, np.log(4 * t / r**2), math.log(1 / a0))
    return 2 * np.exp(-r**2 / (8 * t)) * logs


# the MC engine --------------------------------------------------------------------
@dataclass
class _Plan:
    kernel: object
    delta: object
    near_only: bool


def _plan(cond, d, params):
    if cond == "cond0":
        c = params["c"]
        if not c > 0:
            raise ConfigError("cond0 needs c > 0")
        return _Plan(lambda r: np.exp(-c * r**2), _Gauss(np.zeros(d), 1 / math.sqrt(2 * c)), False)
    if cond == "cond1":
        if d < 5:
            raise ConfigError("cond1 is stated for d >= 5")
        with np.errstate(divide="ignore"):
            kern = (lambda r: r ** (4.0 - d))
        return _Plan(kern, _power_radial(np.zeros(d), 1.0, 4.0), True)
    if cond == "cond2":
        if d != 4:
            raise ConfigError("cond2 is stated for d = 4")
        return _Plan(lambda r: np.log(1 / r), _power_radial(np.zeros(d), 1.0, 4.0), True)
    if cond == "u2":
        if d < 4:
            raise ConfigError("u2 split needs d >= 4")
        t = params["t"]
        if not t > 0:
            raise ConfigError("u2 needs t > 0")
        pref = (4 * math.pi) ** (-d / 2)

        def kern(r):
            return pref * i1_time_integral(r, t, d) + i2_time_integral(r, t, d)
        return _Plan(kern, _gamma2_radial(np.zeros(d), 8 * t), False)
    raise ConfigError(f"unknown condition {cond!r}")


def default_refinement(levels=10, r0=2.0, eps0=0.5):
    return [{"R": r0 * 2.0**k, "eps": eps0 * 2.0 ** (-k)} for k in range(levels)]


def _check_refinement(ref):
    if not ref or len(ref) < 4:
        raise InputError("refinement needs at least 4 levels")
    for a, b in zip(ref, ref[1:]):
        if not (b["R"] >= a["R"] and b["eps"] <= a["eps"]):
            raise InputError("refinement must have R nondecreasing and eps nonincreasing")
    return ref


def _sample_pairs(v, plan, n, rng, reach):
    """Draw ``n`` pairs and return ``(w, w2, log q)``."""
    wprop = _w_proposal(v, reach)
    dprop = plan.delta
    if not plan.near_only:
        dprop = _Mixture([plan.delta, _Gauss(np.zeros(v.d), max(1.0, reach / 8))])
    joints = [_Joint(c, max(rad, 0.5), 0.5) for c, _, rad in v.singular_centers()]
    pj = 0.3 if joints else 0.0
    n_joint = int(round(pj * n))
    w = wprop.sample(rng, n - n_joint)
    w2 = w + dprop.sample(rng, n - n_joint)
    ws, w2s = [w], [w2]
    if n_joint:
        pick = rng.integers(len(joints), size=n_joint)
        for i, j in enumerate(joints):
            m = int(np.sum(pick == i))
            a, b = j.sample(rng, m)
            ws.append(a)
            w2s.append(b)
    w, w2 = np.concatenate(ws), np.concatenate(w2s)
    logq = wprop.logpdf(w) + dprop.logpdf(w2 - w)
    if joints:
        lj = special.logsumexp(np.stack([j.logpdf(w, w2) for j in joints]), axis=0) - math.log(len(joints))
        logq = np.logaddexp(math.log1p(-pj) + logq, math.log(pj) + lj)
    return w, w2, logq


def _dist_to(x, centers):
    if not centers:
        return np.full(x.shape[0], np.inf)
    return np.min(np.stack([np.sqrt(np.sum((x - c) ** 2, axis=1)) for c in centers]), axis=0)


def _mc_levels(v, plan, refinement, n, seed, kernel_override=None):
    """Weighted integrand samples and the per-level masks."""
    rng = np.random.default_rng(seed)
    reach = refinement[-1]["R"]
    w, w2, logq = _sample_pairs(v, plan, n, rng, reach)
    r = np.sqrt(np.sum((w - w2) ** 2, axis=1))
    vw = np.abs(v.minus(w, cutoff=None))
    vw2 = np.abs(v.minus(w2, cutoff=None))
    center = v.radial_center()
    center = np.zeros(v.d) if center is None else center
    sing = [c for c, _, _ in v.singular_centers()]
    rad = np.maximum(np.sqrt(np.sum((w - center) ** 2, axis=1)),
                     np.sqrt(np.sum((w2 - center) ** 2, axis=1)))
    gap = np.minimum(r, np.minimum(_dist_to(w, sing), _dist_to(w2, sing)))
    base = np.isfinite(logq) & (r > 0)
    if plan.near_only:
        base &= r < 1
    return r, vw, vw2, logq, rad, gap, base


def _estimate(weights, masks, n):
    vals, errs = [], []
    for m in masks:
        f = np.where(m, weights, 0.0)
        vals.append(float(f.sum() / n))
        errs.append(float(f.std() / math.sqrt(n)))
    return vals, errs


def condition_integral(v: PotentialSpec, condition_id: str, params=None, refinement=None,
                       seed: int = 0, samples: int = 200_000) -> ConditionReport:
    """Monte Carlo estimate of one condition integral on a refinement schedule."""
    params = dict(params or {})
    if condition_id == "kato":
        return kato_report(v, **params)
    if condition_id not in CONDITIONS:
        raise ConfigError(f"unknown condition {condition_id!r}")
    if condition_id == "cond0":
        params.setdefault("c", 1.0)
    if condition_id == "u2":
        return u2_split(v, params.get("t", 1.0), refinement, seed, samples)
    d = v.d
    plan = _plan(condition_id, d, params)
    ref = _check_refinement(refinement or default_refinement())
    params["d"] = d
    if v.is_zero():
        z = [0.0] * len(ref)
        return ConditionReport(condition_id, "convergent", ref, z, z, {"limit": 0.0}, params)
    r, vw, vw2, logq, rad, gap, base = _mc_levels(v, plan, ref, samples, seed)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = np.where(base, plan.kernel(np.where(base, r, 1.0)) * vw * vw2 * np.exp(-logq), 0.0)
    f = np.nan_to_num(f, nan=0.0, posinf=0.0)
    masks = [base & (rad <= lv["R"]) & (gap >= lv["eps"]) for lv in ref]
    vals, errs = _estimate(f, masks, samples)
    verdict, info = classify_sequence(vals, [lv["R"] / lv["eps"] for lv in ref])
    return ConditionReport(condition_id, verdict, ref, vals, errs, info, params,
                           {"samples": samples, "seed": seed})


def gaussian_cond0_oracle(amplitude, width, c, d) -> float:
    """Closed form of cond0 for ``V_- = -A exp(-|w|^2 / width^2)``."""
    a = 1 / width**2
    return amplitude**2 * (math.pi / math.sqrt(a * a + 2 * a * c)) ** d


def singular_cond1_converges(beta: float, d: int) -> bool:
    """Exponent count for a ``|w|^-beta`` singularity on a bounded support.

    In the joint radius ``rho`` of ``(w, w')`` near the center the integrand
    scales like ``rho^(-2 beta - (d - 4))`` against the volume ``rho^(2d-1) d rho``
    (and ``|V|`` itself must be locally integrable, ``beta < d``).
    """
    if beta >= d:
        return False
    power = -2 * beta - (d - 4) + 2 * d - 1
    return power > -1


def smallest_convergent_c(v: PotentialSpec, cs=None, seed=0, samples=100_000, refinement=None):
    """Scan a log grid of ``c`` and return ``(c_min or None, reports)``."""
    cs = list(cs if cs is not None else np.logspace(-2, 1, 7))
    reports = [condition_integral(v, "cond0", {"c": c}, refinement, seed, samples) for c in cs]
    ok = [c for c, rep in zip(cs, reports) if rep.verdict == "convergent"]
    return (min(ok) if ok else None), reports


def builtin_family(scale=1.0):
    """Potentials for the ``cond0 + near ==> u2`` consistency grid.

    Gaussians, power tails and bounded-support singular wells in d = 5, and a
    Gaussian and a fast tail in d = 4.  ``scale < 1`` keeps every other member.
    """
    fam = [gaussian_well(5, 1.0, w) for w in (0.5, 1.0, 2.0)]
    fam += [power_tail_well(5, a) for a in (2.0, 4.0, 6.0)]
    fam += [singular_well(5, b) for b in (1.0, 2.0, 3.0)]
    fam += [gaussian_well(4, 2.0, 1.0), power_tail_well(4, 6.0)]
    return fam if scale >= 1 else fam[::2]


# u2 ---------------------------------------------------------------------------------
def u2_split(v: PotentialSpec, t: float, refinement=None, seed: int = 0,
             samples: int = 200_000, bound_pairs: int = 10_000) -> ConditionReport:
    """``I1 + I2`` of the time-integrated condition, plus the pointwise ``I1`` kernel bounds."""
    d = v.d
    if d < 4:
        raise ConfigError("u2 split needs d >= 4")
    if not t > 0:
        raise DomainError("t must be > 0")
    plan = _plan("u2", d, {"t": t})
    ref = _check_refinement(refinement or default_refinement())
    params = {"t": t, "d": d}
    extra = {"kernel_bound": _i1_bound_report(d, t, seed, bound_pairs)}
    if v.is_zero():
        z = [0.0] * len(ref)
        extra.update(I1=z, I2=z)
        return ConditionReport("u2", "convergent", ref, z, z, {"limit": 0.0}, params, extra)
    r, vw, vw2, logq, rad, gap, base = _mc_levels(v, plan, ref, samples, seed)
    pref = (4 * math.pi) ** (-d / 2)
    rr = np.where(base, r, 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        pair = vw * vw2 * np.exp(-logq)
        f1 = np.nan_to_num(np.where(base, pref * i1_time_integral(rr, t, d) * pair, 0.0), posinf=0.0)
        f2 = np.nan_to_num(np.where(base, i2_time_integral(rr, t, d) * pair, 0.0), posinf=0.0)
    masks = [base & (rad <= lv["R"]) & (gap >= lv["eps"]) for lv in ref]
    v1, e1 = _estimate(f1, masks, samples)
    v2, e2 = _estimate(f2, masks, samples)
    vals, errs = _estimate(f1 + f2, masks, samples)
    scales = [lv["R"] / lv["eps"] for lv in ref]
    verdict, info = classify_sequence(vals, scales)
    extra.update(I1=v1, I2=v2, I1_std_errors=e1, I2_std_errors=e2,
                 I1_verdict=classify_sequence(v1, scales)[0],
                 I2_verdict=classify_sequence(v2, scales)[0], samples=samples, seed=seed)
    return ConditionReport("u2", verdict, ref, vals, errs, info, params, extra)


def _i1_bound_report(d, t, seed, n):
    """Check the pointwise ``I1`` kernel bound on ``n`` sampled separations."""
    rng = np.random.default_rng([seed, 1])
    r = np.sqrt(8 * t * rng.gamma(2.0, size=n)) * rng.random(n) ** 0.5
    r = r[r > 0]
    lhs = i1_time_integral(r, t, d)
    if d >= 5:
        rhs = i1_pointwise_constant(d) * np.exp(-r**2 / (8 * t)) / r ** (d - 4)
        info = {"form": "C exp(-r^2/8t) / r^(d-4)", "C": i1_pointwise_constant(d)}
    else:
        a0 = alpha0()
        rhs = d4_log_bound(r, t, a0)
        info = {"form": "two-regime log bound", "alpha0": a0}
    ratio = lhs / rhs
    info.update(pairs=int(r.size), max_ratio=float(np.max(ratio)),
                holds=bool(np.all(lhs <= rhs * (1 + 1e-12))))
    return info


# Kato -------------------------------------------------------------------------------
_KGL_X, _KGL_W = np.polynomial.legendre.leggauss(8)


def kato_norm(v: PotentialSpec, alpha: float, sample_count: int = 64, seed: int = 0,
              directions: int = 64, depth: float = 1e-12) -> float:
    """``sup_x int_{|y-x|<=alpha} |V(y)| / |y-x|^(d-2) dy`` over sampled ``x``.

    Around each ``x`` the integral is ``omega_d int_0^alpha r mean_S |V(x + r s)| dr``,
    done by Gauss-Legendre on dyadic shells down to ``alpha * depth``. The sphere
    mean uses a fixed seeded direction set, so the result is deterministic and
    monotone in ``alpha``.
    """
    d = v.d
    if d < 3:
        raise DomainError("the Kato criterion in this form needs d >= 3")
    if sample_count < 32:
        raise InputError("sample_count must be >= 32")
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    if v.is_zero():
        return 0.0
    xs = _kato_points(v, sample_count, seed)
    dirs = _directions(np.random.default_rng([seed, 2]), directions, d)
    dirs = np.concatenate([dirs, -dirs])
    shells = int(math.ceil(math.log2(1 / depth)))
    hi = alpha * 2.0 ** -np.arange(shells)
    lo = hi / 2
    mid, half = (hi + lo) / 2, (hi - lo) / 2
    r = (mid[:, None] + half[:, None] * _KGL_X[None, :]).ravel()
    wr = (half[:, None] * _KGL_W[None, :]).ravel()
    best = 0.0
    for x in xs:
        pts = x[None, None, :] + r[:, None, None] * dirs[None, :, :]
        vals = np.abs(v(pts.reshape(-1, d))).reshape(r.size, -1).mean(axis=1)
        best = max(best, float(omega(d) * np.sum(wr * r * vals)))
    return best


def _kato_points(v, n, seed):
    rng = np.random.default_rng([seed, 3])
    fixed = [c for c, _, _ in v.singular_centers()] + [c for c, _ in v.blobs()]
    pts = list(fixed)
    scales = [s for _, s in v.blobs()] or [1.0]
    centers = [c for c, _ in v.blobs()] or [np.zeros(v.d)]
    while len(pts) < n:
        i = rng.integers(len(centers))
        pts.append(centers[i] + scales[i] * rng.standard_normal(v.d))
    return np.asarray(pts[:max(n, len(fixed))], float)


def kato_report(v: PotentialSpec, alphas=None, sample_count=64, seed=0) -> ConditionReport:
    """Kato norms on decreasing ``alpha``; convergent means evidence for a zero limit."""
    alphas = list(alphas if alphas is not None else [2.0 ** -k for k in range(0, 8)])
    vals = [kato_norm(v, a, sample_count, seed) for a in alphas]
    info = {"limit": vals[-1], "decay_exponent": None, "r2": None}
    verdict = "inconclusive"
    if all(x == 0 for x in vals):
        verdict = "convergent"
    elif all(x > 0 for x in vals):
        slope, r2 = _fit(np.log(alphas), np.log(vals))
        info.update(decay_exponent=slope, r2=r2)
        if slope > 0.05 and r2 >= MIN_R2:
            verdict = "convergent"
        elif vals[-1] >= 0.5 * vals[0]:
            verdict = "divergent"
    levels = [{"alpha": a} for a in alphas]
    return ConditionReport("kato", verdict, levels, vals, [0.0] * len(vals), info,
                           {"d": v.d, "sample_count": sample_count})


# L^p rules ------------------------------------------------------------------------
@dataclass
class LpClassification:
    d: int
    p: float
    rules_fired: list
    admissible: bool
    note: str = ""

    @property
    def rule_fired(self) -> str:
        return self.rules_fired[0] if self.rules_fired else "none"

    def to_dict(self):
        return {"d": self.d, "p": self.p, "rules_fired": self.rules_fired or ["none"],
                "admissible": self.admissible, "note": self.note}


def _close(a, b):
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def _in(p, lo, hi, lo_open=False):
    above = p > lo if lo_open else (p > lo or _close(p, lo))
    return above and (p < hi or _close(p, hi))


def lp_classify(d: int, p: float, v_is_kato: bool = True, v_in_L1: bool = False) -> LpClassification:
    """Which sufficient ``L^p`` conditions on ``V_-`` apply in dimension ``d``."""
    if int(d) != d or d < 1:
        raise InputError("d must be a positive integer")
    if not p >= 1:
        raise InputError("p must be >= 1")
    d = int(d)
    fired = []
    if d >= 4 and _in(p, 2 * d / (d + 4), 2.0) and v_is_kato:
        fired.append("corollary1_range")
    if (_close(p, 1.0) or v_in_L1) and v_is_kato and (d >= 4 or d == 1):
        fired.append("corollary2_L1_kato")
    if d >= 5 and _close(p, 2 * d / (d + 4)):
        fired.append("hls_endpoint")
    if (d == 1 and _in(p, 1.0, 1.5)) or (d == 2 and _in(p, 1.0, 2.0, lo_open=True)) or \
            (d >= 3 and _in(p, d / 2, d / 2 + 1)):
        fired.append("lieb_thirring_range")
    note = ""
    if d == 1 and not fired:
        note = ("no sufficient rule; V = -(1+|x|)^-alpha with alpha in (1/2, 2/3) lies in L^2 "
                "but has a divergent eigenvalue sum (see wkb-sweep)")
    elif d in (2, 3):
        note = "corollary ranges are not established in d = 2, 3"
    return LpClassification(d, float(p), fired, bool(fired), note)


def power_tail_in_lp(alpha: float, d: int, p: float) -> bool:
    """``(1 + |x|)^-alpha`` is in ``L^p(R^d)`` iff ``alpha p > d``."""
    return alpha * p > d


# Lieb-Thirring integral factor --------------------------------------------------
def lt_quantity(v: PotentialSpec, d: int, gamma: float, refinement=None, seed=0,
                samples=200_000) -> ConditionReport:
    """``int |V_-|^(d/2 + gamma)`` on a truncation/cutoff schedule."""
    if not gamma >= 0:
        raise DomainError("gamma must be >= 0")
    if d != v.d:
        raise ConfigError(f"potential dimension {v.d} does not match d = {d}")
    ref = _check_refinement(refinement or default_refinement())
    power = d / 2 + gamma
    params = {"d": d, "gamma": gamma, "power": power}
    center = v.radial_center()
    if center is not None:
        vals = [_lt_radial(v, center, power, lv["R"], lv["eps"]) for lv in ref]
        errs = [0.0] * len(vals)
        method = "radial quadrature"
    else:
        vals, errs = _lt_mc(v, power, ref, seed, samples)
        method = "monte carlo"
    verdict, info = classify_sequence(vals, [lv["R"] / lv["eps"] for lv in ref])
    return ConditionReport("lt", verdict, ref, vals, errs, info, params, {"method": method})


def _lt_radial(v, center, power, big, eps):
    d = v.d
    e1 = np.zeros(d)
    e1[0] = 1.0
    sing = any(np.allclose(c, center) for c, _, _ in v.singular_centers())
    lo = math.log(eps) if sing else math.log(min(eps, 1e-8))
    brk = [math.log(s) for _, s in v.blobs() if s > 0]

    def f(u):
        r = math.exp(u)
        return omega(d) * r**d * abs(min(float(v(center + r * e1)), 0.0)) ** power

    pts = sorted(p for p in brk if lo < p < math.log(big))
    edges = [lo] + pts + [math.log(big)]
    return float(sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-10, limit=400)[0]
                     for a, b in zip(edges, edges[1:])))


def _lt_mc(v, power, ref, seed, n):
    rng = np.random.default_rng(seed)
    prop = _w_proposal(v, ref[-1]["R"])
    w = prop.sample(rng, n)
    logq = prop.logpdf(w)
    center = np.zeros(v.d)
    rad = np.sqrt(np.sum((w - center) ** 2, axis=1))
    gap = _dist_to(w, [c for c, _, _ in v.singular_centers()])
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f = np.nan_to_num(np.abs(v.minus(w)) ** power * np.exp(-logq), posinf=0.0)
    masks = [(rad <= lv["R"]) & (gap >= lv["eps"]) for lv in ref]
    return _estimate(f, masks, n)
