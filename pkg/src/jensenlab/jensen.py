"""Eigenvalue sums from the regularized determinant and Jensen's formula.

With ``F(z) = z (I - z e^{-tA})^{-1} D_t`` and ``h(z) = Det_2(I - F(z))`` the
zeros of ``h`` in the unit disk sit at ``z = e^{t lambda}`` for the negative
eigenvalues ``lambda`` of ``B``. Jensen's formula turns the circle mean of
``log|h|`` into ``sum (log r - t lambda)`` over the enclosed zeros; counting
those zeros by the argument principle makes the ``r -> 1`` limit an exact
finite computation.

The circle sampler works in the eigenbasis of ``A``, where the resolvent is
diagonal. Determinant and trace are similarity invariant, so ``log|h|`` is
unchanged; every sample costs one complex LU.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .checks import Inequality
from .errors import DomainError, InputError, NonConvergenceError, QuadratureError
from .grid import DiscreteOperator, direct_negative_sum, negative_eigenvalues
from .linalg import expm_sym, log_det2, logdet_batch, solve_complex
from .semigroup import SemigroupDifference, semigroup_difference

_CHUNK_BYTES = 32 * 2**20


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("JENSENLAB_WORKERS", "1")))
    except ValueError:
        return 1


def default_t(a: DiscreteOperator, target: float = 20.0) -> float:
    """``t`` with ``t * lambda_max(A) = target``."""
    top = float(a.eig.values[-1])
    if top <= 0:
        return 1.0
    return target / top


def default_schedule(k_min: int = 4, k_max: int = 40):
    return [1.0 - 2.0 ** (-k) for k in range(k_min, k_max + 1)]


def _check_z(z):
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError(f"|z| must be < 1, got |z| = {abs(z)}")
    return z


def _check_t(dt: SemigroupDifference, t):
    if t is not None and not math.isclose(t, dt.t, rel_tol=1e-12):
        raise InputError(f"t = {t} does not match the semigroup difference (t = {dt.t})")


def f_of_z(a: DiscreteOperator, dt: SemigroupDifference, z, t=None) -> np.ndarray:
    """``F(z) = z [I - z e^{-tA}]^{-1} D_t`` as a dense complex matrix."""
    _check_t(dt, t)
    z = _check_z(z)
    if z == 0:
        return np.zeros((a.n, a.n), dtype=complex)
    semi = expm_sym(a.eig, dt.t).entries
    return z * solve_complex(np.eye(a.n) - z * semi, dt.matrix)


def resolvent_norm(a: DiscreteOperator, z, t) -> float:
    """Operator 2-norm of ``[I - z e^{-tA}]^{-1}`` (A is symmetric)."""
    z = _check_z(z)
    return float(np.max(1.0 / np.abs(1.0 - z * np.exp(-t * a.eig.values))))


def log_h(a: DiscreteOperator, dt: SemigroupDifference, z, t=None) -> float:
    """``log|h(z)|``; ``-inf`` where ``I - F(z)`` is singular."""
    return float(log_det2(f_of_z(a, dt, z, t)).real)


class _Sampler:
    """Batched evaluation of ``h`` on many points, in the eigenbasis of ``A``.

    ``D_t`` is numerically low rank for localized perturbations. Writing the
    eigenbasis form as ``P diag(mu) P^T`` with the negligible ``mu`` dropped,
    ``det(I - R P diag(mu) P^T) = det(I_k - diag(mu) P^T R P)`` (``R`` diagonal),
    which shrinks every determinant to ``k x k``. The trace uses the full
    diagonal.
    """

    def __init__(self, a: DiscreteOperator, dt: SemigroupDifference, workers=None, compress=True):
        ea = a.eig
        self.n = a.n
        self.decay = np.exp(-dt.t * ea.values)
        dtil = ea.vectors.T @ dt.matrix @ ea.vectors
        dtil = 0.5 * (dtil + dtil.T)
        self.ddiag = np.diag(dtil).copy()
        self.factor = None
        if compress:
            mu, p = np.linalg.eigh(dtil)
            keep = np.abs(mu) > self.n * np.finfo(float).eps * max(np.max(np.abs(mu)), 1e-300)
            if keep.sum() < self.n // 2:
                self.factor = (mu[keep], p[:, keep])
        self.dtil = dtil
        self.rank = self.n if self.factor is None else int(self.factor[0].size)
        self.workers = workers or default_workers()
        self.chunk = max(1, _CHUNK_BYTES // (16 * max(self.n * self.rank, 1)))

    def _eval(self, z):
        coef = z[:, None] / (1.0 - z[:, None] * self.decay[None, :])
        trace = coef @ self.ddiag
        if self.factor is None:
            m = -coef[:, :, None] * self.dtil[None, :, :]
        else:
            mu, p = self.factor
            if mu.size == 0:
                return np.zeros(z.size), np.ones(z.size, dtype=complex), trace
            g = (p.T[None, :, :] * coef[:, None, :]) @ p
            m = -mu[None, :, None] * g
        idx = np.arange(m.shape[-1])
        m[:, idx, idx] += 1.0
        logabs, phase = logdet_batch(m)
        return logabs, phase, trace

    def __call__(self, z):
        """Return ``(log|det(I-F)|, unit phase of det(I-F), tr F)`` for each z."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        pieces = [z[i:i + self.chunk] for i in range(0, z.size, self.chunk)]
        if self.workers > 1 and len(pieces) > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                parts = list(ex.map(self._eval, pieces))
        else:
            parts = [self._eval(p) for p in pieces]
        return tuple(np.concatenate([p[k] for p in parts]) for k in range(3))

    def log_abs_h(self, z):
        logabs, _, trace = self(z)
        return logabs + trace.real

    def h(self, z):
        logabs, phase, trace = self(z)
        mag = np.exp(np.minimum(logabs + trace.real, 700.0))
        return np.where(np.isfinite(logabs), mag * phase * np.exp(1j * trace.imag), 0.0)


def winding_number(phases) -> tuple:
    """Winding of a closed, uniformly sampled curve of unit phases.

    Returns ``(winding, largest |phase step|)``; the count is trustworthy
    when the largest step is well below pi.
    """
    p = np.asarray(phases)
    steps = np.angle(np.roll(p, -1) / p)
    return int(round(np.sum(steps) / (2 * np.pi))), float(np.max(np.abs(steps)))


@dataclass
class JensenEvaluation:
    t: float
    r: float
    theta_count: int
    samples: np.ndarray
    circle_average: float
    zero_hits: int = 0
    winding: int = 0
    max_phase_step: float = 0.0
    converged: bool = True


def _circle_points(r, k):
    return r * np.exp(2j * np.pi * np.arange(k) / k)


def _sample_circle(sampler, r, k):
    logabs, phase, trace = sampler(_circle_points(r, k))
    return logabs + trace.real, phase


def jensen_circle(a: DiscreteOperator, dt: SemigroupDifference, t, r, theta_count=256,
                  sampler=None) -> JensenEvaluation:
    """Uniform trapezoid rule for the mean of ``log|h|`` on ``|z| = r``."""
    _check_t(dt, t)
    if not 0 <= r < 1:
        raise DomainError(f"r must lie in [0, 1), got {r}")
    k = int(theta_count)
    if k < 16 or k & (k - 1):
        raise InputError("theta_count must be a power of two >= 16")
    sampler = sampler or _Sampler(a, dt)
    hits = 0
    rr = r
    for _ in range(4):
        vals, phase = _sample_circle(sampler, rr, k)
        bad = ~np.isfinite(vals)
        if not bad.any():
            w, step = winding_number(phase)
            return JensenEvaluation(dt.t, rr, k, vals, float(np.mean(vals)), hits, w, step)
        hits += int(bad.sum())
        rr = rr * (1 + 1e-6) if rr * (1 + 1e-6) < 1 else rr * (1 - 1e-6)
    raise QuadratureError(f"h vanishes on the circle r = {r} after 3 perturbations")


def adaptive_circle(a, dt, r, theta0=64, max_theta=8192, tol=1e-11, sampler=None):
    """Double the sample count until the circle mean and winding settle.

    Previously computed samples are reused (odd nodes are added each round).
    ``converged`` is False when ``max_theta`` is reached first.
    """
    sampler = sampler or _Sampler(a, dt)
    ev = jensen_circle(a, dt, dt.t, r, theta0, sampler)
    rr, vals, hits = ev.r, ev.samples, ev.zero_hits
    _, phase = _sample_circle(sampler, rr, theta0)
    k = theta0
    prev = ev.circle_average
    prev_w = ev.winding
    while True:
        k *= 2
        if k > max_theta:
            w, step = winding_number(phase)
            return JensenEvaluation(dt.t, rr, k // 2, vals, prev, hits, w, step, False)
        z_new = rr * np.exp(2j * np.pi * (np.arange(k // 2) * 2 + 1) / k)
        logabs, ph, trace = sampler(z_new)
        v_new = logabs + trace.real
        if not np.all(np.isfinite(v_new)):
            return jensen_circle_retry(a, dt, r, k, max_theta, tol, sampler)
        merged = np.empty(k)
        merged[0::2], merged[1::2] = vals, v_new
        pmerged = np.empty(k, dtype=complex)
        pmerged[0::2], pmerged[1::2] = phase, ph
        vals, phase = merged, pmerged
        avg = float(np.mean(vals))
        w, step = winding_number(phase)
        if abs(avg - prev) <= tol * max(1.0, abs(avg)) and w == prev_w and step < np.pi / 2:
            return JensenEvaluation(dt.t, rr, k, vals, avg, hits, w, step, True)
        prev, prev_w = avg, w


def jensen_circle_retry(a, dt, r, theta0, max_theta, tol, sampler):
    for j in range(1, 4):
        rr = r * (1 - j * 1e-6)
        try:
            ev = adaptive_circle(a, dt, rr, theta0, max_theta, tol, sampler)
        except QuadratureError:
            continue
        ev.zero_hits += j
        return ev
    raise QuadratureError(f"h vanishes near the circle r = {r} after 3 perturbations")


@dataclass
class EigensumResult:
    jensen_sum: float
    direct_sum: float
    radii_used: list
    correction_applied: str
    relative_gap: float
    zero_count: int
    t: float
    trace: list = field(default_factory=list)

    def to_dict(self):
        return {
            "jensen_sum": self.jensen_sum,
            "direct_sum": self.direct_sum,
            "relative_gap": self.relative_gap,
            "zero_count": self.zero_count,
            "correction_applied": self.correction_applied,
            "t": self.t,
            "radii_used": list(self.radii_used),
            "trace": self.trace,
        }


def eigensum_jensen(a: DiscreteOperator, b: DiscreteOperator, t: float, schedule=None,
                    theta0=64, max_theta=8192, stable_count=3, stable_tol=1e-8,
                    workers=None) -> EigensumResult:
    """``sum |lambda|`` over the negative spectrum of ``B`` from circle means of ``log|h|``.

    Each radius of ``schedule`` yields ``(mean - N log r) / t`` with ``N`` the
    winding number of ``det(I - F)``; the run stops once ``stable_count``
    consecutive converged radii agree to ``stable_tol``.
    """
    schedule = list(default_schedule() if schedule is None else schedule)
    if any(not 0 < r < 1 for r in schedule) or any(
            r2 <= r1 for r1, r2 in zip(schedule, schedule[1:])):
        raise InputError("radius schedule must be strictly increasing inside (0, 1)")
    dt = semigroup_difference(a, b, t)
    sampler = _Sampler(a, dt, workers)
    direct = direct_negative_sum(b)
    trace, good = [], []
    failures = 0
    for r in schedule:
        ev = adaptive_circle(a, dt, r, theta0, max_theta, sampler=sampler)
        est = (ev.circle_average - ev.winding * math.log(ev.r)) / t
        trace.append({"r": ev.r, "theta_count": ev.theta_count, "circle_average": ev.circle_average,
                      "winding": ev.winding, "estimate": est, "converged": ev.converged,
                      "zero_hits": ev.zero_hits})
        if not ev.converged:
            failures += 1
            if good and failures >= 3:
                break
            continue
        failures = 0
        good.append((ev.r, ev.winding, est))
        tail = good[-stable_count:]
        if len(tail) == stable_count and len({w for _, w, _ in tail}) == 1:
            ests = [e for _, _, e in tail]
            if max(ests) - min(ests) <= stable_tol * max(1.0, abs(ests[-1])):
                r_last, n_zero, value = tail[-1]
                if n_zero == 0 and abs(value) <= stable_tol:
                    value = 0.0
                gap = abs(value - direct) / max(direct, 1e-15)
                return EigensumResult(value, direct, [r for r, _, _ in good],
                                      "zero_count" if n_zero else "none", gap, n_zero, t, trace)
    raise NonConvergenceError("radius schedule exhausted without stabilization", trace)


@dataclass
class ZeroReport:
    t: float
    eigenvalues: list
    clusters: list
    h_at_zeros: list
    thresholds: list
    radius: float
    winding: int
    expected_count: int

    @property
    def values_vanish(self) -> bool:
        return all(hv <= th for hv, th in zip(self.h_at_zeros, self.thresholds))

    @property
    def count_matches(self) -> bool:
        return self.winding == self.expected_count

    @property
    def holds(self) -> bool:
        return self.values_vanish and self.count_matches

    def to_dict(self):
        return {"t": self.t, "eigenvalues": self.eigenvalues, "clusters": self.clusters,
                "h_at_zeros": self.h_at_zeros, "thresholds": self.thresholds,
                "radius": self.radius, "winding": self.winding,
                "expected_count": self.expected_count, "holds": self.holds}


def _clusters(values, gap=1e-9):
    out = []
    for v in sorted(values):
        if out and v - out[-1][-1] <= gap:
            out[-1].append(v)
        else:
            out.append([v])
    return [(float(np.mean(c)), len(c)) for c in out]


def zero_correspondence_check(a: DiscreteOperator, b: DiscreteOperator, t: float,
                              max_theta=1 << 15) -> ZeroReport:
    """Check that ``h(e^{t lambda}) = 0`` and that the winding counts multiplicity."""
    lam = negative_eigenvalues(b)
    dt = semigroup_difference(a, b, t)
    sampler = _Sampler(a, dt)
    clusters = _clusters(lam)
    hvals, thresholds = [], []
    for lam_c, _ in clusters:
        z0 = math.exp(t * lam_c)
        delta = 1e-6 * z0
        h0 = abs(sampler.h(np.array([z0]))[0])
        hp, hm = sampler.h(np.array([z0 + delta, z0 - delta]))
        with np.errstate(over="ignore", invalid="ignore"):
            lip = abs(hp - hm) / (2 * delta)
        hvals.append(float(h0))
        thresholds.append(1e-7 * (1 + float(lip)))
    zmax = math.exp(t * max(lam)) if lam.size else 0.0
    r = 0.5 * (1 + zmax)
    ev = adaptive_circle(a, dt, r, 64, max_theta, sampler=sampler)
    return ZeroReport(float(t), [float(x) for x in lam], clusters, hvals, thresholds,
                      float(ev.r), ev.winding, int(lam.size))


def hs_of_f(a: DiscreteOperator, dt: SemigroupDifference, z) -> float:
    return float(np.linalg.norm(f_of_z(a, dt, z)))


def bound_ob(a: DiscreteOperator, dt: SemigroupDifference, z) -> float:
    """``|z| ||[I - z e^{-tA}]^{-1}|| ||D_t||_HS``."""
    return abs(complex(z)) * resolvent_norm(a, z, dt.t) * dt.c1


def itt_check(a: DiscreteOperator, dt: SemigroupDifference, z, rel=1e-9) -> Inequality:
    """``log|h(z)| <= ||F(z)||_HS^2 / 2``."""
    f = f_of_z(a, dt, z)
    return Inequality("itt: log|h| <= |F|^2/2", float(log_det2(f).real),
                      0.5 * float(np.linalg.norm(f)) ** 2, rel)


def ob_check(a: DiscreteOperator, dt: SemigroupDifference, z, rel=1e-9) -> Inequality:
    return Inequality("ob: |F| <= |z| |R| |D_t|", hs_of_f(a, dt, z), bound_ob(a, dt, z), rel)
