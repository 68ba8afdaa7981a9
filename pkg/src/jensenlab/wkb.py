"""The one-dimensional slowly decaying well ``V(x) = -(1 + |x|)^(-alpha)``.

For ``0 < alpha < 2`` the operator ``-d^2/dx^2 + V`` has infinitely many
bound states with ``lambda_n ~ -n^(-2 alpha / (2 - alpha))``, so the sum of
``|lambda_n|`` diverges once ``alpha < 2/3`` although ``V`` is square
integrable for ``alpha > 1/2``. This module discretizes the operator on a
Dirichlet box, fits the exponent, and tracks the partial sums.

Two eigen-solvers are provided: LAPACK's tridiagonal selection
(``scipy.linalg.eigh_tridiagonal``) and an independent Sturm-sequence
bisection used as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg, optimize

from .conditions import classify_sequence
from .errors import DomainError, InputError, ResolutionError

MIN_STATES = 30


def predicted_exponent(alpha: float) -> float:
    return -2 * alpha / (2 - alpha)


def wkb_count(alpha: float, L: float) -> float:
    """Semiclassical number of bound states in ``[-L, L]``: ``(1/pi) int sqrt|V|``."""
    s = 1 - alpha / 2
    return (2 / math.pi) * ((1 + L) ** s - 1) / s


def suggested_box(alpha: float, target: int = 2 * MIN_STATES, h: float = 1.0):
    """``(L, n)`` whose semiclassical count reaches ``target`` at spacing ``h``."""
    s = 1 - alpha / 2
    L = math.ceil((target * math.pi / 2 * s + 1) ** (1 / s))
    return float(L), int(2 * L / h) + 1


def tail_potential(alpha, x):
    return -(1.0 + np.abs(x)) ** (-alpha)


def tridiagonal(alpha: float, L: float, n: int):
    """Diagonal, off-diagonal and nodes of the box operator (nodes include ``+-L``)."""
    if int(n) != n or n < 3:
        raise InputError("n must be an integer >= 3")
    x = np.linspace(-L, L, int(n))
    h = x[1] - x[0]
    diag = 2 / h**2 + tail_potential(alpha, x)
    off = np.full(int(n) - 1, -1 / h**2)
    return diag, off, x


def negative_tridiagonal_eigs(diag, off) -> np.ndarray:
    lo = float(np.min(diag) - 2 * np.max(np.abs(off)) - 1.0)
    try:
        w = linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select="v",
                                    select_range=(lo, 0.0))
    except ValueError:
        return np.zeros(0)
    return np.sort(w[w < 0])


# Sturm bisection -------------------------------------------------------------
def sturm_count(diag, off, mu) -> np.ndarray:
    """Number of eigenvalues below each ``mu`` (negative pivots of ``T - mu``)."""
    mu = np.atleast_1d(np.asarray(mu, float))
    b2 = np.asarray(off, float) ** 2
    tiny = np.finfo(float).tiny ** 0.5
    q = diag[0] - mu
    count = (q < 0).astype(int)
    for j in range(1, len(diag)):
        q = np.where(q == 0, tiny, q)
        q = (diag[j] - mu) - b2[j - 1] / q
        count += q < 0
    return count


def sturm_eigen(diag, off, count: int, upper: float = 0.0, iters: int = 80) -> np.ndarray:
    """Lowest ``count`` eigenvalues below ``upper`` by vectorized bisection."""
    if count < 1:
        raise InputError("count must be >= 1")
    diag = np.asarray(diag, float)
    radius = 2 * np.max(np.abs(off)) if len(off) else 0.0
    lo0 = float(np.min(diag) - radius - 1.0)
    avail = int(sturm_count(diag, off, upper)[0])
    if avail < count:
        raise ResolutionError(f"only {avail} eigenvalues lie below {upper}; "
                              f"bracket for index {avail} failed")
    k = np.arange(count)
    lo = np.full(count, lo0)
    hi = np.full(count, float(upper))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, off, mid) > k
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)


def shooting_eigen(alpha: float, L: float, n: int, count=None) -> np.ndarray:
    """Negative eigenvalues of the box operator by Sturm bisection."""
    diag, off, _ = tridiagonal(alpha, L, n)
    total = int(sturm_count(diag, off, 0.0)[0])
    if total == 0:
        return np.zeros(0)
    return sturm_eigen(diag, off, min(count or total, total))


# square well oracle -------------------------------------------------------------
def square_well_roots(depth: float, half_width: float) -> np.ndarray:
    """Bound states of ``-u'' - depth * 1_{|x|<a} u`` on the line (ascending)."""
    a = half_width
    kmax = math.sqrt(depth)
    out = []

    def even(k):
        return k * math.tan(k * a) - math.sqrt(depth - k * k)

    def odd(k):
        return -k / math.tan(k * a) - math.sqrt(depth - k * k)

    j = 0
    while j * math.pi / (2 * a) < kmax:
        lo = j * math.pi / (2 * a) + 1e-13
        hi = min((j + 1) * math.pi / (2 * a) - 1e-13, kmax - 1e-15)
        f = even if j % 2 == 0 else odd
        if lo < hi and f(lo) * f(hi) < 0:
            k = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
            out.append(k * k - depth)
        j += 1
    return np.sort(np.array(out))


def square_well_box(depth, half_width, L, n):
    """Box operator with the well edges on nodes carrying half the depth."""
    x = np.linspace(-L, L, int(n))
    h = x[1] - x[0]
    v = np.where(np.abs(x) < half_width - 1e-9 * h, -depth, 0.0)
    v = np.where(np.abs(np.abs(x) - half_width) <= 1e-9 * h, -depth / 2, v)
    return 2 / h**2 + v, np.full(int(n) - 1, -1 / h**2)


def square_well_extrapolated(depth, half_width, L, n0, levels=3, solver="sturm"):
    """Richardson-extrapolated box eigenvalues on ``h, h/2, h/4, ...``.

    ``n0 - 1`` must be a multiple of ``2 L / half_width`` so the well edges
    fall on nodes at every level.
    """
    rows = []
    for j in range(levels):
        n = (n0 - 1) * 2**j + 1
        dg, off = square_well_box(depth, half_width, L, n)
        if solver == "sturm":
            rows.append(shooting_from_tridiagonal(dg, off))
        else:
            rows.append(negative_tridiagonal_eigs(dg, off))
    m = min(len(r) for r in rows)
    table = [np.asarray(r[:m]) for r in rows]
    order = 2
    while len(table) > 1:
        table = [(4 ** (order // 2) * f - c) / (4 ** (order // 2) - 1) for c, f in zip(table, table[1:])]
        order += 2
    return table[0]


def shooting_from_tridiagonal(diag, off):
    total = int(sturm_count(diag, off, 0.0)[0])
    return sturm_eigen(diag, off, total) if total else np.zeros(0)


# the sweep ---------------------------------------------------------------------
@dataclass
class WkbSweep:
    alpha: float
    L: float
    n: int
    eigenvalues: np.ndarray
    fitted_exponent: float
    predicted_exponent: float
    partial_sums: np.ndarray
    fit_window: tuple
    sum_growth_exponent: float
    sum_verdict: str
    extra: dict = field(default_factory=dict)

    @property
    def relative_error(self) -> float:
        return abs(self.fitted_exponent - self.predicted_exponent) / abs(self.predicted_exponent)

    def to_dict(self):
        return {
            "alpha": self.alpha, "L": self.L, "n": self.n,
            "count": int(self.eigenvalues.size),
            "fitted_exponent": self.fitted_exponent,
            "predicted_exponent": self.predicted_exponent,
            "relative_error": self.relative_error,
            "fit_window": list(self.fit_window),
            "sum_growth_exponent": self.sum_growth_exponent,
            "sum_verdict": self.sum_verdict,
            "eigenvalues": self.eigenvalues.tolist(),
            "partial_sums": self.partial_sums.tolist(),
        }

    def csv_rows(self):
        for k, (lam, s) in enumerate(zip(self.eigenvalues, self.partial_sums), start=1):
            yield k, float(lam), float(s)


def _middle_third(m):
    lo = max(1, m // 3)
    hi = max(lo + 3, 2 * m // 3)
    return lo, min(hi, m)


def wkb_sweep(alpha: float, L=None, n=None, h: float = 1.0) -> WkbSweep:
    """Eigenvalues, exponent fit and partial sums for one ``alpha``."""
    if not 0 < alpha < 2:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    if L is None:
        L = max(2000.0, suggested_box(alpha, 100, h)[0]) if alpha < 1 else suggested_box(alpha, MIN_STATES + 10, h)[0]
    if n is None:
        n = int(round(2 * L / h)) + 1
    expected = wkb_count(alpha, L)
    if expected < MIN_STATES:
        sl, sn = suggested_box(alpha, 2 * MIN_STATES, 2 * L / (n - 1))
        raise ResolutionError(f"about {expected:.0f} bound states resolvable in this box; "
                              f"need {MIN_STATES}", suggested_L=sl, suggested_n=sn)
    diag, off, _ = tridiagonal(alpha, L, n)
    lam = negative_tridiagonal_eigs(diag, off)
    m = lam.size
    if m < MIN_STATES:
        sl, sn = suggested_box(alpha, 2 * MIN_STATES, 2 * L / (n - 1))
        raise ResolutionError(f"only {m} bound states found; need {MIN_STATES}",
                              suggested_L=sl, suggested_n=sn)
    idx = np.arange(1, m + 1)
    lo, hi = _middle_third(m)
    slope = float(np.polyfit(np.log(idx[lo:hi]), np.log(-lam[lo:hi]), 1)[0])
    sums = np.cumsum(-lam)
    growth = float(np.polyfit(np.log(idx[lo:hi]), np.log(sums[lo:hi]), 1)[0])
    verdict = _sum_verdict(slope, growth, sums[:hi])
    return WkbSweep(float(alpha), float(L), int(n), lam, slope, predicted_exponent(alpha), sums,
                    (int(lo) + 1, int(hi)), growth, verdict, {"expected_count": expected})


def _sum_verdict(slope, growth, sums):
    """Partial sums judged on the fit window only (the box pollutes the top).

    Divergent: eigenvalue exponent >= -1 together with a positive growth
    exponent of the partial sums. Convergent: the last three relative
    increments inside the window are below 1e-3.
    """
    rel = np.diff(sums)[-3:] / sums[-3:]
    if np.all(rel < 1e-3):
        return "convergent"
    if slope >= -1 and growth > 0:
        return "divergent"
    return "inconclusive"


# L^2 membership --------------------------------------------------------------------
@dataclass
class L2Membership:
    alpha: float
    member: bool
    quadrature_verdict: str
    partial_integrals: list

    @property
    def consistent(self) -> bool:
        if self.member:
            return self.quadrature_verdict != "divergent"
        return self.quadrature_verdict != "convergent"

    def __bool__(self):
        return self.member


def l2_membership(alpha: float, levels: int = 12) -> L2Membership:
    """``(1 + |x|)^(-alpha)`` in ``L^2(R)`` iff ``2 alpha > 1``; cross-checked by quadrature."""
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    radii = [10.0 ** (k / 2) for k in range(2, 2 + levels)]

    def f(u):
        return 2 * math.exp(u) * (1 + math.exp(u)) ** (-2 * alpha)

    vals = []
    acc = 2 * integrate.quad(lambda x: (1 + x) ** (-2 * alpha), 0, 1, epsabs=0, epsrel=1e-12)[0]
    prev = 0.0
    for R in radii:
        acc += integrate.quad(f, prev, math.log(R), epsabs=0, epsrel=1e-12, limit=200)[0]
        prev = math.log(R)
        vals.append(acc)
    verdict, _ = classify_sequence(vals, radii)
    return L2Membership(float(alpha), 2 * alpha > 1, verdict, vals)
