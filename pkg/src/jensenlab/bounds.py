"""Analytic estimate functions and the discrete bound chain for ``log|h|``.

``J_p(a) = int_1^inf (log s)^(p-1) / (s - a)^2 ds`` and
``M(z)^2 = |z|^2 int_{R^d} e^{-2t|xi|^2} / |1 - z e^{-t|xi|^2}|^2 dxi`` are
computed by adaptive quadrature (scipy ``quad``) after substitutions that
spread the near-singular region as ``a -> 1`` or ``z -> 1`` over a
logarithmic variable.

On a periodic grid ``G(z) = z e^{-tA} (I - z e^{-tA})^{-1}`` is a circular
convolution; the bound chain is then checked with the discrete kernel norm,
so every inequality is exact in the discrete model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .checks import Inequality
from .errors import DomainError, QuadratureError, StructureError
from .grid import DiscreteOperator
from .linalg import log_det2
from .semigroup import SemigroupDifference, semigroup_difference

_TOL = 1e-11


def omega(d: int) -> float:
    """Surface measure of the unit sphere in R^d."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def _quad(f, a, b, points=None, tol=_TOL):
    kw = dict(epsabs=0.0, epsrel=tol, limit=800)
    if points and math.isfinite(a) and math.isfinite(b):
        pts = [p for p in points if a < p < b]
        val, _ = integrate.quad(f, a, b, points=pts or None, **kw)
        return val
    if points:
        pts = sorted(p for p in points if a < p < b)
        edges = [a] + pts + [b]
        return sum(integrate.quad(f, lo, hi, **kw)[0] for lo, hi in zip(edges, edges[1:]))
    return integrate.quad(f, a, b, **kw)[0]


def _validated(fn, what, rel=1e-8):
    """Evaluate ``fn(tol)`` at two tolerances and insist they agree."""
    coarse = fn(_TOL)
    fine = fn(_TOL / 2)
    if not math.isfinite(fine) or abs(fine - coarse) > rel * max(abs(fine), 1e-300):
        raise QuadratureError(f"{what}: tolerance halving moved the value "
                              f"from {coarse!r} to {fine!r}")
    return fine


# J_p ----------------------------------------------------------------------
def j_p(p: float, a: float) -> float:
    """``J_p(a)`` for ``p > 0`` and ``a < 1``.

    On ``[1, 2]`` the variable ``x = s - 1 = e^v`` puts the near pole at
    ``x ~ 1 - a`` on a log scale; on ``[2, inf)`` the variable is ``s = e^u``.
    """
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    if not a < 1:
        raise DomainError(f"J_p needs a < 1, got {a}")
    eps = 1.0 - a

    def head(v):
        x = math.exp(v)
        return x * math.log1p(x) ** (p - 1) / (x + eps) ** 2

    def tail(u):
        e = math.exp(-u)
        return u ** (p - 1) * e / (1 - a * e) ** 2

    lo = min(math.log(eps), 0.0) - 60.0 / p
    brk = [math.log(eps)] if eps < 1 else []

    def run(tol):
        return _quad(head, lo, 0.0, brk, tol) + _quad(tail, math.log(2.0), math.inf, tol=tol)

    return _validated(run, f"J_{p}({a})")


# M(z) ---------------------------------------------------------------------
def _check_disk(z):
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError(f"|z| must be < 1, got {abs(z)}")
    return z


def m_z(d: int, t: float, z) -> float:
    """Continuum ``M(z)`` by a radial integral in ``v = log rho``."""
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d}")
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    z = _check_disk(z)
    if z == 0:
        return 0.0
    gap = abs(1 - z)
    star = 0.5 * math.log(gap / t)
    lo = min(star, 0.5 * math.log(1 / t)) - 40.0 / d
    hi = 0.5 * math.log(40.0 / t)

    def f(v):
        rho2 = math.exp(2 * v)
        e = math.exp(-t * rho2)
        return rho2 ** (d / 2) * e * e / abs(1 - z * e) ** 2

    def run(tol):
        return _quad(f, lo, hi, [star], tol)

    val = _validated(run, f"M({z})")
    return abs(z) * math.sqrt(omega(d) * val)


def sb_chain_check(d: int, t: float, z, rel=1e-9) -> Inequality:
    """``M(z)^2 <= omega_d |z|^2 / 2 * t^(-d/2) * J_{d/2}(Re z)``."""
    z = _check_disk(z)
    if not z.real > 0:
        raise DomainError(f"the chain needs Re z > 0, got {z}")
    lhs = m_z(d, t, z) ** 2
    rhs = omega(d) * abs(z) ** 2 / 2 * t ** (-d / 2) * j_p(d / 2, z.real)
    return Inequality("sb: M^2 <= omega |z|^2 J / (2 t^(d/2))", lhs, rhs, rel)


# discrete G(z) ------------------------------------------------------------
@dataclass
class DiscreteGz:
    z: complex
    t: float
    column: np.ndarray
    symbol: np.ndarray
    cell_volume: float
    m_discrete: float

    @property
    def kernel(self) -> np.ndarray:
        return self.column / self.cell_volume

    @property
    def resolvent_norm(self) -> float:
        """``||[I - z e^{-tA}]^{-1}||`` from the exact symbol (``I + G``)."""
        return float(np.max(np.abs(1 + self.symbol)))

    def apply(self, f) -> np.ndarray:
        """``G(z) f`` for node vectors (columns of ``f``)."""
        f = np.asarray(f, dtype=complex)
        shape = self.symbol.shape
        lead = f.shape[1:] if f.ndim > 1 else ()
        grid = f.reshape(shape + lead)
        axes = tuple(range(len(shape)))
        out = np.fft.ifftn(np.fft.fftn(grid, axes=axes) * self.symbol.reshape(shape + (1,) * len(lead)),
                           axes=axes)
        return out.reshape(f.shape)


def _symbol(a: DiscreteOperator):
    if not a.periodic:
        raise StructureError("G(z) as a convolution needs a periodic grid")
    g = a.grid
    k = np.arange(g.points_per_axis)
    one = (2 - 2 * np.cos(2 * np.pi * k / g.points_per_axis)) / g.h**2
    total = np.zeros(g.shape)
    for axis in range(g.d):
        sh = [1] * g.d
        sh[axis] = -1
        total = total + one.reshape(sh)
    return total


def discrete_gz(a: DiscreteOperator, z, t: float) -> DiscreteGz:
    """Convolution kernel of ``G(z)`` on a periodic free operator."""
    z = _check_disk(z)
    lam = _symbol(a)
    e = np.exp(-t * lam)
    symbol = z * e / (1 - z * e)
    col = np.fft.ifftn(symbol)
    w = a.cell_volume
    m = float(np.linalg.norm(col) / math.sqrt(w))
    return DiscreteGz(z, float(t), col.ravel(), symbol, w, m)


def gz_matrix_norm(gz: DiscreteGz, dt: SemigroupDifference) -> float:
    """``||G(z) D_t||_HS`` of the matrix product."""
    return float(np.linalg.norm(gz.apply(dt.matrix)))


def prod_bound_check(a: DiscreteOperator, dt: SemigroupDifference, z, t=None, rel=1e-9) -> Inequality:
    """``||G(z) D_t||_HS <= M_discrete(z) * c2``."""
    t = dt.t if t is None else t
    gz = discrete_gz(a, z, t)
    return Inequality("prod: |G D_t| <= M c2", gz_matrix_norm(gz, dt), gz.m_discrete * dt.c2, rel)


def bound_ob_periodic(a: DiscreteOperator, dt: SemigroupDifference, z) -> float:
    """``bound_ob`` with the resolvent norm read off the exact Fourier symbol."""
    return abs(complex(z)) * discrete_gz(a, z, dt.t).resolvent_norm * dt.c1


def bound_fo(a: DiscreteOperator, dt: SemigroupDifference, z) -> float:
    """``|z| (C1 + C2 M_discrete(z))``."""
    return abs(complex(z)) * (dt.c1 + dt.c2 * discrete_gz(a, z, dt.t).m_discrete)


def cb_bound_check(a: DiscreteOperator, b: DiscreteOperator, t: float, z, rel=1e-9,
                   dt=None) -> Inequality:
    """``log|h(z)| <= |z|^2 (C1 + C2 M(z))^2 / 2``."""
    dt = dt or semigroup_difference(a, b, t)
    z = _check_disk(z)
    f = z * (dt.matrix + discrete_gz(a, z, t).apply(dt.matrix))
    lhs = float(log_det2(f).real)
    return Inequality("cb: log|h| <= |z|^2 (C1 + C2 M)^2 / 2", lhs, 0.5 * bound_fo(a, dt, z) ** 2, rel)


@dataclass
class ChainReport:
    z: complex
    inequalities: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(q.holds for q in self.inequalities)

    def to_dict(self):
        return {"z": [self.z.real, self.z.imag], "holds": self.holds,
                "inequalities": [q.to_dict() for q in self.inequalities]}


def bound_chain(a: DiscreteOperator, b: DiscreteOperator, t: float, z, rel=1e-9,
                dt=None) -> ChainReport:
    """All links from ``log|h|`` to the final bound at one ``z``."""
    dt = dt or semigroup_difference(a, b, t)
    z = _check_disk(z)
    gz = discrete_gz(a, z, t)
    gd = gz_matrix_norm(gz, dt)
    f = z * (dt.matrix + gz.apply(dt.matrix))
    f_hs = float(np.linalg.norm(f))
    log_h = float(log_det2(f).real)
    fo = abs(z) * (dt.c1 + dt.c2 * gz.m_discrete)
    ob = abs(z) * gz.resolvent_norm * dt.c1
    ineqs = [
        Inequality("itt: log|h| <= |F|^2/2", log_h, 0.5 * f_hs**2, rel),
        Inequality("ob: |F| <= |z| |R| |D_t|", f_hs, ob, rel),
        Inequality("fo: |F| <= |z| (|D_t| + |G D_t|)", f_hs, abs(z) * (dt.c1 + gd), rel),
        Inequality("prod: |G D_t| <= M c2", gd, gz.m_discrete * dt.c2, rel),
        Inequality("cb: log|h| <= |z|^2 (C1 + C2 M)^2 / 2", log_h, 0.5 * fo**2, rel),
    ]
    return ChainReport(z, ineqs)


def compare_ob_fo(a: DiscreteOperator, dt: SemigroupDifference, ks=range(2, 9)):
    """Rows ``(z, bound_ob, bound_fo)`` at ``z = 1 - 10^-k``."""
    rows = []
    for k in ks:
        z = 1 - 10.0 ** (-k)
        rows.append({"k": int(k), "z": z, "bound_ob": bound_ob_periodic(a, dt, z), "bound_fo": bound_fo(a, dt, z)})
    return rows


# the base integral of the final estimate ------------------------------------
def log_one_minus_cos_integral(tol=_TOL) -> float:
    """``int_0^{2 pi} log(1 / (1 - cos theta)) d theta``.

    With ``1 - cos theta = 2 sin^2(theta / 2)`` and symmetry about ``pi`` the
    integrand on ``(0, pi)`` is ``-log 2 - 2 log sin(theta / 2)``.
    """
    def f(th):
        return -math.log(2.0) - 2.0 * math.log(math.sin(0.5 * th))

    return 2.0 * integrate.quad(f, 0.0, math.pi, epsabs=0.0, epsrel=tol, limit=800)[0]


def gamma(p):
    return float(special.gamma(p))
