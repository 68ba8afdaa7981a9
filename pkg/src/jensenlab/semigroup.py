"""Semigroup differences ``D_t = exp(-tB) - exp(-tA)`` and their functionals.

Conventions: a matrix ``M`` on a grid of cell volume ``w`` acts on node
values, so its integral kernel is ``M / w``. With that reading

* ``c1`` (HS norm of the kernel) is the Frobenius norm of the matrix;
* ``c2 = [sum_y (sum_u |D(u,y)| w)^2 w]^(1/2) = sqrt(w) * ||column abs sums||``;
* the L1 -> Linf norm of a positive semigroup is its largest kernel value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .checks import Inequality
from .errors import DomainError, InputError, ShapeError
from .grid import DiscreteOperator
from .linalg import expm_sym, hs_norm


@dataclass(frozen=True)
class SemigroupDifference:
    t: float
    matrix: np.ndarray
    c1: float
    c2: float
    source: str = "direct"
    cell_volume: float = 1.0

    @property
    def kernel(self) -> np.ndarray:
        return self.matrix / self.cell_volume


def _check_pair(a: DiscreteOperator, b: DiscreteOperator, t):
    if a.n != b.n:
        raise ShapeError(f"operators act on different spaces ({a.n} vs {b.n})")
    if not np.isclose(a.cell_volume, b.cell_volume, rtol=1e-12):
        raise ShapeError("operators live on grids with different cell volumes")
    if a.grid is not None and b.grid is not None and a.grid != b.grid:
        raise ShapeError("operators live on different grids")
    if not np.isfinite(t) or t <= 0:
        raise DomainError(f"t must be finite and > 0, got {t}")


def c1_of(matrix, w) -> float:
    return hs_norm(np.asarray(matrix) / w, w)


def c2_of(matrix, w) -> float:
    colabs = np.sum(np.abs(matrix), axis=0)
    return float(np.sqrt(w) * np.linalg.norm(colabs))


def _wrap(t, m, w, source):
    return SemigroupDifference(float(t), m, c1_of(m, w), c2_of(m, w), source, w)


def semigroup_difference(a: DiscreteOperator, b: DiscreteOperator, t: float) -> SemigroupDifference:
    _check_pair(a, b, t)
    m = expm_sym(b.eig, t).entries - expm_sym(a.eig, t).entries
    return _wrap(t, m, a.cell_volume, "direct")


def duhamel_difference(a: DiscreteOperator, b: DiscreteOperator, t: float,
                       steps: int = 512) -> SemigroupDifference:
    """Midpoint-rule Duhamel integral ``int_0^t e^{-sB} (A - B) e^{-(t-s)A} ds``.

    For ``B = A + V_-`` the middle factor is ``|V_-|``, which keeps ``D_t >= 0``.

    Panels are summed in the two eigenbases: with ``B = Qb diag(beta) Qb^T`` and
    ``A = Qa diag(a) Qa^T`` the panel sum is
    ``Qb [(Qb^T V Qa) * W] Qa^T`` where ``W_ik = ds sum_j e^{-s_j beta_i - (t-s_j) a_k}``.
    """
    _check_pair(a, b, t)
    if int(steps) != steps or steps < 2:
        raise InputError("steps must be an integer >= 2")
    ea, eb = a.eig, b.eig
    v = a.entries - b.entries
    ds = t / steps
    s = (np.arange(steps) + 0.5) * ds
    Eb = np.exp(-np.outer(s, eb.values))
    Ea = np.exp(-np.outer(t - s, ea.values))
    W = ds * (Eb.T @ Ea)
    vt = eb.vectors.T @ v @ ea.vectors
    m = eb.vectors @ (vt * W) @ ea.vectors.T
    return _wrap(t, m, a.cell_volume, "duhamel")


def l1_linf_norm(semigroup_matrix, w) -> float:
    """Largest absolute kernel value of ``semigroup_matrix``."""
    return float(np.max(np.abs(semigroup_matrix)) / w)


@dataclass
class HsSplitReport:
    t: float
    hs_full: float
    hs_b_half: float
    hs_a_half: float
    q2_bound_sq: float
    inequalities: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(q.holds for q in self.inequalities)


def hs_split_check(a: DiscreteOperator, b: DiscreteOperator, t: float,
                   rel: float = 1e-10) -> HsSplitReport:
    """Evaluate the split of ``||D_t||_HS`` through ``D_{t/2}``.

    ``D_t = e^{-tB/2} D_{t/2} + D_{t/2} e^{-tA/2}`` bounds the full norm by the
    two half-step products, the positive kernel ordering bounds the A product
    by the B product, and the B product squared is at most
    ``||e^{-tB}||_{L1->Linf} * c2(t/2)^2``.
    """
    _check_pair(a, b, t)
    w = a.cell_volume
    full = semigroup_difference(a, b, t)
    half = semigroup_difference(a, b, t / 2)
    pb = expm_sym(b.eig, t / 2).entries
    pa = expm_sym(a.eig, t / 2).entries
    nb = float(np.linalg.norm(pb @ half.matrix))
    na = float(np.linalg.norm(pa @ half.matrix))
    q2 = l1_linf_norm(expm_sym(b.eig, t).entries, w) * half.c2**2
    ineqs = [
        Inequality("ff1: ||D_t|| <= ||e^{-tB/2}D|| + ||e^{-tA/2}D||", full.c1, nb + na, rel),
        Inequality("ff2: ||e^{-tA/2}D|| <= ||e^{-tB/2}D||", na, nb, rel),
        Inequality("q2: ||e^{-tB/2}D||^2 <= ||e^{-tB}||_{1,inf} c2^2", nb**2, q2, rel),
    ]
    return HsSplitReport(float(t), full.c1, nb, na, q2, ineqs)
