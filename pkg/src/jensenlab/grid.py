"""Discrete Schrodinger operators on uniform grids in dimensions 1-3.

Nodes are ``x_j = -L + j h``. Dirichlet grids include both end nodes and
treat values beyond them as zero (``h = 2L/(p-1)``); periodic grids wrap
(``h = 2L/p``). Multi-dimensional operators are Kronecker sums of the 1-D
stencils with C-ordered (``indexing="ij"``) node numbering, so a vector
reshaped to ``(p,) * d`` lines up with ``numpy.fft.fftn``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import CheckFailed, InputError, SamplingError, ShapeError, SizeError
from .linalg import SymMatrix, eigh
from .potential import PotentialSpec

MAX_UNKNOWNS = 4096
NEGATIVE_THRESHOLD = -1e-12


@dataclass(frozen=True)
class GridSpec:
    d: int
    L: float
    points_per_axis: int
    boundary: str = "dirichlet"
    allow_large: bool = False

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise InputError(f"grid dimension must be 1, 2 or 3, got {self.d}")
        if not self.L > 0:
            raise InputError("L must be > 0")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 3:
            raise InputError("points_per_axis must be an integer >= 3")
        if self.boundary not in ("dirichlet", "periodic"):
            raise InputError(f"unknown boundary {self.boundary!r}")
        if self.unknowns > MAX_UNKNOWNS and not self.allow_large:
            raise SizeError(f"{self.unknowns} unknowns exceeds the desk-scale limit "
                            f"{MAX_UNKNOWNS}; set allow_large to override")

    @property
    def unknowns(self) -> int:
        return int(self.points_per_axis) ** self.d

    @property
    def h(self) -> float:
        p = self.points_per_axis
        return 2 * self.L / (p if self.boundary == "periodic" else p - 1)

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    @property
    def shape(self):
        return (self.points_per_axis,) * self.d

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.points_per_axis)

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``(unknowns, d)``."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class DiscreteOperator:
    grid: GridSpec
    matrix: SymMatrix
    kind: str = "free"
    potential: Optional[PotentialSpec] = None
    diagonal_potential: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def cell_volume(self) -> float:
        return self.matrix.basis_weight

    @cached_property
    def eig(self):
        return eigh(self.matrix)

    @property
    def periodic(self) -> bool:
        return self.grid is not None and self.grid.boundary == "periodic"


def _laplacian_1d(p, h, periodic):
    m = 2 * np.eye(p) - np.eye(p, k=1) - np.eye(p, k=-1)
    if periodic:
        m[0, -1] -= 1
        m[-1, 0] -= 1
    return m / h**2


def build_laplacian(grid: GridSpec) -> DiscreteOperator:
    """Second-order ``(2d+1)``-point stencil for ``-Delta``."""
    p = grid.points_per_axis
    one = _laplacian_1d(p, grid.h, grid.boundary == "periodic")
    eye = np.eye(p)
    total = np.zeros((grid.unknowns, grid.unknowns))
    for axis in range(grid.d):
        term = np.ones((1, 1))
        for k in range(grid.d):
            term = np.kron(term, one if k == axis else eye)
        total += term
    return DiscreteOperator(grid, SymMatrix(total, grid.cell_volume), "free")


def sample_potential(grid: GridSpec, v: PotentialSpec, cutoff=None) -> np.ndarray:
    """Potential values at the nodes; declared singularities are floored at ``cutoff``."""
    if v.d != grid.d:
        raise ShapeError(f"potential dimension {v.d} does not match grid dimension {grid.d}")
    x = grid.nodes()
    vals = v(x, cutoff=grid.h / 2 if cutoff is None else cutoff)
    bad = np.nonzero(~np.isfinite(vals))[0]
    if bad.size:
        i = int(bad[0])
        raise SamplingError(f"potential is not finite at node {i} (x = {x[i].tolist()})")
    return vals


def assemble(grid: GridSpec, v: PotentialSpec, part: str = "minus_only",
             cutoff=None) -> DiscreteOperator:
    """``-Delta_h + diag(V_-)`` (``minus_only``) or ``-Delta_h + diag(V)`` (``full``)."""
    if part not in ("minus_only", "full"):
        raise InputError(f"part must be 'minus_only' or 'full', got {part!r}")
    vals = sample_potential(grid, v, cutoff)
    if part == "minus_only":
        vals = np.minimum(vals, 0.0)
    lap = build_laplacian(grid)
    m = lap.entries + np.diag(vals)
    return DiscreteOperator(grid, SymMatrix(m, grid.cell_volume), "with_potential", v, vals)


def from_matrix(m, basis_weight=1.0, kind="with_potential") -> DiscreteOperator:
    """Wrap a raw symmetric matrix (toy problems, random instances)."""
    return DiscreteOperator(None, SymMatrix(m, basis_weight), kind)


def negative_eigenvalues(op, threshold=NEGATIVE_THRESHOLD) -> np.ndarray:
    m = op.matrix if isinstance(op, DiscreteOperator) else op
    w = eigh(m).values
    return w[w < threshold]


def direct_negative_sum(op, threshold=NEGATIVE_THRESHOLD) -> float:
    """``sum |lambda|`` over eigenvalues below ``threshold`` by dense diagonalization."""
    return float(-np.sum(negative_eigenvalues(op, threshold)))


def minmax_check(grid: GridSpec, v: PotentialSpec, cutoff=None):
    """``(sum for -Delta+V, sum for -Delta+V_-)``; the first never exceeds the second."""
    full = direct_negative_sum(assemble(grid, v, "full", cutoff))
    minus = direct_negative_sum(assemble(grid, v, "minus_only", cutoff))
    if full > minus + 1e-10:
        raise CheckFailed(f"min-max ordering violated: {full} > {minus}")
    return full, minus
