"""Dense real-symmetric and complex kernels.

Everything here works on plain numpy arrays. ``SymMatrix`` only adds the
grid cell volume that turns matrix sums into integral analogues.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, InputError, ShapeError, SingularMatrixError

SENTINEL_PIVOT = 1e-300


def _lu(m):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        return sla.lu_factor(m, check_finite=False)


def _finite(a, what="matrix"):
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise InputError(f"{what} has non-finite entries")
    return a


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix plus the cell volume of its grid."""

    entries: np.ndarray
    basis_weight: float = 1.0

    def __post_init__(self):
        a = np.array(self.entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ShapeError(f"need a non-empty square matrix, got shape {a.shape}")
        _finite(a)
        if not self.basis_weight > 0:
            raise InputError("basis_weight must be > 0")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "basis_weight", float(self.basis_weight))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def diag(cls, values, basis_weight=1.0):
        return cls(np.diag(np.asarray(values, dtype=float)), basis_weight)


@dataclass(frozen=True)
class EigenDecomp:
    values: np.ndarray
    vectors: np.ndarray
    basis_weight: float = field(default=1.0)

    def reconstruct(self) -> np.ndarray:
        q = self.vectors
        return (q * self.values) @ q.T


def eigh(m: Union[SymMatrix, np.ndarray]) -> EigenDecomp:
    """Ascending eigendecomposition of a symmetric matrix."""
    if not isinstance(m, SymMatrix):
        m = SymMatrix(m)
    w, q = np.linalg.eigh(m.entries)
    return EigenDecomp(w, q, m.basis_weight)


def expm_sym(m: Union[SymMatrix, EigenDecomp], t: float) -> SymMatrix:
    """``exp(-t m)`` through the eigenbasis; pass an ``EigenDecomp`` to reuse it."""
    if not np.isfinite(t):
        raise InputError("t must be finite")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    ed = m if isinstance(m, EigenDecomp) else eigh(m)
    q = ed.vectors
    return SymMatrix((q * np.exp(-t * ed.values)) @ q.T, ed.basis_weight)


def lu_logdet(m: np.ndarray):
    """Return ``(log|det m|, phase)`` from an LU factorization.

    The log-magnitude is accumulated pivot by pivot. A pivot below
    ``SENTINEL_PIVOT`` gives ``(-inf, 0)``.
    """
    m = np.asarray(m)
    n = m.shape[0]
    lu, piv = _lu(m)
    d = np.diag(lu)
    mags = np.abs(d)
    if np.min(mags) < SENTINEL_PIVOT:
        return -np.inf, 0.0
    swaps = np.count_nonzero(piv != np.arange(n))
    phase = float(np.sum(np.angle(d))) + np.pi * (swaps % 2)
    return float(np.sum(np.log(mags))), phase


def log_det2(T) -> complex:
    """``log Det_2(I - T) = log det(I - T) + tr T``.

    Real part is ``log|Det_2|``; the imaginary part is one branch of the
    argument. Returns ``complex(-inf, 0)`` when ``I - T`` is singular.
    """
    T = _finite(np.asarray(T, dtype=complex), "T")
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ShapeError(f"T must be square, got {T.shape}")
    logabs, phase = lu_logdet(np.eye(T.shape[0]) - T)
    if logabs == -np.inf:
        return complex(-np.inf, 0.0)
    tr = np.trace(T)
    return complex(logabs + tr.real, phase + tr.imag)


def logdet_batch(Ms: np.ndarray):
    """Batched LU log-determinant of a stack ``(K, n, n)``.

    Returns ``(log|det|, unit phase)``; a singular member gives ``-inf`` and a
    zero phase.
    """
    sign, logabs = np.linalg.slogdet(Ms)
    return logabs, sign


def solve_complex(M, rhs) -> np.ndarray:
    """Solve ``M X = rhs`` by LU with partial pivoting."""
    M = _finite(np.asarray(M, dtype=complex), "M")
    rhs = _finite(np.asarray(rhs, dtype=complex), "rhs")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"M must be square, got {M.shape}")
    if rhs.shape[0] != M.shape[0]:
        raise ShapeError(f"rhs has {rhs.shape[0]} rows, M has {M.shape[0]}")
    lu, piv = _lu(M)
    d = np.abs(np.diag(lu))
    scale = max(np.max(np.abs(M)), 1.0)
    bad = np.nonzero(d <= 1e-14 * scale)[0]
    if bad.size:
        raise SingularMatrixError(f"singular matrix: pivot {bad[0]} is {d[bad[0]]:.3e}",
                                  pivot_index=int(bad[0]))
    return sla.lu_solve((lu, piv), rhs, check_finite=False)


def hs_norm(m, weight: float = 1.0) -> float:
    """Weighted Hilbert-Schmidt norm ``weight * sqrt(sum |m_ij|^2)``.

    With ``m`` holding kernel values on a grid of cell volume ``weight`` this
    is the discrete analogue of the kernel double integral.
    """
    if not weight > 0:
        raise InputError("weight must be > 0")
    m = _finite(np.asarray(m))
    return float(weight * np.linalg.norm(m.ravel()))
