"""Small record types for inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CheckFailed


@dataclass(frozen=True)
class Inequality:
    """``lhs <= rhs + slack`` with ``slack = rel * max(1, |rhs|)``."""

    label: str
    lhs: float
    rhs: float
    rel: float = 1e-9

    @property
    def slack(self) -> float:
        return self.rel * max(1.0, abs(self.rhs)) if math.isfinite(self.rhs) else 0.0

    @property
    def holds(self) -> bool:
        if self.lhs == -math.inf:
            return True
        return self.lhs <= self.rhs + self.slack

    @property
    def ratio(self) -> float:
        """``lhs / rhs`` (diagnostic tightness)."""
        if self.rhs == 0:
            return 0.0 if self.lhs <= 0 else math.inf
        return self.lhs / self.rhs

    def to_dict(self):
        return {"label": self.label, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def require(inequalities):
    """Raise ``CheckFailed`` naming the first violated inequality."""
    for q in inequalities:
        if not q.holds:
            raise CheckFailed(f"{q.label} violated: {q.lhs!r} > {q.rhs!r}")
    return True
