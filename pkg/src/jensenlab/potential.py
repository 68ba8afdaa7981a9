"""Composable analytic potentials and their JSON form.

A potential is a sum of terms. Each term knows its value at points of R^d,
its center, and a length scale; the Monte Carlo proposals in
``conditions`` are built from those hints.

JSON layout::

    {"d": 3, "form": [
        {"kind": "gaussian", "amplitude": -1.0, "center": [0, 0, 0], "width": 1.0},
        {"kind": "power_tail", "amplitude": -1.0, "alpha": 0.75},
        {"kind": "power_singular", "amplitude": -1.0, "beta": 1.5,
         "support": 1.0, "cutoff": null},
        {"kind": "well", "amplitude": -5.0, "radius": 1.0},
        {"kind": "constant", "amplitude": -0.5},
        {"kind": "scaled", "factor": 2.0, "form": [ ... ]}
    ]}

``center`` defaults to the origin and may be given as a scalar.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import ClassVar, Optional

import numpy as np

from .errors import ConfigError, InputError


def _radius(x, center):
    return np.sqrt(np.sum((x - center) ** 2, axis=-1))


@dataclass(frozen=True)
class Term:
    amplitude: float = -1.0
    center: tuple = ()

    kind: ClassVar[str] = "term"
    params: ClassVar[tuple] = ()

    def value(self, x, d, cutoff=None):
        raise NotImplementedError

    def scale(self) -> float:
        return 1.0

    def singular(self) -> list:
        return []

    def tail_exponent(self) -> float:
        return math.inf

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "amplitude": self.amplitude}
        if self.center:
            out["center"] = list(self.center)
        for p in self.params:
            out[p] = getattr(self, p)
        return out


@dataclass(frozen=True)
class Gaussian(Term):
    """``amplitude * exp(-|x - c|^2 / width^2)``."""

    width: float = 1.0
    kind = "gaussian"
    params = ("width",)

    def value(self, x, d, cutoff=None):
        c = _center(self.center, d)
        return self.amplitude * np.exp(-np.sum((x - c) ** 2, axis=-1) / self.width**2)

    def scale(self):
        return self.width


@dataclass(frozen=True)
class PowerTail(Term):
    """``amplitude * (1 + |x - c|)^(-alpha)``."""

    alpha: float = 1.0
    kind = "power_tail"
    params = ("alpha",)

    def value(self, x, d, cutoff=None):
        c = _center(self.center, d)
        return self.amplitude * (1.0 + _radius(x, c)) ** (-self.alpha)

    def tail_exponent(self):
        return self.alpha


@dataclass(frozen=True)
class PowerSingular(Term):
    """``amplitude * |x - c|^(-beta)`` on ``|x - c| <= support``.

    With a cutoff the radius is floored at it, which is how grids sample
    the term; without one the center evaluates to a non-finite value.
    """

    beta: float = 1.0
    support: float = math.inf
    cutoff: Optional[float] = None
    kind = "power_singular"
    params = ("beta", "support", "cutoff")

    def value(self, x, d, cutoff=None):
        c = _center(self.center, d)
        r = _radius(x, c)
        cut = self.cutoff if self.cutoff is not None else cutoff
        with np.errstate(divide="ignore"):
            rr = np.maximum(r, cut) if cut is not None else r
            v = self.amplitude * rr ** (-self.beta)
        return np.where(r <= self.support, v, 0.0)

    def scale(self):
        return min(1.0, self.support)

    def singular(self):
        return [(self.center, self.beta, self.scale())]

    def tail_exponent(self):
        return math.inf if math.isfinite(self.support) else self.beta

    def to_dict(self):
        out = super().to_dict()
        if not math.isfinite(self.support):
            out.pop("support")
        return out


@dataclass(frozen=True)
class Well(Term):
    """``amplitude`` on the closed ball ``|x - c| <= radius``."""

    radius: float = 1.0
    kind = "well"
    params = ("radius",)

    def value(self, x, d, cutoff=None):
        c = _center(self.center, d)
        return np.where(_radius(x, c) <= self.radius, self.amplitude, 0.0)

    def scale(self):
        return self.radius


@dataclass(frozen=True)
class Constant(Term):
    kind = "constant"

    def value(self, x, d, cutoff=None):
        return np.full(np.shape(x)[:-1], float(self.amplitude))

    def tail_exponent(self):
        return 0.0 if self.amplitude != 0 else math.inf

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude}


@dataclass(frozen=True)
class Scaled(Term):
    factor: float = 1.0
    terms: tuple = ()
    kind = "scaled"

    def value(self, x, d, cutoff=None):
        return self.factor * sum((t.value(x, d, cutoff) for t in self.terms),
                                 np.zeros(np.shape(x)[:-1]))

    def singular(self):
        return [s for t in self.terms for s in t.singular()]

    def tail_exponent(self):
        if self.factor == 0:
            return math.inf
        return min((t.tail_exponent() for t in self.terms), default=math.inf)

    def to_dict(self):
        return {"kind": "scaled", "factor": self.factor,
                "form": [t.to_dict() for t in self.terms]}


_KINDS = {cls.kind: cls for cls in (Gaussian, PowerTail, PowerSingular, Well, Constant)}
_ALLOWED = {
    "gaussian": {"amplitude", "center", "width"},
    "power_tail": {"amplitude", "center", "alpha"},
    "power_singular": {"amplitude", "center", "beta", "support", "cutoff"},
    "well": {"amplitude", "center", "radius"},
    "constant": {"amplitude"},
    "scaled": {"factor", "form"},
}


def _center(center, d):
    if not center:
        return np.zeros(d)
    return np.asarray(center, dtype=float)


def _norm_center(c, d):
    if c is None:
        return ()
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.size == 1 and d > 1:
        c = np.full(d, float(c[0]))
    if c.size != d:
        raise ConfigError(f"center has {c.size} components, dimension is {d}")
    if not np.any(c):
        return ()
    return tuple(float(v) for v in c)


def _term_from_dict(obj, d):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"potential term must be an object with 'kind': {obj!r}")
    kind = obj["kind"]
    if kind not in _ALLOWED:
        raise ConfigError(f"unknown potential kind {kind!r}")
    extra = set(obj) - _ALLOWED[kind] - {"kind"}
    if extra:
        raise ConfigError(f"unknown keys for {kind}: {sorted(extra)}")
    if kind == "scaled":
        return Scaled(factor=float(obj.get("factor", 1.0)),
                      terms=tuple(_term_from_dict(t, d) for t in obj.get("form", [])))
    kw = {k: v for k, v in obj.items() if k not in ("kind", "center")}
    for k, v in list(kw.items()):
        if v is None:
            continue
        kw[k] = float(v)
    if kind != "constant":
        kw["center"] = _norm_center(obj.get("center"), d)
    term = _KINDS[kind](**kw)
    _validate_term(term)
    return term


def _validate_term(term):
    if isinstance(term, Gaussian) and not term.width > 0:
        raise ConfigError("gaussian width must be > 0")
    if isinstance(term, Well) and not term.radius > 0:
        raise ConfigError("well radius must be > 0")
    if isinstance(term, PowerTail) and not term.alpha > 0:
        raise ConfigError("power_tail alpha must be > 0")
    if isinstance(term, PowerSingular):
        if not term.beta > 0:
            raise ConfigError("power_singular beta must be > 0")
        if term.cutoff is not None and not term.cutoff > 0:
            raise ConfigError("power_singular cutoff must be > 0")


@dataclass(frozen=True)
class PotentialSpec:
    """A potential ``V`` on R^d as a sum of analytic terms."""

    d: int
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InputError(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "terms", tuple(self.terms))

    # evaluation -----------------------------------------------------------
    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        if x.shape[-1] != self.d:
            raise InputError(f"points have {x.shape[-1]} coordinates, dimension is {self.d}")
        return x

    def __call__(self, x, cutoff=None):
        x = self._points(x)
        out = np.zeros(x.shape[:-1])
        for t in self.terms:
            out = out + t.value(x, self.d, cutoff)
        return out

    def minus(self, x, cutoff=None):
        """``V_- = min(V, 0)``."""
        return np.minimum(self(x, cutoff), 0.0)

    def plus(self, x, cutoff=None):
        return np.maximum(self(x, cutoff), 0.0)

    # hints ----------------------------------------------------------------
    def _flat(self):
        out = []
        stack = list(self.terms)
        while stack:
            t = stack.pop(0)
            if isinstance(t, Scaled):
                if t.factor != 0:
                    stack.extend(t.terms)
            else:
                out.append(t)
        return out

    def is_zero(self) -> bool:
        return all(t.amplitude == 0 for t in self._flat())

    def singular_centers(self):
        """``(center, beta, radius)`` for every declared singularity."""
        return [(np.asarray(_center(c, self.d)), b, r)
                for t in self._flat() for (c, b, r) in t.singular() if t.amplitude != 0]

    def blobs(self):
        """``(center, scale)`` for each localized term (proposal hints)."""
        return [(_center(t.center, self.d), t.scale()) for t in self._flat()
                if not isinstance(t, Constant) and t.amplitude != 0]

    def tail_exponent(self) -> float:
        """Smallest power of decay among the terms (``inf`` if compactly decaying)."""
        return min((t.tail_exponent() for t in self._flat() if t.amplitude != 0),
                   default=math.inf)

    def radial_center(self):
        """Common center if the potential is radial about one point, else None."""
        centers = {tuple(_center(t.center, self.d)) for t in self._flat()
                   if not isinstance(t, Constant) and t.amplitude != 0}
        if len(centers) > 1:
            return None
        return np.asarray(centers.pop()) if centers else np.zeros(self.d)

    # JSON -----------------------------------------------------------------
    def to_dict(self) -> dict:
        return {"d": self.d, "form": [t.to_dict() for t in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj) -> "PotentialSpec":
        if not isinstance(obj, dict):
            raise ConfigError("potential must be a JSON object")
        extra = set(obj) - {"d", "form"}
        if extra:
            raise ConfigError(f"unknown potential keys: {sorted(extra)}")
        if "d" not in obj:
            raise ConfigError("potential.d is required")
        d = obj["d"]
        if not isinstance(d, int) or d < 1:
            raise ConfigError(f"potential.d must be a positive integer, got {d!r}")
        form = obj.get("form", [])
        if not isinstance(form, list):
            raise ConfigError("potential.form must be a list")
        return cls(d, tuple(_term_from_dict(t, d) for t in form))

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        return cls.from_dict(json.loads(text))


# convenience constructors used by tests and the CLI presets
def gaussian_well(d, depth=1.0, width=1.0, center=None):
    return PotentialSpec(d, (Gaussian(-abs(depth), _norm_center(center, d), width),))


def power_tail_well(d, alpha, depth=1.0, center=None):
    return PotentialSpec(d, (PowerTail(-abs(depth), _norm_center(center, d), alpha),))


def square_well(d, depth, radius, center=None):
    return PotentialSpec(d, (Well(-abs(depth), _norm_center(center, d), radius),))


def singular_well(d, beta, depth=1.0, support=1.0, center=None, cutoff=None):
    return PotentialSpec(d, (PowerSingular(-abs(depth), _norm_center(center, d), beta,
                                           support, cutoff),))


def zero(d):
    return PotentialSpec(d, ())
