"""Evaluable real functions on the line and the plane.

Values are plain doubles.  Rigor, where it is needed, travels in explicit
radii (:class:`BoundedValue`) instead of exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError

Point2D = Tuple[float, float]
Range = Tuple[float, float]

#: slack allowed on algebraic identities evaluated in double precision
ROUNDING_SLACK = 1e-15


@dataclass(frozen=True)
class BoundedValue:
    """A real number known to lie in ``[center - radius, center + radius]``."""

    center: float
    radius: float

    def __post_init__(self):
        if not self.radius >= 0.0:
            raise DomainError(f"negative or NaN radius {self.radius!r}")

    @property
    def lower(self) -> float:
        return self.center - self.radius

    @property
    def upper(self) -> float:
        return self.center + self.radius

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack


@dataclass(frozen=True)
class RealFunction1D:
    evaluator: Callable[[float], float]
    declared_range: Range
    bound_evaluator: Optional[Callable[[float, int], BoundedValue]] = None
    name: str = ""

    dim = 1

    def __call__(self, x: float) -> float:
        return self.evaluator(x)

    def bounded(self, x: float, level: int = 0) -> BoundedValue:
        if self.bound_evaluator is None:
            return BoundedValue(self.evaluator(x), 0.0)
        return self.bound_evaluator(x, level)


@dataclass(frozen=True)
class RealFunction2D:
    evaluator: Callable[[float, float], float]
    declared_range: Range
    bound_evaluator: Optional[Callable[[float, float, int], BoundedValue]] = None
    name: str = ""

    dim = 2

    def __call__(self, x: float, y: float) -> float:
        return self.evaluator(x, y)

    def bounded(self, x: float, y: float, level: int = 0) -> BoundedValue:
        if self.bound_evaluator is None:
            return BoundedValue(self.evaluator(x, y), 0.0)
        return self.bound_evaluator(x, y, level)


RealFunction = Union[RealFunction1D, RealFunction2D]


def constant(c: float, dim: int = 2) -> RealFunction:
    c = float(c)
    if dim == 1:
        return RealFunction1D(lambda x: c, (c, c), name=f"const({c})")
    return RealFunction2D(lambda x, y: c, (c, c), name=f"const({c})")


def _abs_range(r: Range) -> Range:
    lo, hi = r
    if lo >= 0:
        return (lo, hi)
    if hi <= 0:
        return (-hi, -lo)
    return (0.0, max(-lo, hi))


def _wrap(dim: int, ev, rng: Range, name: str) -> RealFunction:
    if dim == 1:
        return RealFunction1D(ev, rng, name=name)
    return RealFunction2D(ev, rng, name=name)


def combine(op: str, *args: RealFunction, const: Optional[float] = None,
            lo: Optional[float] = None, hi: Optional[float] = None) -> RealFunction:
    """Pointwise algebra on function objects.

    ``op`` is one of ``add, sub, scale, abs, min, max, clamp, half-sum,
    half-diff``.  ``scale`` takes ``const``, ``clamp`` takes ``lo``/``hi``.
    The declared range of the result is obtained by interval arithmetic on
    the argument ranges.

    ``half-sum`` and ``half-diff`` of two one-variable functions produce the
    two-variable function ``(a(x) +- b(y)) / 2``; on equal-dimension 2D
    arguments they act pointwise.
    """
    unary = {"scale", "abs", "clamp"}
    binary = {"add", "sub", "min", "max", "half-sum", "half-diff"}
    if op in unary:
        if len(args) != 1:
            raise DomainError(f"{op} takes one function, got {len(args)}")
        (a,) = args
        ev = a.evaluator
        alo, ahi = a.declared_range
        if op == "scale":
            if const is None:
                raise DomainError("scale needs const")
            k = float(const)
            rng = tuple(sorted((k * alo, k * ahi)))
            if a.dim == 1:
                return RealFunction1D(lambda x: k * ev(x), rng, name=f"{k}*{a.name}")
            return RealFunction2D(lambda x, y: k * ev(x, y), rng, name=f"{k}*{a.name}")
        if op == "abs":
            rng = _abs_range(a.declared_range)
            if a.dim == 1:
                return RealFunction1D(lambda x: abs(ev(x)), rng, name=f"|{a.name}|")
            return RealFunction2D(lambda x, y: abs(ev(x, y)), rng, name=f"|{a.name}|")
        # clamp
        if lo is None or hi is None or lo > hi:
            raise DomainError(f"clamp needs lo <= hi, got {lo!r}, {hi!r}")
        lo_, hi_ = float(lo), float(hi)
        rng = (min(max(alo, lo_), hi_), min(max(ahi, lo_), hi_))
        if a.dim == 1:
            return RealFunction1D(lambda x: min(max(ev(x), lo_), hi_), rng,
                                  name=f"clamp({a.name})")
        return RealFunction2D(lambda x, y: min(max(ev(x, y), lo_), hi_), rng,
                              name=f"clamp({a.name})")

    if op not in binary:
        raise DomainError(f"unknown op-tag {op!r}")
    if len(args) != 2:
        raise DomainError(f"{op} takes two functions, got {len(args)}")
    a, b = args
    (alo, ahi), (blo, bhi) = a.declared_range, b.declared_range

    if op in ("half-sum", "half-diff") and a.dim == 1 and b.dim == 1:
        ea, eb = a.evaluator, b.evaluator
        if op == "half-sum":
            return RealFunction2D(lambda x, y: (ea(x) + eb(y)) / 2,
                                  ((alo + blo) / 2, (ahi + bhi) / 2),
                                  name=f"({a.name}+{b.name})/2")
        return RealFunction2D(lambda x, y: (ea(x) - eb(y)) / 2,
                              ((alo - bhi) / 2, (ahi - blo) / 2),
                              name=f"({a.name}-{b.name})/2")

    if a.dim != b.dim:
        raise DomainError(f"{op}: mismatched dimensions {a.dim} and {b.dim}")

    table = {
        "add": (lambda u, v: u + v, (alo + blo, ahi + bhi)),
        "sub": (lambda u, v: u - v, (alo - bhi, ahi - blo)),
        "min": (min, (min(alo, blo), min(ahi, bhi))),
        "max": (max, (max(alo, blo), max(ahi, bhi))),
        "half-sum": (lambda u, v: (u + v) / 2, ((alo + blo) / 2, (ahi + bhi) / 2)),
        "half-diff": (lambda u, v: (u - v) / 2, ((alo - bhi) / 2, (ahi - blo) / 2)),
    }
    fn, rng = table[op]
    ea, eb = a.evaluator, b.evaluator
    if a.dim == 1:
        return RealFunction1D(lambda x: fn(ea(x), eb(x)), rng, name=f"{op}({a.name},{b.name})")
    return RealFunction2D(lambda x, y: fn(ea(x, y), eb(x, y)), rng,
                          name=f"{op}({a.name},{b.name})")


def geometric_tail_sum(values: Sequence[float], n_terms: int) -> BoundedValue:
    """Bound ``sum_{n>=1} 2^-n min(1, |v_n|)`` from the first ``n_terms`` values.

    ``values[0]`` is the term of index 1.  The unseen tail is majorised by
    ``sum_{n>N} 2^-n = 2^-N``.
    """
    if n_terms < 1:
        raise DomainError(f"truncation N must be >= 1, got {n_terms}")
    if len(values) < n_terms:
        raise DomainError(f"need {n_terms} term values, got {len(values)}")
    center = 0.0
    w = 1.0
    for n in range(n_terms):
        w *= 0.5
        center += w * min(1.0, abs(float(values[n])))
    return BoundedValue(center, math.ldexp(1.0, -n_terms))


def weighted_tail_series(terms: Callable[[int], RealFunction2D], p: Point2D,
                         N: int) -> BoundedValue:
    """Truncated ``sum 2^-n min(1, |term_n(p)|)`` with its exact tail radius."""
    if N < 1:
        raise DomainError(f"truncation N must be >= 1, got {N}")
    x, y = p
    return geometric_tail_sum([terms(n)(x, y) for n in range(1, N + 1)], N)


def sample_grid(f: RealFunction2D, rect: Tuple[float, float, float, float],
                resolution: int) -> np.ndarray:
    """Values of ``f`` on the uniform ``resolution x resolution`` grid of ``rect``.

    ``rect = (x0, x1, y0, y1)``; entry ``[i, j]`` is ``f(xs[i], ys[j])`` with
    both endpoint rows included.
    """
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")
    x0, x1, y0, y1 = map(float, rect)
    if not (x1 > x0 and y1 > y0):
        raise DomainError(f"degenerate rectangle {rect}")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    out = np.empty((resolution, resolution))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            out[i, j] = f(float(x), float(y))
    return out
