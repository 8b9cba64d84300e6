"""Continuous extension from a closed subset of [0, 1] to the whole line.

Across each gap of the domain the extension interpolates linearly between
the two endpoint values; outside the convex hull it is constant.  Both
choices keep the extension inside the hull of the original values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .domains import ClosedLineSet, InGap, InSet, LeftOfSet, RightOfSet, locate
from .errors import DomainError
from .real_fn import RealFunction1D

Value = Union[float, np.ndarray]


@dataclass(frozen=True)
class PartialFunction1D:
    """A continuous function known only on ``domain``."""

    domain: ClosedLineSet
    values: RealFunction1D


def extend_values(domain: ClosedLineSet, values: Callable[[float], Value], x: float) -> Value:
    """Evaluate the linear-gap extension of ``values`` at ``x``.

    ``values`` may return an array (e.g. one entry per stage of a sequence),
    in which case every entry is extended simultaneously.
    """
    loc = locate(x, domain)
    if isinstance(loc, InSet):
        return values(x)
    if isinstance(loc, LeftOfSet):
        return values(loc.min_point)
    if isinstance(loc, RightOfSet):
        return values(loc.max_point)
    a, b = loc.left, loc.right
    ga, gb = values(a), values(b)
    t = (x - a) / (b - a)
    v = (1.0 - t) * ga + t * gb
    # convex combination, but rounding may step outside the hull
    if isinstance(v, np.ndarray):
        return np.clip(v, np.minimum(ga, gb), np.maximum(ga, gb))
    return min(max(v, min(ga, gb)), max(ga, gb))


def extend_linear(g: PartialFunction1D) -> RealFunction1D:
    if g.domain.empty:
        raise DomainError("cannot extend from the empty set")
    dom, ev = g.domain, g.values.evaluator
    return RealFunction1D(
        lambda x: extend_values(dom, ev, x),
        g.values.declared_range,
        name=f"ext({g.values.name})",
    )
