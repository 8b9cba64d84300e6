"""Canonical inputs with known limits, and the dyadic counterexample set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .domains import FinitePointSet2D, GraphSet
from .engine import Baire1Sequence
from .errors import DomainError

MAX_DYADIC_DEPTH = 20


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    sequence: Baire1Sequence
    # (abscissa on E, limit value, provenance)
    known_values: Tuple[Tuple[float, float, str], ...] = ()
    # abscissae where the limit g jumps
    jumps: Tuple[float, ...] = ()


def pow_limit() -> GalleryEntry:
    """g_n(x) = x^n on [0, 1]: limit 0 on [0, 1), 1 at 1."""

    def stage(ns, t):
        return np.power(float(t), np.asarray(ns, dtype=float))

    def rate(eps, t):
        if t <= 0.0 or t >= 1.0 or eps >= 1.0:
            return 1
        return max(1, math.ceil(math.log(eps) / math.log(t)))

    def tail(m, t):
        if t >= 1.0 or t <= 0.0:
            return 0.0
        return t ** m

    seq = Baire1Sequence(stage, rate=rate, tail=tail,
                         limit=lambda t: 1.0 if t == 1.0 else 0.0, name="pow_limit")
    return GalleryEntry("pow_limit", seq, (
        (0.5, 0.0, "0.5^n -> 0"),
        (1.0, 1.0, "1^n = 1"),
    ), jumps=(1.0,))


def arctan_step(c: float = 0.5) -> GalleryEntry:
    """g_n(x) = (2/pi) arctan(n (x - c)): limit -1 below c, 0 at c, +1 above."""
    c = float(c)
    if not 0.0 < c < 1.0:
        raise DomainError(f"jump location must lie in (0, 1), got {c}")

    def stage(ns, t):
        return (2.0 / math.pi) * np.arctan(np.asarray(ns, dtype=float) * (t - c))

    def tail(m, t):
        # |g_n - g| = (2/pi) arctan(1 / (n |t - c|)), decreasing in n
        d = abs(t - c)
        return 0.0 if d == 0.0 else (2.0 / math.pi) * math.atan(1.0 / (m * d))

    def rate(eps, t):
        d = abs(t - c)
        if d == 0.0 or eps >= 1.0:
            return 1
        return max(1, math.ceil(1.0 / (d * math.tan(math.pi * eps / 2))))

    seq = Baire1Sequence(stage, rate=rate, tail=tail,
                         limit=lambda t: float(np.sign(t - c)), name=f"arctan_step({c})")
    return GalleryEntry(seq.name, seq, (
        (c, 0.0, "odd symmetry at the jump"),
        (min(c + 0.1, 1.0), 1.0, "arctan -> pi/2"),
        (max(c - 0.1, 0.0), -1.0, "arctan -> -pi/2"),
    ), jumps=(c,))


def _constant_sequence(fn: Callable[[float], float], name: str) -> Baire1Sequence:
    return Baire1Sequence(
        lambda ns, t: np.full(np.shape(ns), fn(t), dtype=float),
        rate=lambda eps, t: 1,
        tail=lambda m, t: 0.0,
        limit=fn,
        name=name,
    )


def constant(value: float = 0.0) -> GalleryEntry:
    v = float(value)
    return GalleryEntry(f"constant({v})", _constant_sequence(lambda t: v, f"constant({v})"),
                        ((0.5, v, "constant"),))


def identity() -> GalleryEntry:
    return GalleryEntry("identity", _constant_sequence(lambda t: t, "identity"),
                        ((0.25, 0.25, "g(x) = x"),))


def piecewise_linear(breakpoints: Sequence[Tuple[float, float]]) -> GalleryEntry:
    """Constant sequence of the piecewise-linear interpolant of ``breakpoints``."""
    bps = sorted((float(x), float(y)) for x, y in breakpoints)
    if len(bps) < 2:
        raise DomainError("piecewise-linear g needs at least two breakpoints")
    xs = np.array([b[0] for b in bps])
    if np.any(np.diff(xs) <= 0):
        raise DomainError("breakpoint abscissae must be distinct")
    ys = np.array([b[1] for b in bps])

    def fn(t):
        return float(np.interp(t, xs, ys))

    name = "pl(" + ",".join(f"{x:g}:{y:g}" for x, y in bps) + ")"
    return GalleryEntry(name, _constant_sequence(fn, name),
                        tuple((x, y, "breakpoint") for x, y in bps))


def alternating(amplitude: float = 0.5) -> GalleryEntry:
    """g_n = (-1)^n * amplitude: does not converge anywhere.  Test fixture for
    the non-convergence path; it is not a Baire-one presentation."""
    a = float(amplitude)

    def stage(ns, t):
        return np.where(np.asarray(ns) % 2 == 0, a, -a).astype(float)

    return GalleryEntry("alternating", Baire1Sequence(stage, name="alternating"))


GALLERY: Dict[str, Callable[..., GalleryEntry]] = {
    "pow_limit": pow_limit,
    "arctan_step": arctan_step,
    "constant": constant,
    "identity": identity,
    "piecewise_linear": piecewise_linear,
    "alternating": alternating,
}


def lookup(name: str, **params) -> GalleryEntry:
    try:
        factory = GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown gallery entry {name!r}; known: {sorted(GALLERY)}") from None
    return factory(**params)


# ------------------------------------------------------------ counterexample

@dataclass(frozen=True)
class DyadicCounterexample:
    depth: int
    E1: FinitePointSet2D
    E2: GraphSet

    @property
    def pieces(self) -> list:
        return [self.E2, self.E1]

    def value(self, x: float, y: float) -> float:
        """g = 1 on E1, 0 on the diagonal."""
        if (x, y) in set(self.E1.points):
            return 1.0
        if self.E2.contains(x, y):
            return 0.0
        raise DomainError(f"({x}, {y}) is not in E1 u E2")

    def discontinuity_samples(self) -> List[Tuple[Tuple[float, float], Tuple[float, float]]]:
        """Diagonal points below each E1 point, paired with that point.

        g is 0 at ``(x, x)`` and 1 at ``(x, x + 2^-(n+1))``; deeper levels put
        E1 points ever closer to the diagonal, so these diagonal points are
        where g fails to be continuous.
        """
        return [((x, x), (x, y)) for x, y in self.E1.points]


def dyadic_points(depth: int) -> List[Tuple[float, float]]:
    pts = []
    for n in range(1, depth + 1):
        for k in range(1, 2 ** (n - 1) + 1):
            x = math.ldexp(2 * k - 1, -n)
            pts.append((x, x + math.ldexp(1.0, -(n + 1))))
    return pts


def dyadic_counterexample(depth: int) -> DyadicCounterexample:
    if not 1 <= depth <= MAX_DYADIC_DEPTH:
        raise DomainError(f"depth must be in 1..{MAX_DYADIC_DEPTH}, got {depth}")
    return DyadicCounterexample(depth, FinitePointSet2D(tuple(dyadic_points(depth)),
                                                        tag=f"dyadic<= {depth}"),
                                GraphSet.diagonal())
