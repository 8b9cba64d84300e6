"""Closed subsets of [0, 1], monotone homeomorphisms and graph sets.

Everything here is exact for the representations used: finite unions of
closed intervals (points allowed) and strictly monotone piecewise-linear
maps between them.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, PreconditionViolation

COORD_TOL = 1e-12

Interval = Tuple[float, float]
Point2D = Tuple[float, float]


# ---------------------------------------------------------------- line sets

@dataclass(frozen=True)
class InSet:
    pass


@dataclass(frozen=True)
class InGap:
    left: float
    right: float


@dataclass(frozen=True)
class LeftOfSet:
    min_point: float


@dataclass(frozen=True)
class RightOfSet:
    max_point: float


Location = Union[InSet, InGap, LeftOfSet, RightOfSet]


@dataclass(frozen=True)
class ClosedLineSet:
    """Finite union of disjoint closed intervals in [0, 1], sorted."""

    components: Tuple[Interval, ...]
    tag: Optional[str] = None

    def __post_init__(self):
        comps = tuple((float(a), float(b)) for a, b in self.components)
        object.__setattr__(self, "components", comps)
        prev_b = -math.inf
        for a, b in comps:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise DomainError(f"non-finite component [{a}, {b}]")
            if a > b:
                raise DomainError(f"component [{a}, {b}] has a > b")
            if a < 0.0 or b > 1.0:
                raise DomainError(f"component [{a}, {b}] leaves [0, 1]")
            if a <= prev_b:
                raise DomainError("components must be sorted and pairwise disjoint")
            prev_b = b
        object.__setattr__(self, "_lefts", [a for a, _ in comps])

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0) -> "ClosedLineSet":
        return cls(((a, b),))

    @classmethod
    def from_pieces(cls, pieces: Iterable[Interval], tag: Optional[str] = None) -> "ClosedLineSet":
        """Sort and merge overlapping or touching pieces."""
        merged: List[List[float]] = []
        for a, b in sorted((float(a), float(b)) for a, b in pieces):
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged), tag=tag)

    @property
    def empty(self) -> bool:
        return not self.components

    @property
    def lo(self) -> float:
        return self.components[0][0]

    @property
    def hi(self) -> float:
        return self.components[-1][1]

    def _index(self, x: float) -> int:
        # index of last component with a <= x, or -1
        return bisect.bisect_right(self._lefts, x) - 1

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.distance(x) <= tol

    def distance(self, x: float) -> float:
        if self.empty:
            raise DomainError("distance to the empty set")
        i = self._index(x)
        best = math.inf
        if i >= 0:
            a, b = self.components[i]
            if x <= b:
                return 0.0
            best = x - b
        if i + 1 < len(self.components):
            best = min(best, self.components[i + 1][0] - x)
        return best

    def nearest(self, x: float) -> float:
        """The point of the set closest to ``x`` (left one on ties)."""
        if self.empty:
            raise DomainError("nearest point of the empty set")
        i = self._index(x)
        cands = []
        if i >= 0:
            a, b = self.components[i]
            if x <= b:
                return x
            cands.append(b)
        if i + 1 < len(self.components):
            cands.append(self.components[i + 1][0])
        return min(cands, key=lambda c: abs(c - x))

    def total_length(self) -> float:
        return sum(b - a for a, b in self.components)

    def intersect(self, a: float, b: float) -> "ClosedLineSet":
        pieces = []
        for ca, cb in self.components:
            lo, hi = max(ca, a), min(cb, b)
            if lo <= hi:
                pieces.append((lo, hi))
        return ClosedLineSet(tuple(pieces), tag=self.tag)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` points of the set.  Interval parts are sampled uniformly by
        length; isolated points receive an equal share when the set has no
        length at all."""
        if self.empty:
            raise DomainError("cannot sample the empty set")
        lengths = np.array([b - a for a, b in self.components])
        if lengths.sum() > 0:
            probs = lengths / lengths.sum()
        else:
            probs = np.full(len(lengths), 1.0 / len(lengths))
        idx = rng.choice(len(self.components), size=n, p=probs)
        u = rng.random(n)
        lefts = np.array([a for a, _ in self.components])
        return lefts[idx] + u * lengths[idx]

    def grid(self, n: int) -> np.ndarray:
        """Deterministic spread of ``n`` points, endpoints of every component included."""
        pts = set()
        for a, b in self.components:
            pts.add(a)
            pts.add(b)
        L = self.total_length()
        if L > 0:
            for a, b in self.components:
                k = max(2, int(round(n * (b - a) / L)))
                pts.update(np.linspace(a, b, k).tolist())
        return np.array(sorted(pts))


def locate(x: float, A: ClosedLineSet) -> Location:
    """Where ``x`` sits relative to the interval-union ``A``."""
    if A.empty:
        raise DomainError("locate on the empty set")
    if x < A.lo:
        return LeftOfSet(A.lo)
    if x > A.hi:
        return RightOfSet(A.hi)
    i = A._index(x)
    a, b = A.components[i]
    if x <= b:
        return InSet()
    return InGap(b, A.components[i + 1][0])


# ------------------------------------------------------------ homeomorphisms

@dataclass(frozen=True)
class Homeomorphism1D:
    """Strictly monotone piecewise-linear map through ``breakpoints``.

    Outside the first/last breakpoint the end segments are continued
    linearly so that the map stays a homeomorphism of the line.
    """

    breakpoints: Tuple[Point2D, ...]

    def __post_init__(self):
        bps = tuple((float(x), float(y)) for x, y in self.breakpoints)
        if not bps:
            raise DomainError("homeomorphism needs at least one breakpoint")
        xs = np.array([b[0] for b in bps])
        ys = np.array([b[1] for b in bps])
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ys)):
            raise DomainError("non-finite breakpoint")
        if len(bps) > 1:
            if not np.all(np.diff(xs) > 0):
                raise DomainError("breakpoint x-coordinates must be strictly increasing")
            dy = np.diff(ys)
            if not (np.all(dy > 0) or np.all(dy < 0)):
                raise DomainError("breakpoints are not strictly monotone")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)

    @classmethod
    def identity(cls) -> "Homeomorphism1D":
        return cls(((0.0, 0.0), (1.0, 1.0)))

    @property
    def direction(self) -> str:
        if len(self.breakpoints) == 1 or self._ys[1] > self._ys[0]:
            return "increasing"
        return "decreasing"

    @staticmethod
    def _pl(x: float, xs: np.ndarray, ys: np.ndarray) -> float:
        # xs strictly increasing
        if len(xs) == 1:
            return float(ys[0] + (x - xs[0]))
        if x <= xs[0]:
            i = 0
        elif x >= xs[-1]:
            i = len(xs) - 2
        else:
            i = int(np.searchsorted(xs, x, side="right")) - 1
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        if x == x0:
            return float(y0)
        if x == x1:
            return float(y1)
        t = (x - x0) / (x1 - x0)
        return float(y0 + t * (y1 - y0))

    def __call__(self, x: float) -> float:
        return self._pl(x, self._xs, self._ys)

    def inverse(self, y: float) -> float:
        if self.direction == "increasing":
            return self._pl(y, self._ys, self._xs)
        return self._pl(y, self._ys[::-1], self._xs[::-1])

    def knots_in(self, a: float, b: float) -> List[float]:
        """Breakpoint abscissae strictly inside (a, b)."""
        return [float(x) for x in self._xs if a < x < b]


# ---------------------------------------------------------------- 2D sets

@dataclass(frozen=True)
class GraphSet:
    """``E = {(x, e(x)) : x in base}``."""

    base: ClosedLineSet
    map: Homeomorphism1D

    def __post_init__(self):
        if self.base.empty:
            raise DomainError("graph over the empty set")
        img = []
        for a, b in self.base.components:
            ya, yb = self.map(a), self.map(b)
            img.append((min(ya, yb), max(ya, yb)))
        for lo, hi in img:
            if lo < -COORD_TOL or hi > 1 + COORD_TOL:
                raise DomainError("graph leaves the unit square")
        img = [(min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0)) for lo, hi in img]
        object.__setattr__(self, "_image", ClosedLineSet.from_pieces(img))

    @classmethod
    def diagonal(cls, a: float = 0.0, b: float = 1.0) -> "GraphSet":
        return cls(ClosedLineSet.interval(a, b), Homeomorphism1D.identity())

    @property
    def image(self) -> ClosedLineSet:
        """The projection ``Y1 = e(X1)``."""
        return self._image

    def point(self, x: float) -> Point2D:
        return (x, self.map(x))

    def contains(self, x: float, y: float, tol: float = COORD_TOL) -> bool:
        return self.base.contains(x) and abs(y - self.map(x)) <= tol

    def segments(self) -> List[Tuple[Point2D, Point2D]]:
        segs = []
        for a, b in self.base.components:
            xs = [a] + self.map.knots_in(a, b) + [b]
            if a == b:
                segs.append((self.point(a), self.point(a)))
                continue
            for u, v in zip(xs[:-1], xs[1:]):
                segs.append((self.point(u), self.point(v)))
        return segs

    def distance(self, x: float, y: float) -> float:
        """Euclidean distance from ``(x, y)`` to ``E``."""
        best = math.inf
        for (ax, ay), (bx, by) in self.segments():
            dx, dy = bx - ax, by - ay
            L2 = dx * dx + dy * dy
            t = 0.0 if L2 == 0 else min(1.0, max(0.0, ((x - ax) * dx + (y - ay) * dy) / L2))
            best = min(best, math.hypot(x - (ax + t * dx), y - (ay + t * dy)))
        return best

    def restrict(self, x0: float, x1: float, y0: float, y1: float) -> Optional["GraphSet"]:
        """``E`` intersected with the closed rectangle, or None if empty."""
        lo, hi = sorted((self.map.inverse(y0), self.map.inverse(y1)))
        base = self.base.intersect(max(x0, lo), min(x1, hi))
        if base.empty:
            return None
        return GraphSet(base, self.map)


@dataclass(frozen=True)
class FinitePointSet2D:
    points: Tuple[Point2D, ...]
    tag: Optional[str] = None

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(set(pts)) != len(pts):
            raise DomainError("duplicate points")
        object.__setattr__(self, "points", pts)


Piece = Union[GraphSet, FinitePointSet2D]


@dataclass(frozen=True)
class OK:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class Violation:
    axis: str  # "vertical" (same x) or "horizontal" (same y)
    value: float
    witnesses: Tuple[Point2D, Point2D]

    def __bool__(self):
        return False

    def __str__(self):
        (ax, ay), (bx, by) = self.witnesses
        coord = "x" if self.axis == "vertical" else "y"
        return (f"Violation({self.axis}, {coord}={self.value!r}, "
                f"({ax!r}, {ay!r}), ({bx!r}, {by!r}))")


def _graph_vs_point(E: GraphSet, p: Point2D, tol: float) -> Optional[Violation]:
    px, py = p
    if E.base.contains(px, tol):
        q = E.point(E.base.nearest(px))
        if abs(q[1] - py) > tol:
            return Violation("vertical", px, (q, p))
    if E.image.contains(py, tol):
        qx = E.map.inverse(py)
        if abs(qx - px) > tol:
            return Violation("horizontal", py, ((qx, py), p))
    return None


def _graph_vs_graph(E1: GraphSet, E2: GraphSet, tol: float) -> Optional[Violation]:
    for (a1, b1) in E1.base.components:
        for (a2, b2) in E2.base.components:
            lo, hi = max(a1, a2), min(b1, b2)
            if lo > hi + tol:
                continue
            hi = max(lo, hi)
            xs = sorted({lo, hi} | set(E1.map.knots_in(lo, hi))
                        | set(E2.map.knots_in(lo, hi)))
            for x in xs:
                y1, y2 = E1.map(x), E2.map(x)
                if abs(y1 - y2) > tol:
                    return Violation("vertical", x, ((x, y1), (x, y2)))
    # horizontal lines: compare inverses over the common image
    for (a1, b1) in E1.image.components:
        for (a2, b2) in E2.image.components:
            lo, hi = max(a1, a2), min(b1, b2)
            if lo > hi + tol:
                continue
            for y in (lo, (lo + hi) / 2, hi):
                x1, x2 = E1.map.inverse(y), E2.map.inverse(y)
                if abs(x1 - x2) > tol:
                    return Violation("horizontal", y, ((x1, y), (x2, y)))
    return None


def validate_onepointed(S: Sequence[Piece], tol: float = COORD_TOL) -> Union[OK, Violation]:
    """Check that every vertical and horizontal line meets ``S`` at most once.

    A single monotone graph is one-pointed by construction, so graphs are
    only compared against the other pieces; finite point sets are compared
    pairwise.  The first violation found is returned with two witnesses.
    """
    graphs = [s for s in S if isinstance(s, GraphSet)]
    points: List[Point2D] = []
    for s in S:
        if isinstance(s, FinitePointSet2D):
            points.extend(s.points)
        elif not isinstance(s, GraphSet):
            raise DomainError(f"unsupported piece {type(s).__name__}")

    for i, E1 in enumerate(graphs):
        for E2 in graphs[i + 1:]:
            v = _graph_vs_graph(E1, E2, tol)
            if v is not None:
                return v
    for p in points:
        for E in graphs:
            v = _graph_vs_point(E, p, tol)
            if v is not None:
                return v
    # distinct isolated points sharing a coordinate; duplicates of graph
    # points were accepted above and are harmless here
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            if abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) > tol:
                return Violation("vertical", p[0], tuple(sorted((p, q))))
            if abs(p[1] - q[1]) <= tol and abs(p[0] - q[0]) > tol:
                return Violation("horizontal", p[1], tuple(sorted((p, q))))
    return OK()


def graph_from_onepointed(S: Sequence[Piece], tol: float = COORD_TOL
                          ) -> Tuple[ClosedLineSet, Homeomorphism1D]:
    """Recover ``(X1, e)`` with graph ``S`` from a one-pointed union of pieces.

    Raises :class:`PreconditionViolation` with the witness when ``S`` is not
    one-pointed and :class:`DomainError` when the pieces do not assemble into
    a single monotone map.
    """
    verdict = validate_onepointed(S, tol)
    if isinstance(verdict, Violation):
        raise PreconditionViolation(verdict)
    comps: List[Interval] = []
    knots = {}
    for s in S:
        if isinstance(s, GraphSet):
            for a, b in s.base.components:
                comps.append((a, b))
                for x in [a, b] + s.map.knots_in(a, b):
                    knots[x] = s.map(x)
        else:
            for x, y in s.points:
                comps.append((x, x))
                knots[x] = y
    base = ClosedLineSet.from_pieces(comps)
    bps = tuple(sorted(knots.items()))
    # drop knots duplicated within tolerance
    dedup = [bps[0]]
    for x, y in bps[1:]:
        if x - dedup[-1][0] > tol:
            dedup.append((x, y))
    try:
        e = Homeomorphism1D(tuple(dedup))
    except DomainError as exc:
        raise DomainError(f"pieces do not form one monotone graph: {exc}") from exc
    return base, e


# ------------------------------------------------------------ text format
#
# Sets are described in config files as comma-separated items:
#   intervals    "0..0.25, 0.75..1"   (a bare number is a one-point component)
#   breakpoints  "0:1, 1:0"           (x:e(x) knots of a monotone map)

def parse_intervals(text: str, tag: Optional[str] = None) -> ClosedLineSet:
    pieces = []
    for item in _items(text):
        if ".." in item:
            a, b = item.split("..", 1)
            pieces.append((_num(a), _num(b)))
        else:
            v = _num(item)
            pieces.append((v, v))
    if not pieces:
        raise DomainError(f"no intervals in {text!r}")
    return ClosedLineSet.from_pieces(pieces, tag=tag)


def parse_breakpoints(text: str) -> List[Tuple[float, float]]:
    out = []
    for item in _items(text):
        if ":" not in item:
            raise DomainError(f"breakpoint {item!r} is not of the form x:y")
        a, b = item.split(":", 1)
        out.append((_num(a), _num(b)))
    if not out:
        raise DomainError(f"no breakpoints in {text!r}")
    return out


def format_intervals(A: ClosedLineSet) -> str:
    return ", ".join(f"{a!r}" if a == b else f"{a!r}..{b!r}" for a, b in A.components)


def _items(text: str) -> List[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _num(s: str) -> float:
    try:
        v = float(s.strip())
    except ValueError:
        raise DomainError(f"not a number: {s!r}") from None
    if not math.isfinite(v):
        raise DomainError(f"not a finite number: {s!r}")
    return v
