"""Assembly of a separately continuous f with prescribed values on a graph set.

Pipeline: clamp the stages g_n to [-n, n], turn each into a pair
(f_n, h_n), build a gauge D1 for the hull F1, assemble h0 whose zero set
is ``F = F1 cap (cap_n h_n^-1(0))``, and evaluate

    f(p) = sum_n phi_n(p) f_n(p)   on G = complement of F  (f_0 = 0)
    f(p) = lim_n f_n(p)            on F.

Evaluation near F
-----------------
Points where h0 cannot be certified positive, or whose active band lies
beyond ``policy.max_index``, are evaluated through the estimate that makes
f separately continuous.  Once the band search shows ``M_n < 1/n`` for all
n below some K, every active index is at least ``m = K - 1``.  Then, with
``tail(m)`` bounding ``sup_{n >= m} |f_n - lim f_n|``:

* ``f(p)`` lies in the hull of ``{f_n(p) : n >= m}``, so
  ``|f(p) - lim f_n(p)| <= tail_p(m)``;
* for q on E in the same row or column as p, ``|f_n(p) - f_n(q)| = |h_n(p)| < 1/n``
  on every active index, so ``|f(p) - g(q)| <= tail_q(m) + 1/m``.

The candidate with the smaller bound is used and the bound is reported.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .domains import (ClosedLineSet, GraphSet, InGap, InSet, LeftOfSet, RightOfSet,
                      locate)
from .errors import CoverError, DomainError, NonConvergence
from .pair_builder import PairFH, PairSequence
from .pou import (LazyPartitionOfUnity, PrecisionPolicy, VanishingSequence,
                  index_bound_from_lower)
from .real_fn import (ROUNDING_SLACK, BoundedValue, RealFunction2D)

Point2D = Tuple[float, float]

MAX_STAGE = 2 ** 62
PSEUDOCOMPACT_TERMS = 30
PSEUDOCOMPACT_SAMPLES = 64


# ------------------------------------------------------------ sequences

@dataclass(frozen=True)
class Baire1Sequence:
    """Approximants g_n on E, parametrised by the abscissa t of ``(t, e(t))``.

    ``stage(ns, t)`` evaluates g_n(t) for an integer array ``ns``.  ``rate(eps, t)``
    (optional) returns N such that ``|g_n(t) - g(t)| <= eps`` for n >= N;
    ``tail(m, t)`` (optional) bounds ``sup_{n >= m} |g_n(t) - g(t)|``.
    """

    stage: Callable[[np.ndarray, float], np.ndarray]
    rate: Optional[Callable[[float, float], int]] = None
    tail: Optional[Callable[[int, float], float]] = None
    limit: Optional[Callable[[float], float]] = None
    name: str = "sequence"

    def clamped(self, ns: np.ndarray, t: float) -> np.ndarray:
        ns = np.asarray(ns)
        vals = np.asarray(self.stage(ns, t), dtype=float)
        return np.clip(vals, -ns, ns)

    def approximant(self, n: int) -> RealFunction2D:
        arr = np.array([n])
        return RealFunction2D(lambda x, y: float(self.clamped(arr, x)[0]), (-n, n),
                              name=f"{self.name}_{n}")

    @property
    def rigorous(self) -> bool:
        return self.rate is not None

    def stages_for(self, eps: float, t: float) -> int:
        return int(min(max(1, self.rate(eps, t)), MAX_STAGE))

    def tail_bound(self, m: int, t: float) -> float:
        if self.tail is not None:
            return float(self.tail(m, t))
        if self.rate is None:
            return math.inf
        # smallest eps on a log grid whose stage count is already reached
        lo, hi = -60.0, 1.0
        if self.rate(10.0 ** hi, t) > m:
            return math.inf
        for _ in range(60):
            mid = (lo + hi) / 2
            if self.rate(10.0 ** mid, t) <= m:
                hi = mid
            else:
                lo = mid
        # outward rounding: floating-point rate oracles may undershoot slightly
        return 10.0 ** hi * (1 + 1e-9)


class CaseTag(enum.Enum):
    PseudocompactE = "PseudocompactE"
    FunctionallyClosedE = "FunctionallyClosedE"
    FunctionallyClosedX1 = "FunctionallyClosedX1"
    FunctionallyClosedY1 = "FunctionallyClosedY1"


# ------------------------------------------------------------ F1 and h0

@dataclass(frozen=True)
class F1Descriptor:
    """Nonnegative gauge D1 whose zero set is the hull F1 (up to ``radius``)."""

    case: CaseTag
    gauge: Callable[[float, float], float]
    radius: float = 0.0

    def __call__(self, x: float, y: float) -> float:
        return self.gauge(x, y)


def _truncated_metric(u: np.ndarray, v: np.ndarray) -> float:
    w = np.ldexp(1.0, -np.arange(1, len(u) + 1))
    return float(np.dot(w, np.minimum(1.0, np.abs(u - v))))


def build_F1(case: CaseTag, E: GraphSet, pairs: PairSequence,
             n_terms: int = PSEUDOCOMPACT_TERMS,
             n_samples: int = PSEUDOCOMPACT_SAMPLES) -> F1Descriptor:
    case = CaseTag(case)
    if case is CaseTag.FunctionallyClosedX1:
        X1 = E.base
        return F1Descriptor(case, lambda x, y: X1.distance(x))
    if case is CaseTag.FunctionallyClosedY1:
        Y1 = E.image
        return F1Descriptor(case, lambda x, y: Y1.distance(y))
    if case is CaseTag.FunctionallyClosedE:
        return F1Descriptor(case, lambda x, y: E.distance(x, y))

    # pseudocompact E: distance from the stage vector at p to the image of E
    # under p -> (f_n(p))_n, metric sum 2^-n min(1, |u_n - v_n|)
    ns = np.arange(1, n_terms + 1)
    grid = E.base.grid(n_samples)
    spacing = E.base.total_length() / max(1, n_samples)

    @lru_cache(maxsize=4096)
    def image(t: float) -> np.ndarray:
        return pairs.stack(t, E.map(t), ns)[0]

    def gauge(x: float, y: float) -> float:
        u = pairs.stack(x, y, ns)[0]
        cands = set(grid.tolist())
        if E.base.contains(x):
            cands.add(x)
        if E.image.contains(y):
            cands.add(min(max(E.map.inverse(y), E.base.lo), E.base.hi))
        best_t, best = None, math.inf
        for t in cands:
            d = _truncated_metric(u, image(t))
            if d < best:
                best_t, best = t, d
        if best > 0 and spacing > 0:
            lo, hi = best_t - spacing, best_t + spacing
            res = minimize_scalar(
                lambda t: _truncated_metric(u, image(E.base.nearest(float(t)))),
                bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
            best = min(best, float(res.fun))
        return best

    return F1Descriptor(case, gauge, radius=math.ldexp(1.0, -n_terms))


def build_h0(F1: F1Descriptor, pairs: PairSequence, max_terms: int = 120) -> RealFunction2D:
    """``h0 = min(1, D1)/2 + sum_{n>=1} 2^-(n+1) min(1, |h_n|)`` with rigorous radius.

    The bound evaluator's level is the number of series terms N; the radius
    is the geometric tail ``2^-(N+1)`` plus half the gauge radius plus
    rounding slack.
    """

    def bounded(x: float, y: float, N: int) -> BoundedValue:
        ns = np.arange(1, N + 1)
        hs = pairs.stack(x, y, ns)[1]
        series = _truncated_metric(hs, np.zeros_like(hs))
        center = min(1.0, F1(x, y)) / 2 + series / 2
        radius = math.ldexp(1.0, -(N + 1)) + F1.radius / 2 + ROUNDING_SLACK
        return BoundedValue(center, radius)

    return RealFunction2D(lambda x, y: bounded(x, y, max_terms).center, (0.0, 1.0),
                          bound_evaluator=bounded, name="h0")


# ------------------------------------------------------------ extension

@dataclass(frozen=True)
class OnG:
    n0: int


@dataclass(frozen=True)
class OnFEffective:
    pass


Classification = Union[OnG, OnFEffective]


@dataclass(frozen=True)
class Evaluation:
    """A value of f with provenance.

    ``mode`` is ``"exact"`` (finite partition sum), ``"rate-oracle"`` or
    ``"cauchy"`` (non-rigorous limit).  ``error_bound`` bounds the distance to
    the true value (``inf`` when nothing rigorous is known); ``fallback_bound``
    is the nominal ``2 / max_index`` for F-side evaluations.
    """

    point: Point2D
    value: float
    branch: Classification
    mode: str
    error_bound: float
    stages: int = 0
    anchor: Optional[Point2D] = None
    fallback_bound: float = 0.0
    entries: Tuple[Tuple[int, float], ...] = ()


class SepExtension:
    """The separately continuous extension; immutable after construction."""

    def __init__(self, E: GraphSet, seq: Baire1Sequence, case: CaseTag,
                 policy: PrecisionPolicy = PrecisionPolicy(), max_stages: int = 200_000,
                 default_tol: float = 1e-6):
        self.E = E
        self.seq = seq
        self.case = CaseTag(case)
        self.policy = policy
        self.max_stages = max_stages
        self.default_tol = default_tol
        self.pairs = PairSequence(E, seq.clamped)
        self.F1 = build_F1(self.case, E, self.pairs)
        self.h0 = build_h0(self.F1, self.pairs, max_terms=max(policy.max_terms, 60))
        self.pou = LazyPartitionOfUnity(
            VanishingSequence(h0=self.h0, terms=lambda n: self.pairs.pair(n).h,
                              batch=lambda x, y, ns: self.pairs.stack(x, y, ns)[1]),
            policy,
        )

    def with_policy(self, policy: PrecisionPolicy) -> "SepExtension":
        return SepExtension(self.E, self.seq, self.case, policy, self.max_stages,
                            self.default_tol)

    def pair(self, n: int) -> PairFH:
        return self.pairs.pair(n)

    def __call__(self, x: float, y: float) -> float:
        return evaluate(self, (x, y), self.default_tol)

    def as_function(self, tol: Optional[float] = None) -> RealFunction2D:
        tol = self.default_tol if tol is None else tol
        return RealFunction2D(lambda x, y: evaluate(self, (x, y), tol),
                              (-math.inf, math.inf), name=f"f[{self.seq.name}]")

    # -- internals shared by classify/evaluate ---------------------------

    def _resolve(self, p: Point2D):
        """Either ``("G", n0, entries)`` or ``("F", m)`` with m the least
        index that could still be active."""
        bv = self.pou.h0_bound(p)
        cap = self.policy.max_index
        if bv.lower > 0:
            n0 = index_bound_from_lower(bv.lower)
            limit = min(n0, cap) + 2
            h0c = bv.center
        else:
            n0 = None
            limit = cap + 2
            h0c = max(bv.center, 0.0)
        M, s = self.pou.running_max(p, h0c, limit)
        if s is not None:
            # a crossing M_s >= 1/s > 0 certifies p in G even when h0 could not
            # be bounded away from zero; s itself is then a valid index bound
            entries = self.pou.weights_from_scan(p, M, s)
            return ("G", n0 if n0 is not None else s, entries)
        n = np.arange(1, len(M))
        hit = np.nonzero(M[1:] >= 1.0 / n)[0]
        s_eff = int(hit[0]) + 1 if len(hit) else len(M)
        return ("F", max(1, s_eff - 2))


def build_extension(E: GraphSet, seq: Baire1Sequence, case: CaseTag = CaseTag.FunctionallyClosedX1,
                    policy: PrecisionPolicy = PrecisionPolicy(), **kw) -> SepExtension:
    return SepExtension(E, seq, case, policy, **kw)


def extend_diagonal(X: Tuple[float, float], seq: Baire1Sequence,
                    policy: PrecisionPolicy = PrecisionPolicy(), **kw) -> SepExtension:
    """Extension from the diagonal of ``X x X``."""
    a, b = X
    return SepExtension(GraphSet.diagonal(a, b), seq, CaseTag.FunctionallyClosedX1, policy, **kw)


def classify(ext: SepExtension, p: Point2D) -> Classification:
    r = ext._resolve(p)
    return OnG(r[1]) if r[0] == "G" else OnFEffective()


# -- limits -----------------------------------------------------------

def _params(ext: SepExtension, x: float, y: float) -> Tuple[List[float], List[float]]:
    """Abscissae of E on which phi~(x) and psi~(y) depend."""

    def deps(v: float, A: ClosedLineSet) -> List[float]:
        loc = locate(v, A)
        if isinstance(loc, InSet):
            return [v]
        if isinstance(loc, InGap):
            return [loc.left, loc.right]
        if isinstance(loc, LeftOfSet):
            return [loc.min_point]
        return [loc.max_point]

    e = ext.E.map
    px = deps(x, ext.E.base)
    py = [min(max(e.inverse(s), ext.E.base.lo), ext.E.base.hi) for s in deps(y, ext.E.image)]
    return px, py


def _cauchy(ext: SepExtension, p: Point2D, tol: float, start: int = 1) -> Tuple[float, int]:
    """Heuristic limit of f_n(p): stop once three consecutive increments are below tol/4."""
    x, y = p
    K = 64
    while True:
        ns = np.arange(start, start + K + 1)
        v = ext.pairs.stack(x, y, ns)[0]
        small = np.abs(np.diff(v)) < tol / 4
        run = np.convolve(small.astype(int), np.ones(3, dtype=int), mode="valid")
        hit = np.nonzero(run == 3)[0]
        if len(hit):
            i = int(hit[0]) + 3
            return float(v[i]), int(ns[i])
        if K >= ext.max_stages:
            raise NonConvergence(p, int(ns[-1]), float(abs(v[-1] - v[-2])))
        K = min(2 * K, ext.max_stages)


def _limit_at(ext: SepExtension, p: Point2D, tol: float, m: int) -> Tuple[float, float, int, str]:
    """``(lim f_n(p) estimate, tail bound beyond index m, stage used, mode)``."""
    x, y = p
    seq = ext.seq
    px, py = _params(ext, x, y)
    if seq.rigorous:
        # half the tolerance for the oracle leaves the other half for rounding
        N = max(seq.stages_for(tol / 2, t) for t in px + py)
        value = float(ext.pairs.stack(x, y, np.array([N]))[0][0])
        tail = (max(seq.tail_bound(m, t) for t in px) + max(seq.tail_bound(m, t) for t in py)) / 2
        return value, tail, N, "rate-oracle"
    value, N = _cauchy(ext, p, tol)
    hi = max(m, N) + 8
    probe = ext.pairs.stack(x, y, np.arange(m, hi + 1))[0]
    tail = float(np.max(np.abs(probe - value)))
    return value, tail, N, "cauchy"


def _anchors(ext: SepExtension, x: float, y: float) -> List[Point2D]:
    E = ext.E
    out = []
    if E.base.contains(x):
        out.append((x, E.map(x)))
    if E.image.contains(y):
        t = E.map.inverse(y)
        t = min(max(t, E.base.lo), E.base.hi)
        if E.base.contains(t, 1e-12):
            q = (t, y)
            if not out or out[0] != q:
                out.append(q)
    return out


def evaluate_detailed(ext: SepExtension, p: Point2D, tol: Optional[float] = None) -> Evaluation:
    tol = ext.default_tol if tol is None else float(tol)
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"non-finite point {p!r}")
    p = (x, y)
    r = ext._resolve(p)
    if r[0] == "G":
        _, n0, entries = r
        ns = np.array([n for n, _ in entries if n > 0], dtype=np.int64)
        fs = dict(zip(ns.tolist(), ext.pairs.stack(x, y, ns)[0].tolist())) if len(ns) else {}
        value = math.fsum(w * fs[n] for n, w in entries if n > 0)  # f_0 = 0
        return Evaluation(p, value, OnG(n0), "exact", 0.0, entries=tuple(entries))

    m = r[1]
    fallback = 2.0 / ext.policy.max_index
    v, tail, N, mode = _limit_at(ext, p, tol, m)
    best = Evaluation(p, v, OnFEffective(), mode, tail + tol, N, None, fallback)
    for q in _anchors(ext, x, y):
        if q == p:
            continue
        vq, tq, Nq, mq = _limit_at(ext, q, tol, m)
        bound = tq + 1.0 / m + tol
        if bound < best.error_bound:
            best = Evaluation(p, vq, OnFEffective(), mq, bound, Nq, q, fallback)
    return best


def evaluate(ext: SepExtension, p: Point2D, tol: Optional[float] = None) -> float:
    return evaluate_detailed(ext, p, tol).value


# ------------------------------------------------------------ gluing

@dataclass(frozen=True)
class Rect:
    """Open rectangle ``(x0, x1) x (y0, y1)``."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise DomainError(f"degenerate rectangle {self}")

    def contains(self, x: float, y: float) -> bool:
        return self.x0 < x < self.x1 and self.y0 < y < self.y1


def tensor_bump(r: Rect) -> Callable[[float, float], float]:
    """Continuous weight positive exactly on the open rectangle."""

    def w(x: float, y: float) -> float:
        if not r.contains(x, y):
            return 0.0
        return (x - r.x0) * (r.x1 - x) * (y - r.y0) * (r.y1 - y)

    return w


def glue_weights(cover: Sequence[Rect], p: Point2D,
                 weights: Optional[Sequence[Callable[[float, float], float]]] = None) -> List[float]:
    """Normalised partition-of-unity weights at ``p``."""
    x, y = p
    ws = weights if weights is not None else [tensor_bump(r) for r in cover]
    raw = [w(x, y) for w in ws]
    total = math.fsum(raw)
    if not total > 0:
        raise CoverError(f"point {p} is not covered")
    return [v / total for v in raw]


def glue(cover: Sequence[Rect], locals_: Sequence[Callable[[float, float], float]],
         weights: Optional[Sequence[Callable[[float, float], float]]] = None) -> RealFunction2D:
    """``f = sum_i phi_i * g_i`` with g_i the i-th local, taken as 0 off its rectangle."""
    if len(cover) != len(locals_):
        raise DomainError("cover and locals differ in length")
    if weights is not None and len(weights) != len(cover):
        raise DomainError("cover and weights differ in length")
    cover = list(cover)
    locals_ = list(locals_)

    def f(x: float, y: float) -> float:
        ws = glue_weights(cover, (x, y), weights)
        return math.fsum(w * locals_[i](x, y) for i, w in enumerate(ws) if w > 0)

    return RealFunction2D(f, (-math.inf, math.inf), name="glued")


def local_extensions(E: GraphSet, seq: Baire1Sequence, cover: Sequence[Rect],
                     policy: PrecisionPolicy = PrecisionPolicy(), **kw
                     ) -> List[Callable[[float, float], float]]:
    """One extension per rectangle, built from E cut down to the rectangle's closure."""
    out = []
    for r in cover:
        Ei = E.restrict(max(r.x0, 0.0), min(r.x1, 1.0), max(r.y0, 0.0), min(r.y1, 1.0))
        if Ei is None:
            out.append(lambda x, y: 0.0)
        else:
            out.append(SepExtension(Ei, seq, CaseTag.FunctionallyClosedX1, policy, **kw))
    return out
