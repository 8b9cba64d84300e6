"""Probes that turn the construction's identities and estimates into reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .engine import (OnG, SepExtension, classify, evaluate, evaluate_detailed, glue_weights,
                     Rect)
from .errors import NearZero
from .pair_builder import PairFH

Point2D = Tuple[float, float]
Fn2 = Callable[[float, float], float]


@dataclass
class ProbeReport:
    name: str
    samples: int
    worst: float
    threshold: float
    witness: Optional[Point2D] = None
    seed: Optional[int] = None
    note: str = ""
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.threshold)

    def line(self) -> str:
        w = "none" if self.witness is None else f"({self.witness[0]:.17g},{self.witness[1]:.17g})"
        tag = "PASS" if self.passed else "FAIL"
        s = f"{tag} {self.name} worst={self.worst:.6g} thr={self.threshold:.6g} witness={w}"
        return s + (f" note={self.note}" if self.note else "")

    def block(self) -> str:
        """Machine-readable key=value block."""
        rows = [f"[{self.name}]", f"pass={str(self.passed).lower()}", f"samples={self.samples}",
                f"worst={self.worst!r}", f"threshold={self.threshold!r}",
                f"witness={'' if self.witness is None else '%r,%r' % self.witness}",
                f"seed={'' if self.seed is None else self.seed}"]
        if self.note:
            rows.append(f"note={self.note}")
        rows += [f"{k}={v}" for k, v in self.extra.items()]
        return "\n".join(rows)


def _track(worst, witness, dev, p):
    if dev > worst or witness is None:
        return dev, p
    return worst, witness


class _Worst:
    def __init__(self):
        self.value = -math.inf
        self.witness = None

    def add(self, dev: float, p: Point2D):
        if dev > self.value:
            self.value, self.witness = dev, p


# ------------------------------------------------------------ pair identities

def check_pair_identity(pair: PairFH, n_triples: int = 1000, tol: float = 1e-15,
                        seed: int = 0, square=(0.0, 1.0)) -> ProbeReport:
    """Section increments of f and h agree in absolute value."""
    rng = np.random.default_rng(seed)
    lo, hi = square
    a, b, c = (lo + (hi - lo) * rng.random(n_triples) for _ in range(3))
    f, h = pair.f, pair.h
    worst, witness = 0.0, None
    for u, v, w in zip(a.tolist(), b.tolist(), c.tolist()):
        # horizontal: x' = u, x'' = v, y = w ; vertical: x = w, y' = u, y'' = v
        d1 = abs(abs(f(u, w) - f(v, w)) - abs(h(u, w) - h(v, w)))
        d2 = abs(abs(f(w, u) - f(w, v)) - abs(h(w, u) - h(w, v)))
        worst, witness = _track(worst, witness, d1, (u, w))
        worst, witness = _track(worst, witness, d2, (w, u))
    return ProbeReport("pair_identity", 2 * n_triples, worst, tol, witness, seed)


def check_pair_restriction(pair: PairFH, n_samples: int = 1000, tol: float = 1e-15,
                           seed: int = 0) -> List[ProbeReport]:
    """f = g and h = 0 on E, f + h = phi~(x) and f - h = psi~(y) everywhere sampled."""
    rng = np.random.default_rng(seed)
    E = pair.E
    ts = E.base.sample(n_samples, rng)
    wf = wh = 0.0
    pf = ph = None
    for t in ts.tolist():
        x, y = E.point(t)
        gv = min(max(pair.g(x, y), -pair.bound), pair.bound)
        wf, pf = _track(wf, pf, abs(pair.f(x, y) - gv), (x, y))
        wh, ph = _track(wh, ph, abs(pair.h(x, y)), (x, y))
    pts = rng.random((n_samples, 2))
    wr, pr = 0.0, None
    for x, y in pts.tolist():
        fv, hv = pair.f(x, y), pair.h(x, y)
        d = max(abs((fv + hv) - pair.phi_ext(x)), abs((fv - hv) - pair.psi_ext(y)))
        wr, pr = _track(wr, pr, d, (x, y))
    return [
        ProbeReport("pair_f_on_E", n_samples, wf, tol, pf, seed),
        ProbeReport("pair_h_on_E", n_samples, wh, tol, ph, seed),
        ProbeReport("pair_retained_parts", n_samples, wr, tol, pr, seed),
    ]


# ------------------------------------------------------------ restriction

def check_restriction(ext: SepExtension, limit: Optional[Callable[[float], float]] = None,
                      n_samples: int = 1000, tol: float = 1e-6, seed: int = 0,
                      include: Sequence[float] = (), exclude: Sequence[float] = ()) -> ProbeReport:
    """Worst ``|f(t, e(t)) - g(t)|`` over E sampled uniformly in the abscissa."""
    g = limit if limit is not None else ext.seq.limit
    if g is None:
        raise ValueError("restriction check needs the limit values of g")
    rng = np.random.default_rng(seed)
    ts = [t for t in ext.E.base.sample(n_samples, rng).tolist() if t not in set(exclude)]
    ts += list(include)
    worst, witness = 0.0, None
    modes = set()
    for t in ts:
        p = ext.E.point(t)
        ev = evaluate_detailed(ext, p, tol)
        modes.add(ev.mode)
        worst, witness = _track(worst, witness, abs(ev.value - g(t)), p)
    note = "heuristic-limit" if "cauchy" in modes else ""
    return ProbeReport("restriction", len(ts), worst, tol, witness, seed, note,
                       {"modes": ",".join(sorted(modes))})


def check_self_consistency(ext: SepExtension, n_samples: int = 1000, tol: float = 1e-6,
                           seed: int = 0) -> ProbeReport:
    """For g without known limit values: f on E at ``tol`` against ``tol / 2``.

    Non-convergent inputs surface here as :class:`NonConvergence`.
    """
    rng = np.random.default_rng(seed)
    worst, witness = 0.0, None
    for t in ext.E.base.sample(n_samples, rng).tolist():
        p = ext.E.point(t)
        d = abs(evaluate(ext, p, tol) - evaluate(ext, p, tol / 2))
        worst, witness = _track(worst, witness, d, p)
    return ProbeReport("restriction_self_consistency", n_samples, worst, tol, witness, seed,
                       "heuristic-limit" if not ext.seq.rigorous else "")


def check_closed_form(ext: SepExtension, g: Callable[[float], float], n_points: int = 10_000,
                      tol: float = 1e-12, seed: int = 0) -> ProbeReport:
    """Compare with ``(g(x) + g(y)) / 2`` (valid for constant-sequence diagonal builds)."""
    rng = np.random.default_rng(seed)
    pts = rng.random((n_points, 2)).tolist()
    worst, witness = 0.0, None
    branches = {"G": 0, "F": 0}
    for x, y in pts:
        ev = evaluate_detailed(ext, (x, y))
        branches["G" if isinstance(ev.branch, OnG) else "F"] += 1
        worst, witness = _track(worst, witness, abs(ev.value - (g(x) + g(y)) / 2), (x, y))
    return ProbeReport("closed_form", n_points, worst, tol, witness, seed,
                       extra={"on_G": branches["G"], "on_F": branches["F"]})


# ------------------------------------------------------------ partition

def check_partition(ext: SepExtension, n_points: int = 10_000, tol: float = 1e-12,
                    seed: int = 0, max_attempts: Optional[int] = None) -> List[ProbeReport]:
    """Partition-of-unity properties at random points certified to lie in G.

    Draws at most ``max_attempts`` (default ``20 * n_points``) candidates; when
    G is empty or tiny (e.g. constant g, where every h_n vanishes) the reports
    cover the points found, possibly none.
    """
    rng = np.random.default_rng(seed)
    pou = ext.pou
    w_sum, w_neg, w_b, w_cnt, w_a = (_Worst() for _ in range(5))
    count = 0
    attempts = 20 * n_points if max_attempts is None else max_attempts
    for _ in range(attempts):
        if count >= n_points:
            break
        x, y = rng.random(2).tolist()
        try:
            pe = pou.partition((x, y))
        except NearZero:
            continue
        count += 1
        p = (x, y)
        w_sum.add(abs(math.fsum(w for _, w in pe.entries) - 1.0), p)
        w_neg.add(max(0.0, -min(w for _, w in pe.entries)), p)
        w_cnt.add(float(len(pe.entries) - pe.n0), p)
        ns = np.array([n for n, w in pe.entries if n >= 1 and w > 0])
        if len(ns):
            hs = np.abs(pou.source.h_values(x, y, ns))
            w_b.add(float(np.max(hs - 1.0 / ns)), p)
        # threshold form of the support condition: M_{n+2} > 1/(n+2)
        M = pe.running_max
        w_a.add(max(1.0 / (n + 2) - M[n + 2] for n, w in pe.entries if w > 0), p)
    # strict inequalities: the worst margin must be negative
    below_zero = float(np.nextafter(0.0, -1.0))
    if count == 0:
        note = "no certified G-points sampled"
        return [ProbeReport(name, 0, -math.inf, 0.0, None, seed, note)
                for name in ("partition_sum", "partition_nonnegative", "partition_condition_b",
                             "partition_active_count", "partition_support_threshold")]
    return [
        ProbeReport("partition_sum", count, w_sum.value, tol, w_sum.witness, seed),
        ProbeReport("partition_nonnegative", count, w_neg.value, 0.0, w_neg.witness, seed),
        ProbeReport("partition_condition_b", count, w_b.value, below_zero, w_b.witness, seed,
                    note="max(|h_n|-1/n)_over_active_n>=1"),
        ProbeReport("partition_active_count", count, w_cnt.value, 0.0, w_cnt.witness, seed,
                    note="max(#active-n0)"),
        ProbeReport("partition_support_threshold", count, w_a.value, below_zero, w_a.witness,
                    seed, note="max(1/(n+2)-M_{n+2})_over_active_n"),
    ]


# ------------------------------------------------------------ continuity probes

def section_oscillation(f: Fn2, axis: str, anchor: float, window: Tuple[float, float],
                        depths: Sequence[int]) -> List[float]:
    """Max adjacent difference of a section sampled at steps ``2^-k``, k in ``depths``.

    ``axis="horizontal"`` freezes ``y = anchor`` and varies x over ``window``.
    """
    if axis not in ("horizontal", "vertical"):
        raise ValueError(f"axis must be horizontal or vertical, got {axis!r}")
    a, b = window
    out = []
    for k in depths:
        step = math.ldexp(1.0, -k)
        n = int(round((b - a) / step))
        ts = [a + i * step for i in range(n + 1)]
        if axis == "horizontal":
            vals = [f(t, anchor) for t in ts]
        else:
            vals = [f(anchor, t) for t in ts]
        out.append(max(abs(u - v) for u, v in zip(vals[:-1], vals[1:])))
    return out


def non_increasing(seq: Sequence[float], allowed_exceptions: int = 0) -> bool:
    bad = sum(1 for u, v in zip(seq[:-1], seq[1:]) if v > u)
    return bad <= allowed_exceptions


def _ring(p0: Point2D, r: float, n_angles: int, square) -> List[Point2D]:
    lo, hi = square
    pts = []
    for rad in (r, r / 2):
        for k in range(n_angles):
            th = 2 * math.pi * k / n_angles
            q = (p0[0] + rad * math.cos(th), p0[1] + rad * math.sin(th))
            if lo <= q[0] <= hi and lo <= q[1] <= hi:
                pts.append(q)
    return pts


def joint_discontinuity_probe(f: Fn2, p0: Point2D, radii: Sequence[float],
                              n_angles: int = 64, square=(0.0, 1.0)) -> List[float]:
    """Max ``|f(q) - f(p0)|`` over ring samples at distance ``r`` and ``r/2``."""
    f0 = f(*p0)
    out = []
    for r in radii:
        pts = _ring(p0, r, n_angles, square)
        out.append(max((abs(f(*q) - f0) for q in pts), default=0.0))
    return out


def epsilon_delta_probe(f: Fn2, p0: Point2D, eps: float, axis: str = "horizontal",
                        n_samples: int = 64, delta0: float = 0.5, max_halvings: int = 40,
                        square=(0.0, 1.0)) -> Tuple[float, float]:
    """Largest dyadic delta with ``|f(section) - f(p0)| < eps`` on the sampled
    ``delta``-window of the section through ``p0``.  Returns (delta, worst)."""
    lo, hi = square
    f0 = f(*p0)
    delta = delta0
    for _ in range(max_halvings):
        ts = np.linspace(-delta, delta, 2 * n_samples + 1)[1:-1]
        worst = 0.0
        for s in ts.tolist():
            q = (p0[0] + s, p0[1]) if axis == "horizontal" else (p0[0], p0[1] + s)
            if lo <= q[0] <= hi and lo <= q[1] <= hi:
                worst = max(worst, abs(f(*q) - f0))
        if worst < eps:
            return delta, worst
        delta /= 2
    return 0.0, math.inf


def projection_net_spacing(xs: Sequence[float], interval=(0.0, 1.0)) -> float:
    """Largest gap left in ``interval`` by the points ``xs``: every point of the
    interval is within this distance of ``xs`` or an endpoint."""
    a, b = interval
    pts = sorted({a, b, *(min(max(float(x), a), b) for x in xs)})
    return max(v - u for u, v in zip(pts[:-1], pts[1:]))


# ------------------------------------------------------------ gluing

def check_glue(glued: Fn2, reference: Fn2, cover: Sequence[Rect], n_points: int = 1000,
               tol: float = 1e-12, seed: int = 0) -> List[ProbeReport]:
    rng = np.random.default_rng(seed)
    wv = ws = 0.0
    pv = ps = None
    for x, y in rng.random((n_points, 2)).tolist():
        wv, pv = _track(wv, pv, abs(glued(x, y) - reference(x, y)), (x, y))
        s = math.fsum(glue_weights(cover, (x, y)))
        ws, ps = _track(ws, ps, abs(s - 1.0), (x, y))
    return [ProbeReport("glue_values", n_points, wv, tol, pv, seed),
            ProbeReport("glue_weight_sum", n_points, ws, tol, ps, seed)]


# ------------------------------------------------------------ fallback safety

def fallback_stability(ext: SepExtension, points: Sequence[Point2D], tol: float = 1e-6,
                       threshold: Optional[float] = None) -> ProbeReport:
    """Re-evaluate F-side points at doubled precision and compare.

    Only points classified ``OnFEffective`` at the base precision count.
    With ``threshold=None`` each point is held to its own reported error
    bound; otherwise to the given fixed threshold.
    """
    fine = ext.with_policy(ext.policy.doubled())
    w = _Worst()
    count = 0
    for p in points:
        base = evaluate_detailed(ext, p, tol)
        if isinstance(base.branch, OnG):
            continue
        count += 1
        again = evaluate_detailed(fine, p, tol / 2)
        move = abs(again.value - base.value)
        w.add(move if threshold is not None else move / base.error_bound, p)
    worst = max(w.value, 0.0)
    if threshold is None:
        return ProbeReport("fallback_stability", count, worst, 1.0, w.witness,
                           note="max(move/reported_bound)")
    return ProbeReport("fallback_stability", count, worst, threshold, w.witness)
