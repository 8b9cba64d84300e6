"""Locally finite partition of unity off a functionally closed set.

Given h0 >= 0 vanishing exactly on F and functions h_n vanishing on F, the
supports are ``G_n = A_n minus B_{n+2}`` (n >= 1) and ``G_0 = G minus B_2`` where

    A_n = {max_{k<=n} |h_k| < 1/n},    B_n = {max_{k<=n} |h_k| <= 1/n}.

Write ``M_n(p) = max_{k<=n} |h_k(p)|``.  Because M_n is non-decreasing and
1/n decreasing, ``{n : p in A_n}`` is an initial segment and
``{n : p not in B_{n+2}}`` a final one, so only a short band of indices is
active at any p.  The band is found by scanning n upward until
``M_n >= 1/n``; that index never exceeds n0(p), the least n with
``1/n < h0(p)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import ConstructionError, IndexBudgetExceeded, NearZero
from .real_fn import BoundedValue, RealFunction2D

Point2D = Tuple[float, float]


class Membership(enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class PrecisionPolicy:
    """How hard to try before giving up on a decision.

    ``max_terms`` caps the truncation of the h0 series (levels use
    ``base_terms * 2**level`` terms); ``max_index`` caps how far the active
    band may be searched.
    """

    base_terms: int = 8
    max_terms: int = 60
    max_index: int = 4096

    def levels(self) -> List[int]:
        out, N = [], self.base_terms
        while N < self.max_terms:
            out.append(N)
            N *= 2
        out.append(self.max_terms)
        return out

    def doubled(self) -> "PrecisionPolicy":
        return replace(self, max_terms=2 * self.max_terms, max_index=2 * self.max_index)


@dataclass(frozen=True)
class VanishingSequence:
    """h0 with a bound evaluator (level = number of series terms) and the h_n.

    ``batch(x, y, ns)`` evaluates ``h_n(x, y)`` for an integer array ``ns``;
    it defaults to calling ``terms(n)`` one by one.
    """

    h0: RealFunction2D
    terms: Callable[[int], RealFunction2D]
    batch: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = None

    def h_values(self, x: float, y: float, ns: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(x, y, ns), dtype=float)
        return np.array([self.terms(int(n))(x, y) for n in ns], dtype=float)


def index_bound_from_lower(L: float) -> int:
    """Least integer n >= 1 with ``1/n < L``."""
    if not L > 0:
        raise ValueError(f"need a positive lower bound, got {L!r}")
    n = max(1, int(math.floor(1.0 / L)))
    while n > 1 and 1.0 / (n - 1) < L:
        n -= 1
    while not 1.0 / n < L:
        n += 1
    return n


@dataclass(frozen=True)
class PartitionEvaluation:
    point: Point2D
    entries: List[Tuple[int, float]]
    n0: int
    h0: BoundedValue
    running_max: np.ndarray = field(repr=False)

    @property
    def indices(self) -> List[int]:
        return [n for n, _ in self.entries]


class LazyPartitionOfUnity:
    def __init__(self, source: VanishingSequence, policy: PrecisionPolicy = PrecisionPolicy()):
        self.source = source
        self.policy = policy

    # -- h0 certification ------------------------------------------------

    def h0_bound(self, p: Point2D) -> BoundedValue:
        """Tightest bound on h0(p) needed: stops at the first level that
        certifies h0(p) > 0, otherwise returns the max-level bound."""
        x, y = p
        bv = None
        for N in self.policy.levels():
            bv = self.source.h0.bounded(x, y, N)
            if bv.lower > 0:
                break
        return bv

    def certified_lower(self, p: Point2D) -> float:
        return self.h0_bound(p).lower

    def active_index_bound(self, p: Point2D) -> int:
        """n0(p): no partition function with index >= n0 is positive at p."""
        L = self.certified_lower(p)
        if not L > 0:
            raise NearZero(p, L)
        return index_bound_from_lower(L)

    # -- set membership --------------------------------------------------

    def _membership(self, n: int, p: Point2D, strict: bool) -> Membership:
        x, y = p
        thr = 1.0 / n
        hk = np.abs(self.source.h_values(x, y, np.arange(1, n + 1)))
        m = float(hk.max()) if len(hk) else 0.0
        exact_in = m < thr if strict else m <= thr
        if not exact_in:
            return Membership.OUTSIDE
        for N in self.policy.levels():
            bv = self.source.h0.bounded(x, y, N)
            upper = max(abs(bv.lower), abs(bv.upper))
            lower = 0.0 if bv.lower <= 0 <= bv.upper else min(abs(bv.lower), abs(bv.upper))
            if (upper < thr) if strict else (upper <= thr):
                return Membership.INSIDE
            if (lower >= thr) if strict else (lower > thr):
                return Membership.OUTSIDE
        return Membership.UNRESOLVED

    def membership_A(self, n: int, p: Point2D) -> Membership:
        if n < 1:
            raise ValueError("A_n is defined for n >= 1")
        return self._membership(n, p, strict=True)

    def membership_B(self, n: int, p: Point2D) -> Membership:
        if n < 1:
            raise ValueError("B_n is defined for n >= 1")
        return self._membership(n, p, strict=False)

    # -- partition -------------------------------------------------------

    def running_max(self, p: Point2D, h0c: float, limit: int
                    ) -> Tuple[np.ndarray, Optional[int]]:
        """``M_0..M_K`` for the band search, ``K <= limit``.

        Returns ``(M, s)`` with s the first n such that ``M_n >= 1/n``, or
        ``(M, None)`` with ``len(M) == limit + 1`` when no such n <= limit
        leaves room for ``M_{s+1}``.
        """
        x, y = p
        K = min(64, limit)
        while True:
            hs = np.abs(self.source.h_values(x, y, np.arange(1, K + 1)))
            M = np.maximum.accumulate(np.concatenate(([abs(h0c)], hs)))
            n = np.arange(1, K + 1)
            hit = np.nonzero(M[1:] >= 1.0 / n)[0]
            if len(hit) and hit[0] + 2 <= K:
                return M, int(hit[0]) + 1
            if K >= limit:
                return M, None
            K = min(2 * K, limit)

    @staticmethod
    def weights_from_scan(p: Point2D, M: np.ndarray, s: int) -> List[Tuple[int, float]]:
        """Normalised ``(n, phi_n)`` from a running max whose crossing index is s."""
        a = s - 1  # last index with M_n < 1/n
        weights = []
        if M[2] > 0.5:
            weights.append((0, min(1.0, 2.0 * (M[2] - 0.5))))
        if a >= 1:
            n = np.arange(1, a + 1)
            fa = np.minimum(1.0, n * np.maximum(0.0, 1.0 / n - M[1:a + 1]))
            fb = np.minimum(1.0, (n + 2) * np.maximum(0.0, M[3:a + 3] - 1.0 / (n + 2)))
            psi = fa * fb
            for k in np.nonzero(psi > 0)[0]:
                weights.append((int(n[k]), float(psi[k])))
        total = math.fsum(w for _, w in weights)
        if not total > 0:
            raise ConstructionError(f"no partition function is positive at {p}")
        return [(n, w / total) for n, w in weights]

    def partition(self, p: Point2D) -> PartitionEvaluation:
        bv = self.h0_bound(p)
        if not bv.lower > 0:
            raise NearZero(p, bv.lower)
        n0 = index_bound_from_lower(bv.lower)
        # s <= n0 always, so the search below can only fail on the budget
        M, s = self.running_max(p, bv.center, min(n0, self.policy.max_index) + 2)
        if s is None:
            raise IndexBudgetExceeded(p, bv.lower, self.policy.max_index)
        return PartitionEvaluation(point=p, entries=self.weights_from_scan(p, M, s),
                                   n0=n0, h0=bv, running_max=M)

    def evaluate_partition(self, p: Point2D) -> List[Tuple[int, float]]:
        """``(n, phi_n(p))`` for every index with ``phi_n(p) > 0``."""
        return self.partition(p).entries
