"""From a continuous g on a graph set to the pair (f, h).

With phi~ and psi~ continuous extensions of ``x -> g(x, e(x))`` and
``y -> g(e^-1(y), y)``, put ``f = (phi~(x) + psi~(y)) / 2`` and
``h = (phi~(x) - psi~(y)) / 2``.  Then f = g and h = 0 on E, and along any
horizontal or vertical section the increments of f and h agree in absolute
value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .domains import GraphSet
from .errors import ContractError
from .extend1d import PartialFunction1D, extend_linear, extend_values
from .real_fn import RealFunction1D, RealFunction2D, combine

BOUND_SLACK = 1e-12
N_PROBES = 64


@dataclass(frozen=True)
class PairFH:
    f: RealFunction2D
    h: RealFunction2D
    bound: float
    phi_ext: RealFunction1D
    psi_ext: RealFunction1D
    E: GraphSet
    g: RealFunction2D


def build_pair(E: GraphSet, g: RealFunction2D, M: float = 1.0) -> PairFH:
    """Lemma-style pair construction for ``g`` with ``|g| <= M`` on ``E``.

    Values that exceed ``M`` by at most ``1e-12`` are clamped; anything
    larger at a probe point of ``E`` is a :class:`ContractError`.
    """
    M = float(M)
    e = E.map
    for t in E.base.grid(N_PROBES):
        v = g(float(t), e(float(t)))
        if not abs(v) <= M + BOUND_SLACK:
            raise ContractError(f"|g| = {abs(v)!r} exceeds bound {M} at ({t}, {e(t)})")

    gev = g.evaluator

    def phi(x):
        return min(max(gev(x, e(x)), -M), M)

    def psi(y):
        return min(max(gev(e.inverse(y), y), -M), M)

    phi_ext = extend_linear(PartialFunction1D(E.base, RealFunction1D(phi, (-M, M), name="phi")))
    psi_ext = extend_linear(PartialFunction1D(E.image, RealFunction1D(psi, (-M, M), name="psi")))
    f = combine("half-sum", phi_ext, psi_ext)
    h = combine("half-diff", phi_ext, psi_ext)
    return PairFH(f=f, h=h, bound=M, phi_ext=phi_ext, psi_ext=psi_ext, E=E, g=g)


class PairSequence:
    """The pairs ``(f_n, h_n)`` for a whole sequence, evaluable for many ``n`` at once.

    ``stage(ns, t)`` returns the (already clamped) values ``g_n(t, e(t))`` for
    an integer array ``ns``.  :meth:`stack` performs the same floating-point
    operations as :func:`build_pair` does for a single stage, only
    vectorised over ``n``.
    """

    def __init__(self, E: GraphSet, stage: Callable[[np.ndarray, float], np.ndarray]):
        self.E = E
        self.stage = stage

    def stack(self, x: float, y: float, ns: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ns = np.asarray(ns)
        e = self.E.map
        stage = self.stage
        phi = np.asarray(extend_values(self.E.base, lambda t: stage(ns, t), x), dtype=float)
        psi = np.asarray(extend_values(self.E.image, lambda s: stage(ns, e.inverse(s)), y),
                         dtype=float)
        return (phi + psi) / 2, (phi - psi) / 2

    def pair(self, n: int) -> PairFH:
        e = self.E.map
        stage = self.stage
        arr = np.array([n])
        g = RealFunction2D(lambda x, y: float(stage(arr, x)[0]), (-n, n), name=f"g_{n}")
        return build_pair(self.E, g, M=n)
