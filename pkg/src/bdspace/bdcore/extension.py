"""Extension operators on finite, reference-closed slices.

``extend(G, p, y)`` computes ``i_p(y)`` on every member of ``G`` by the
defining recursion: below rank ``p`` it is ``y``; above, the coordinate at
``delta`` is ``c*_delta`` of the already extended lower part.  The interval
projection inside ``c*`` is a difference of two extensions of restrictions:

    (e*_eta o P_[lo,hi])(Y_s) = Y_min(s,hi)(eta) - Y_min(s,lo-1)(eta)

where ``Y_t`` is the extension of the restriction to ranks ``<= t``.
"""

from __future__ import annotations

import sys
from fractions import Fraction

from ..errors import MissingCoordinateError
from .dvector import DVector
from .nodes import BDParams


class _Extender:
    def __init__(self, y, params: BDParams):
        self.y = y
        self.weight = params.weight
        self.memo = {}

    def value(self, t, delta):
        """``Y_t(delta)``: coordinate of ``i_t(y restricted to ranks <= t)``."""
        if t < 0:
            return Fraction(0)
        if delta.rank <= t:
            try:
                return self.y[delta]
            except KeyError:
                raise MissingCoordinateError(f"no coordinate at {delta.id[:80]}") from None
        key = (t, delta)
        got = self.memo.get(key)
        if got is not None:
            return got
        total = Fraction(0)
        if delta.base is not None:
            total += self.value(t, delta.base)
        acc = Fraction(0)
        for eps, lo, hi, eta, h in delta.parts:
            v = self.value(min(t, hi), eta) - self.value(min(t, lo - 1), eta)
            if v:
                acc += eps * h * v
        if acc:
            total += self.weight * acc / delta.rank
        self.memo[key] = total
        return total


def materialize_extension(G, p: int, q: int, x, params: BDParams) -> dict:
    """Coordinates of ``i_{p,q}(x)`` on ``G`` restricted to ranks ``<= q``.

    ``x`` maps every member of ``G`` with rank ``<= p`` to a rational.
    """
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)
    x = {n: Fraction(v) for n, v in x.items()}
    for node in G.up_to(p):
        if node not in x:
            raise MissingCoordinateError(f"input has no coordinate at {node.id[:80]}")
    ext = _Extender(x, params)
    return {node: ext.value(p, node) for node in G.up_to(q)}


def restrict(coords: dict, p: int) -> dict:
    return {n: v for n, v in coords.items() if n.rank <= p}


def unit_coords(G, node, q: int, params: BDParams) -> dict:
    """Coordinates of ``d_node`` on ``G`` up to rank ``q``."""
    base = {n: Fraction(0) for n in G.up_to(node.rank)}
    base[node] = Fraction(1)
    return materialize_extension(G, node.rank, q, base, params)


def coords_of(G, x: DVector, q: int, params: BDParams) -> dict:
    """Coordinates of a d-vector computed through extensions of unit vectors."""
    out = {n: Fraction(0) for n in G.up_to(q)}
    for node, lam in x.items():
        if node.rank > q:
            continue
        for n, v in unit_coords(G, node, q, params).items():
            if v:
                out[n] += lam * v
    return out
