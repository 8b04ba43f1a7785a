"""Vectors in d-coordinates and their e-coordinates.

A vector is ``sum lambda_delta d_delta``.  Interval projections act diagonally
on these coefficients, and the coordinate ``x(gamma)`` follows from the
rank-decreasing recursion

    e*_gamma(x) = d*_gamma(x) + [e*_xi(x)] + (theta/N)/rank * sum h eps e*_eta(P_E x)

which only ever touches nodes referenced from ``gamma``.
"""

from __future__ import annotations

import sys
from bisect import bisect_left
from fractions import Fraction

from ..rational import as_fraction
from .nodes import BDParams, GammaNode


class DVector:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        out = {}
        for node, v in (coeffs or {}).items():
            v = as_fraction(v)
            if v:
                out[node] = v
        self.coeffs = out

    @classmethod
    def unit(cls, node):
        return cls({node: Fraction(1)})

    def items(self):
        return self.coeffs.items()

    def nodes(self):
        return list(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        out = dict(self.coeffs)
        for node, v in other.coeffs.items():
            out[node] = out.get(node, 0) + v
        return DVector(out)

    def __mul__(self, scalar):
        s = as_fraction(scalar)
        return DVector({n: v * s for n, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, DVector) and self.coeffs == other.coeffs

    def coefficient(self, node):
        return self.coeffs.get(node, Fraction(0))

    def project_d(self, lo, hi=None):
        """Keep the coefficients whose rank lies in ``[lo, hi]`` (``hi=None``: no cap)."""
        return DVector({n: v for n, v in self.coeffs.items()
                        if n.rank >= lo and (hi is None or n.rank <= hi)})

    def range(self):
        """``(min rank, max rank)`` of the support, or None for zero."""
        if not self.coeffs:
            return None
        ranks = [n.rank for n in self.coeffs]
        return min(ranks), max(ranks)

    def l1(self):
        return sum((abs(v) for v in self.coeffs.values()), Fraction(0))


class CoordEvaluator:
    """Memoized ``e*_gamma(P_[lo,hi] x)`` for one fixed vector ``x``."""

    def __init__(self, x: DVector, params: BDParams):
        self.x = x
        self.weight = params.weight
        self.memo = {}
        self.ranks = sorted({n.rank for n in x.coeffs})

    def _has_support(self, lo, hi):
        i = bisect_left(self.ranks, lo)
        return i < len(self.ranks) and self.ranks[i] <= hi

    def value(self, gamma: GammaNode, lo: int = 0, hi: int = None) -> Fraction:
        top = gamma.rank if hi is None else min(hi, gamma.rank)
        lo = max(lo, 0)
        if lo > top or not self._has_support(lo, top):
            return Fraction(0)
        key = (gamma, lo, top)
        got = self.memo.get(key)
        if got is not None:
            return got
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)
        total = self.x.coefficient(gamma) if top == gamma.rank else Fraction(0)
        if not gamma.is_atom:
            if gamma.base is not None:
                total += self.value(gamma.base, lo, top)
            acc = Fraction(0)
            for eps, plo, phi, eta, h in gamma.parts:
                v = self.value(eta, max(plo, lo), min(phi, top))
                if v:
                    acc += eps * h * v
            if acc:
                total += self.weight * acc / gamma.rank
        self.memo[key] = total
        return total


def eval_coord(x: DVector, gamma: GammaNode, params: BDParams) -> Fraction:
    """The coordinate ``x(gamma)`` of a d-vector."""
    return CoordEvaluator(x, params).value(gamma)


def project_d(x: DVector, lo: int, hi: int = None) -> DVector:
    return x.project_d(lo, hi)
