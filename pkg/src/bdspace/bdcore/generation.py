"""Finite, reference-closed generation sets and pruned enumeration."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional, Sequence

from ..errors import PreconditionError, ResourceCapError, UnresolvedReferenceError
from ..setsys import SetSystem, max_hit_mass
from .nodes import ATOM, BDParams, GammaNode, make_node, validate_node


class GenerationSet:
    """Immutable set of nodes closed under base and eta references."""

    def __init__(self, nodes=()):
        found = {ATOM.id: ATOM}
        stack = list(nodes)
        while stack:
            n = stack.pop()
            if n.id in found:
                continue
            found[n.id] = n
            stack.extend(n.references())
        self._nodes = tuple(sorted(found.values(), key=lambda n: n.key))
        self._ids = frozenset(found)
        self.by_rank = {}
        for n in self._nodes:
            self.by_rank.setdefault(n.rank, []).append(n)

    def __contains__(self, node):
        return node.id in self._ids

    def __iter__(self):
        return iter(self._nodes)

    def __len__(self):
        return len(self._nodes)

    @property
    def max_rank(self):
        return self._nodes[-1].rank

    def up_to(self, q):
        return [n for n in self._nodes if n.rank <= q]

    def at_rank(self, r):
        return list(self.by_rank.get(r, ()))

    def with_nodes(self, nodes):
        return GenerationSet(list(self._nodes) + list(nodes))

    def check_closed(self):
        for n in self._nodes:
            for ref in n.references():
                if ref not in self:
                    raise UnresolvedReferenceError(f"{n.id[:60]} references a node outside the set")
        return True


@dataclass
class Caps:
    """Bounds for :func:`enumerate_pruned`.

    ``eta_grid`` / ``xi_grid`` default to every eligible member of ``G``.
    ``limit`` guards against accidental blow-ups (resource error when hit).
    """

    k_max: int = 1
    h_grid: Sequence[int] = (1,)
    interval_grid: Sequence[tuple] = ((0, 0),)
    eta_grid: Optional[Sequence[GammaNode]] = None
    xi_grid: Optional[Sequence[GammaNode]] = None
    kinds: Sequence[str] = ("a", "b")
    signs: Sequence[int] = (1, -1)
    limit: int = 200000


def _families(grid, k, low, q):
    ivs = sorted({(lo, hi) for lo, hi in grid if low <= lo <= hi <= q})
    for combo in combinations(ivs, k):
        if all(combo[i][1] < combo[i + 1][0] for i in range(k - 1)):
            yield combo


def enumerate_pruned(sys: SetSystem, params: BDParams, q: int, G: GenerationSet, caps: Caps) -> list:
    """All valid rank-``q+1`` nodes inside the caps, in canonical order."""
    rank = q + 1
    etas = list(caps.eta_grid) if caps.eta_grid is not None else G.up_to(q)
    etas = [e for e in etas if e.rank <= q]
    for e in etas:
        if e not in G:
            raise PreconditionError("eta candidates must belong to the generation set")
    if caps.xi_grid is not None:
        xis = list(caps.xi_grid)
    else:
        xis = [n for n in G if not n.is_atom]
    xis = [x for x in xis if 1 <= x.rank <= q - 1 and x.age < params.N]
    hs = sorted(set(caps.h_grid))
    out = {}
    bound = params.omega * rank
    for kind in caps.kinds:
        if kind == "b" and rank < 3:
            continue
        bases = [None] if kind == "a" else xis
        for base in bases:
            low = 0 if base is None else base.rank + 1
            for k in range(1, caps.k_max + 1):
                for fam in _families(caps.interval_grid, k, low, q):
                    for h in product(hs, repeat=k):
                        if sum(h) > rank:
                            continue
                        mass, _ = max_hit_mass(sys, fam, h)
                        if not mass < bound:
                            continue
                        for eps in product(caps.signs, repeat=k):
                            for eta in product(etas, repeat=k):
                                parts = [(e, lo, hi, n, w) for e, (lo, hi), n, w in zip(eps, fam, eta, h)]
                                node = make_node(rank, kind, parts, base)
                                if node.id in out:
                                    continue
                                if not validate_node(node, sys, params).ok:
                                    continue
                                out[node.id] = node
                                if len(out) > caps.limit:
                                    raise ResourceCapError(f"more than {caps.limit} nodes at rank {rank}")
    return sorted(out.values(), key=lambda n: n.key)


def grow_generation(sys: SetSystem, params: BDParams, max_rank: int = 8, per_rank: int = 72,
                    seed: int = 0, k_max: int = 2) -> GenerationSet:
    """Random reference-closed set with up to ``per_rank`` nodes at each rank.

    Each rank uses a random sub-grid of intervals, weights, etas and bases,
    enumerates the valid nodes exactly and samples from them.
    """
    rng = random.Random(seed)
    G = GenerationSet()
    for q in range(0, max_rank):
        rank = q + 1
        cuts = sorted(rng.sample(range(1, q + 1), min(q, rng.randint(0, 3)))) if q else []
        bounds = [0] + cuts + [q + 1]
        grid = [(bounds[i], bounds[i + 1] - 1) for i in range(len(bounds) - 1)]
        for _ in range(2):
            lo = rng.randint(0, q)
            grid.append((lo, rng.randint(lo, q)))
        members = G.up_to(q)
        etas = rng.sample(members, min(len(members), 3))
        xis = [n for n in members if not n.is_atom]
        xis = rng.sample(xis, min(len(xis), 2))
        h_grid = sorted(set(rng.randint(1, max(1, rank // 2)) for _ in range(2)))
        caps = Caps(k_max=k_max, h_grid=h_grid, interval_grid=grid, eta_grid=etas, xi_grid=xis)
        found = enumerate_pruned(sys, params, q, G, caps)
        if len(found) > per_rank:
            found = sorted(rng.sample(found, per_rank), key=lambda n: n.key)
        G = G.with_nodes(found)
    return G
