"""Growth certificates: explicit functional chains with exactly verified values.

A certificate is a chain ``gamma_1, ..., gamma_N`` (``gamma_1`` of form (a),
each later one of form (b) over its predecessor) together with successive
blocks ``x_1, ..., x_r``.  Step ``n+1`` takes ``k`` fresh blocks after
``rank(gamma_n)``, lets ``E_i`` be their ranges, picks convex coefficients
with small mass on every member of the system, and sets
``h_i = floor((q+1) alpha_i)``.  Each step then adds more than
``(theta - eps)/N`` to ``e*_gamma(x_1 + ... + x_r)``.

Blocks come from a rank-programmable factory.  Level-1 blocks are filler
units; level ``L`` blocks are level ``L-1`` certificate sums divided by
``(theta - eps)^(L-1)``, whose top chain node supplies the witnessing
coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from ..bdcore.dvector import CoordEvaluator, DVector
from ..bdcore.generation import GenerationSet
from ..bdcore.nodes import BDParams, GammaNode, filler, make_node, validate_node
from ..coeffs import solve_alpha_blocks
from ..errors import (AlphaNotFoundError, BlockFactoryExhausted, PreconditionError,
                      ResourceCapError, VerificationError)
from ..rational import as_fraction
from ..setsys import SetSystem
from .constants import constants_of


@dataclass
class Block:
    """One block ``x_j`` with its witnessing coordinate ``x_j(eta) = value``.

    ``end`` is the last rank the block occupies, counting ranks used only by
    its witness; the next block starts after it.
    """

    vector: DVector
    lo: int
    hi: int
    eta: GammaNode
    value: Fraction
    end: int

    @property
    def sign(self):
        return 1 if self.value > 0 else -1


class FillerFactory:
    """Unit vectors ``d_filler(m)``; the coordinate at ``filler(m)`` is 1."""

    cheap = True

    def make(self, rank: int) -> Block:
        node = filler(rank)
        return Block(DVector.unit(node), rank, rank, node, Fraction(1), rank)


@dataclass
class Budget:
    """Shared resource caps for one (possibly nested) construction."""

    max_rank: int = 100000
    max_nodes: int = 20000
    k_max: int = 256
    nodes: int = 0

    def charge(self, count: int):
        self.nodes += count
        if self.nodes > self.max_nodes:
            raise ResourceCapError(f"node count exceeds cap {self.max_nodes}")

    def check_rank(self, rank: int):
        if rank > self.max_rank:
            raise ResourceCapError(f"rank {rank} exceeds cap {self.max_rank}")


@dataclass
class GrowthCertificate:
    system: str
    params: BDParams
    epsilon: Fraction
    level: int
    chain: list  # (gamma_n, r(n)) with r(n) the number of blocks used so far
    blocks: list  # Block objects, scaled as used by the chain
    values: list  # v_n = e*_{gamma_n}(x_1 + ... + x_{r(n)})
    scale: Fraction = Fraction(1)  # multiply blocks by this to undo level scaling
    ks: list = field(default_factory=list)

    @property
    def top(self) -> GammaNode:
        return self.chain[-1][0]

    @property
    def top_value(self) -> Fraction:
        """Coordinate of the unscaled combined vector at the top node."""
        return self.values[-1] * self.scale

    @property
    def target(self) -> Fraction:
        return (self.params.theta - self.epsilon) ** self.level

    def combined(self, scaled: bool = False) -> DVector:
        total = DVector()
        for b in self.blocks:
            total = total + b.vector
        return total if scaled else total * self.scale

    def end_rank(self) -> int:
        return max([self.top.rank] + [b.end for b in self.blocks])

    def node_set(self) -> GenerationSet:
        nodes = [g for g, _ in self.chain]
        for b in self.blocks:
            nodes.append(b.eta)
            nodes.extend(b.vector.nodes())
        return GenerationSet(nodes)


def _rank_for(alpha, floor_rank, params, epsilon, rule):
    """Smallest usable ``q+1 >= floor_rank`` for these coefficients.

    ``apriori`` demands ``q+1 > 2 k theta / eps``, which forces
    ``sum h_i > (q+1)(1 - eps/(2 theta))``; ``tight`` asks for that last
    inequality directly.
    """
    k = len(alpha)
    need = 1 - epsilon / (2 * params.theta)
    r = floor_rank
    if rule == "apriori":
        r = max(r, math.floor(2 * k * params.theta / epsilon) + 1)
        return r
    if rule != "tight":
        raise PreconditionError(f"unknown rank rule {rule!r}")
    while sum(math.floor(r * a) for a in alpha) <= r * need:
        r += 1
    return r


def build_growth_certificate(sys: SetSystem, params: BDParams, epsilon, block_factory=None,
                             alpha_solver: Optional[Callable] = None, start_rank: int = 1,
                             rank_rule: str = "tight", budget: Optional[Budget] = None,
                             level: int = 1, scale=1) -> GrowthCertificate:
    """Run the chain construction and return an exactly checked certificate."""
    epsilon = as_fraction(epsilon)
    theta = params.theta
    if not 0 < epsilon < theta:
        raise PreconditionError("epsilon must satisfy 0 < epsilon < theta")
    factory = block_factory or FillerFactory()
    budget = budget or Budget()
    solver = alpha_solver or solve_alpha_blocks
    search = "gallop" if getattr(factory, "cheap", False) else "linear"
    need = 1 - epsilon / (2 * theta)
    step_gain = (theta - epsilon) / params.N

    blocks, chain, values, ks = [], [], [], []
    prev = None
    next_rank = start_rank
    for n in range(params.N):
        made = []

        def stream(start=next_rank, made=made):
            r = start
            while True:
                budget.check_rank(r)
                try:
                    b = factory.make(r)
                except BlockFactoryExhausted:
                    return
                if not (b.lo >= r and b.lo <= b.hi <= b.end):
                    raise PreconditionError("block factory returned a block outside the requested ranks")
                if not abs(b.value) > need:
                    raise PreconditionError(f"block coordinate {b.value} is not above {need}")
                made.append(b)
                yield (b.lo, b.hi)
                r = b.end + 1

        sol = solver(sys, params.omega, stream(), k_max=budget.k_max, search=search)
        if sol is None:
            if sys.finite_sets_only:
                raise ResourceCapError(f"no coefficients within k <= {budget.k_max} at step {n + 1} "
                                       f"of a level-{level} certificate starting at rank {start_rank}")
            raise AlphaNotFoundError(f"no coefficients with mass below {params.omega} for {sys.descriptor}")
        k = sol.k
        used = made[:k]
        ks.append(k)
        floor_rank = max(max(b.end for b in used), max(b.eta.rank for b in used)) + 1
        rank = _rank_for(sol.alpha, floor_rank, params, epsilon, rank_rule)
        budget.check_rank(rank)
        parts = [(b.sign, b.lo, b.hi, b.eta, math.floor(rank * a)) for b, a in zip(used, sol.alpha)]
        gamma = make_node(rank, "a" if prev is None else "b", parts, prev)
        validate_node(gamma, sys, params).raise_if_invalid()
        budget.charge(1 + k)
        blocks.extend(used)
        chain.append((gamma, len(blocks)))
        total = DVector()
        for b in blocks:
            total = total + b.vector
        v = CoordEvaluator(total, params).value(gamma)
        previous = values[-1] if values else Fraction(0)
        if not v - previous > step_gain:
            raise VerificationError(f"step {n + 1} gained {v - previous}, not above {step_gain}")
        values.append(v)
        prev = gamma
        next_rank = rank + 1
    if not values[-1] > theta - epsilon:
        raise VerificationError(f"top value {values[-1]} is not above {theta - epsilon}")
    return GrowthCertificate(sys.descriptor, params, epsilon, level, chain, blocks, values,
                             as_fraction(scale), ks)


class CertificateFactory:
    """Blocks made of lower-level certificates, each in its own rank window."""

    cheap = False

    def __init__(self, sys, params, epsilon, level, budget, rank_rule="tight"):
        self.sys, self.params, self.epsilon = sys, params, epsilon
        self.level, self.budget, self.rank_rule = level, budget, rank_rule

    def make(self, rank: int) -> Block:
        sub = _build_level(self.sys, self.params, self.epsilon, self.level, rank,
                           self.budget, self.rank_rule)
        factor = 1 / (self.params.theta - self.epsilon) ** self.level
        vec = sub.combined() * factor
        lo, hi = vec.range()
        value = CoordEvaluator(vec, self.params).value(sub.top)
        return Block(vec, lo, hi, sub.top, value, sub.end_rank())


def _build_level(sys, params, epsilon, level, start_rank, budget, rank_rule):
    factory = None
    if level > 1:
        factory = CertificateFactory(sys, params, epsilon, level - 1, budget, rank_rule)
    scale = (params.theta - epsilon) ** (level - 1)
    return build_growth_certificate(sys, params, epsilon, factory, start_rank=start_rank,
                                    rank_rule=rank_rule, budget=budget, level=level, scale=scale)


def iterate_growth(sys: SetSystem, params: BDParams, epsilon, level: int, max_level: int = 4,
                   budget: Optional[Budget] = None, rank_rule: str = "tight") -> GrowthCertificate:
    """Certificate whose top value exceeds ``(theta - eps)^level``."""
    epsilon = as_fraction(epsilon)
    if not params.theta - epsilon > 1:
        raise PreconditionError("iteration needs theta - epsilon > 1")
    if not 1 <= level <= max_level:
        raise PreconditionError(f"level must lie in 1..{max_level}")
    return _build_level(sys, params, epsilon, level, 1, budget or Budget(), rank_rule)


@dataclass
class VerifyReport:
    checks: dict = field(default_factory=dict)  # name -> (passed, detail)
    values: list = field(default_factory=list)
    top_value: Optional[Fraction] = None

    @property
    def ok(self):
        return all(p for p, _ in self.checks.values())

    def failures(self):
        return [name for name, (p, _) in self.checks.items() if not p]

    def raise_if_failed(self):
        if not self.ok:
            raise VerificationError("certificate fails " + ", ".join(self.failures()))


def verify_certificate(cert: GrowthCertificate, sys: SetSystem) -> VerifyReport:
    """Recompute every value from scratch and re-validate every node.

    Shares nothing with the builder beyond the node and vector types.
    """
    rep = VerifyReport()
    params, eps = cert.params, cert.epsilon
    theta, N = params.theta, params.N
    checks = rep.checks

    checks["system"] = (cert.system == sys.descriptor, f"certificate for {cert.system}")
    checks["epsilon"] = (0 < eps < theta, "0 < epsilon < theta")
    checks["length"] = (len(cert.chain) == N and len(cert.values) == N, f"chain of length {N}")
    checks["scale"] = (cert.scale == (theta - eps) ** (cert.level - 1), "scale (theta-eps)^(level-1)")
    if not checks["length"][0]:
        return rep

    blocks = cert.blocks
    ranges = []
    good = True
    for b in blocks:
        r = b.vector.range()
        if r is None or r != (b.lo, b.hi):
            good = False
        ranges.append((b.lo, b.hi))
    good = good and all(ranges[i][1] < ranges[i + 1][0] for i in range(len(ranges) - 1))
    checks["blocks"] = (good, "nonzero blocks with stated, successive ranges")

    need = 1 - eps / (2 * theta)
    ok = True
    for b in blocks:
        v = CoordEvaluator(b.vector, params).value(b.eta)
        if v != b.value or not abs(v) > need:
            ok = False
            break
    checks["block_values"] = (ok, f"|x_j(eta_j)| > {need} recomputed")

    G = cert.node_set()
    invalid = []
    for g in G:
        if not g.is_atom and not validate_node(g, sys, params, G).ok:
            invalid.append(g.id[:60])
    checks["nodes"] = (not invalid, f"{len(G)} nodes valid" if not invalid else f"invalid: {invalid[:3]}")

    structure = True
    prev_r = 0
    for n, (g, r) in enumerate(cert.chain, start=1):
        if g.age != n or (n == 1) != (g.kind == "a") or not prev_r < r <= len(blocks):
            structure = False
            break
        if n > 1 and g.base != cert.chain[n - 2][0]:
            structure = False
            break
        # the chain node sits strictly between its last block and the next one
        if not ranges[r - 1][1] < g.rank or (r < len(blocks) and not g.rank < ranges[r][0]):
            structure = False
            break
        step = {(b.lo, b.hi) for b in blocks[prev_r:r]}
        if not set(g.intervals()) <= step:
            structure = False
            break
        prev_r = r
    checks["chain"] = (structure, "ages 1..N, markers between blocks, parts on block ranges")

    gain = (theta - eps) / N
    values, total, used = [], DVector(), 0
    for g, r in cert.chain:
        for b in blocks[used:r]:
            total = total + b.vector
        used = r
        values.append(CoordEvaluator(total, params).value(g))
    rep.values = values
    checks["values"] = (values == list(cert.values), "recomputed values match")
    steps = all(values[i] - (values[i - 1] if i else 0) > gain for i in range(N))
    checks["growth"] = (steps, f"every step adds more than {gain}")
    checks["threshold"] = (values[-1] > theta - eps, f"v_N > {theta - eps}")

    combined = total * cert.scale
    top = CoordEvaluator(combined, params).value(cert.top)
    rep.top_value = top
    checks["top"] = (top > cert.target, f"top value {top} > {cert.target}")
    iso = constants_of(params).iso_bound
    biggest = max(abs(v) for v in values)
    checks["sandwich"] = (biggest * cert.scale <= iso * combined.l1(),
                          "explored coordinates within the l1 upper bound")
    return rep
