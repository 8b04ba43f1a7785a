"""Gamma nodes, parameters, canonical serialization and validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import InvalidNodeError, ParseError, PreconditionError, UnresolvedReferenceError
from ..rational import as_fraction
from ..setsys import SetSystem, max_hit_mass


@dataclass(frozen=True)
class BDParams:
    """Construction constants: ``N >= 3``, ``1 < theta < N/2``, ``0 < omega < 1/theta``."""

    N: int
    theta: Fraction
    omega: Fraction

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, int):
            raise PreconditionError("N must be an integer")
        object.__setattr__(self, "theta", as_fraction(self.theta))
        object.__setattr__(self, "omega", as_fraction(self.omega))
        if self.N < 3:
            raise PreconditionError("N must be at least 3")
        if not 1 < self.theta < Fraction(self.N, 2):
            raise PreconditionError("theta must satisfy 1 < theta < N/2")
        if not 0 < self.omega < 1 / self.theta:
            raise PreconditionError("omega must satisfy 0 < omega < 1/theta")

    @property
    def weight(self) -> Fraction:
        """The factor theta/N in front of every functional sum."""
        return self.theta / self.N


class GammaNode:
    """An element of the index set: the atom, or a tuple of form (a) or (b).

    ``parts`` holds ``(eps, lo, hi, eta, h)`` tuples, canonicalized: zero
    weights dropped and the rest sorted by ``(lo, hi, eps, eta, h)``.
    Equality and hashing go through the canonical id.
    """

    __slots__ = ("rank", "kind", "base", "parts", "id", "_key", "_age", "__weakref__")

    def __init__(self, rank, kind, parts=(), base=None):
        self.rank = int(rank)
        self.kind = kind
        self.base = base
        clean = []
        for eps, lo, hi, eta, h in parts:
            if h:
                clean.append((int(eps), int(lo), int(hi), eta, int(h)))
        clean.sort(key=lambda p: (p[1], p[2], p[0], p[3].key, p[4]))
        self.parts = tuple(clean)
        self._key = None
        self._age = None
        self.id = _serialize(self)

    @property
    def is_atom(self):
        return self.kind == "0"

    @property
    def k(self):
        return len(self.parts)

    @property
    def key(self):
        """Sort key realizing the canonical order."""
        if self._key is None:
            if self.is_atom:
                self._key = (0,)
            else:
                base = (0,) if self.base is None else (1, self.base.key)
                self._key = (self.rank + 1, 0 if self.kind == "a" else 1, base, self.k,
                             tuple((lo, hi, eps, eta.key, h) for eps, lo, hi, eta, h in self.parts))
        return self._key

    @property
    def age(self):
        if self._age is None:
            if self.is_atom:
                self._age = 0
            elif self.kind == "a" or self.base is None:
                self._age = 1
            else:
                self._age = self.base.age + 1
        return self._age

    def intervals(self):
        return tuple((lo, hi) for _, lo, hi, _, _ in self.parts)

    def weights(self):
        return tuple(h for *_, h in self.parts)

    def references(self):
        out = [eta for *_, eta, _ in self.parts]
        if self.base is not None:
            out.append(self.base)
        return out

    def __eq__(self, other):
        return isinstance(other, GammaNode) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        text = self.id if len(self.id) < 60 else self.id[:57] + "..."
        return f"GammaNode({text})"


def _serialize(node):
    if node.kind == "0":
        return "0"
    base = node.base.id if node.base is not None else "-"
    parts = ";".join(f"({eps},{lo},{hi},{eta.id},{h})" for eps, lo, hi, eta, h in node.parts)
    return f"{node.rank}|{node.kind}|{base}|{len(node.parts)}|{parts}"


ATOM = GammaNode.__new__(GammaNode)
ATOM.rank, ATOM.kind, ATOM.base, ATOM.parts = 0, "0", None, ()
ATOM._key, ATOM._age, ATOM.id = None, None, "0"


def make_node(rank, kind, parts, base=None) -> GammaNode:
    """Build a rank-``rank`` node; ``parts`` are ``(eps, lo, hi, eta, h)``."""
    if kind not in ("a", "b"):
        raise PreconditionError("kind must be 'a' or 'b'")
    if (kind == "b") != (base is not None):
        raise PreconditionError("form (b) nodes need a base node, form (a) nodes must not have one")
    return GammaNode(rank, kind, parts, base)


def filler(rank: int) -> GammaNode:
    """Always-valid node with the single part ``(+1, [0,0], atom, 1)``."""
    return make_node(rank, "a", [(1, 0, 0, ATOM, 1)])


class _IdParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.cache = {}

    def error(self, msg):
        raise ParseError(msg, self.pos, self.text)

    def expect(self, ch):
        if not self.text.startswith(ch, self.pos):
            self.error(f"expected {ch!r}")
        self.pos += len(ch)

    def integer(self):
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            self.pos = start
            self.error("expected integer")
        return int(self.text[start:self.pos])

    def node(self):
        start = self.pos
        rank = self.integer()
        if rank == 0:
            return ATOM
        self.expect("|")
        kind = self.text[self.pos:self.pos + 1]
        if kind not in ("a", "b"):
            self.error("expected node kind 'a' or 'b'")
        self.pos += 1
        self.expect("|")
        if self.text.startswith("-", self.pos):
            self.pos += 1
            base = None
        else:
            base = self.node()
        self.expect("|")
        k = self.integer()
        self.expect("|")
        parts = []
        for i in range(k):
            if i:
                self.expect(";")
            self.expect("(")
            eps = self.integer()
            self.expect(",")
            lo = self.integer()
            self.expect(",")
            hi = self.integer()
            self.expect(",")
            eta = self.node()
            self.expect(",")
            h = self.integer()
            self.expect(")")
            parts.append((eps, lo, hi, eta, h))
        key = self.text[start:self.pos]
        got = self.cache.get(key)
        if got is not None:
            return got
        try:
            node = make_node(rank, kind, parts, base)
        except PreconditionError as exc:
            raise ParseError(str(exc), start, self.text) from None
        if node.id != key:
            raise ParseError("node id is not in canonical form", start, self.text)
        self.cache[key] = node
        return node


def parse_node(text: str) -> GammaNode:
    """Inverse of ``node.id``; rejects non-canonical serializations."""
    p = _IdParser(text.strip())
    node = p.node()
    if p.pos != len(p.text):
        p.error("trailing input")
    return node


# validation ----------------------------------------------------------------

@dataclass
class ValidationReport:
    node_id: str
    checks: dict = field(default_factory=dict)  # name -> (passed, detail)

    @property
    def ok(self):
        return all(passed for passed, _ in self.checks.values())

    def failures(self):
        return [name for name, (passed, _) in self.checks.items() if not passed]

    def raise_if_invalid(self):
        if not self.ok:
            raise InvalidNodeError(f"node fails {', '.join(self.failures())}: {self.node_id[:80]}")


def validate_node(node: GammaNode, sys: SetSystem, params: BDParams, G=None) -> ValidationReport:
    """Check the budget, the system-mass bound and the structural rules.

    With a generation set ``G`` every reference must resolve inside it.
    """
    rep = ValidationReport(node.id)
    if node.is_atom:
        rep.checks["atom"] = (True, "the rank-0 atom")
        return rep
    if G is not None:
        for ref in node.references():
            if ref not in G:
                raise UnresolvedReferenceError(f"reference {ref.id[:80]} is not in the generation set")
    q = node.rank - 1
    parts = node.parts
    rep.checks["nonempty"] = (len(parts) >= 1, f"k = {len(parts)}")
    rep.checks["signs"] = (all(p[0] in (-1, 1) for p in parts), "eps in {-1, +1}")
    rep.checks["weights"] = (all(p[4] >= 0 for p in parts), "h >= 0")
    low = 0 if node.kind == "a" else (node.base.rank + 1 if node.base is not None else 0)
    prev = -1
    ok = True
    for _, lo, hi, _, _ in parts:
        if lo > hi or lo <= prev or lo < low or hi > q:
            ok = False
        prev = hi
    rep.checks["intervals"] = (ok, f"successive nonempty intervals inside [{low}, {q}]")
    rep.checks["eta_rank"] = (all(p[3].rank <= q for p in parts), f"eta ranks <= {q}")
    total = sum(p[4] for p in parts)
    rep.checks["budget"] = (total <= node.rank, f"sum h = {total} <= {node.rank}")
    if ok:
        mass, arg = max_hit_mass(sys, node.intervals(), node.weights())
        bound = params.omega * node.rank
        rep.checks["mass"] = (mass < bound, f"max hit mass {mass} < {bound} (attained at {list(arg)})")
    else:
        rep.checks["mass"] = (False, "skipped: intervals invalid")
    if node.kind == "a":
        rep.checks["base"] = (node.base is None, "form (a) has no base")
        rep.checks["age"] = (True, "age 1")
    else:
        xi = node.base
        good = xi is not None and not xi.is_atom and 1 <= xi.rank <= q - 1 and node.rank >= 3
        rep.checks["base"] = (good, "1 <= rank(base) <= q-1 and rank >= 3")
        rep.checks["age"] = (xi is not None and xi.age < params.N, f"age(base) < {params.N}")
    return rep
