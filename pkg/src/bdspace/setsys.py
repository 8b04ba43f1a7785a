"""Compact set systems presented through their finite traces.

A system M is a closed family of subsets of {1, 2, ...}.  Everything here is
decided on the trace ``{A & {1..q} : A in M}``, which is enough for any
question that only looks at integers up to ``q``.

Intervals are ``(lo, hi)`` pairs of nonnegative integers.  The integer 0 is
never a member of any set, so an interval ``(0, 0)`` is never hit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from . import kernels
from .errors import ParseError, PreconditionError, ResourceCapError
from .rational import lcm

DEFAULT_TRACE_CAP = 1 << 20

KINDS = ("schreier", "singletons", "full", "finite", "derived")


def subset_key(s):
    """Canonical subset order: by size, then lexicographically."""
    return (len(s), tuple(s))


def mask_of(s):
    m = 0
    for n in s:
        m |= 1 << n
    return m


def interval_mask(lo, hi):
    return ((1 << (hi + 1)) - 1) ^ ((1 << lo) - 1)


def interval_family(pairs) -> tuple:
    """Validate and normalize a sequence of successive nonempty intervals."""
    fam = tuple((int(lo), int(hi)) for lo, hi in pairs)
    prev = -1
    for lo, hi in fam:
        if lo < 0 or hi < lo:
            raise PreconditionError(f"bad interval [{lo},{hi}]")
        if lo <= prev:
            raise PreconditionError("intervals must be successive")
        prev = hi
    return fam


@dataclass(frozen=True)
class AdmissibilityWitness:
    trace_set: tuple
    markers: tuple


class SetSystem:
    """Immutable compact system with memoized traces.

    Use :func:`build_system` or the module-level constructors rather than
    instantiating directly.
    """

    __slots__ = ("kind", "payload", "name", "trace_cap", "finite_sets_only", "_traces", "_masks")

    def __init__(self, kind, payload=None, name=None, trace_cap=DEFAULT_TRACE_CAP,
                 finite_sets_only=True):
        if kind not in KINDS:
            raise PreconditionError(f"unknown system kind {kind!r}")
        self.kind = kind
        self.payload = payload
        self.trace_cap = trace_cap
        self.finite_sets_only = finite_sets_only
        self._traces = {}
        self._masks = {}
        self.name = name or self.descriptor

    @property
    def descriptor(self) -> str:
        if self.kind in ("schreier", "singletons", "full"):
            return self.kind
        if self.kind == "finite":
            return "finite:[" + ",".join("{" + ",".join(map(str, s)) + "}" for s in self.payload) + "]"
        parent, fam = self.payload
        ivs = ",".join(f"[{lo},{hi}]" for lo, hi in fam)
        return f"derived({parent.descriptor};[{ivs}])"

    def __repr__(self):
        return f"SetSystem({self.descriptor!r})"

    def __eq__(self, other):
        return isinstance(other, SetSystem) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(self.descriptor)

    # traces ---------------------------------------------------------------

    def trace_size(self, q: int) -> Optional[int]:
        """Cardinality of trace(q) when it is known without enumerating."""
        if self.kind == "schreier":
            return 1 + sum(comb(q - m, j) for m in range(1, q + 1) for j in range(0, m))
        if self.kind == "singletons":
            return q + 1
        if self.kind == "full":
            return 1
        return None

    def trace(self, q: int) -> tuple:
        """Trace at ``q`` as a tuple of sorted tuples in canonical order."""
        if q < 0:
            raise PreconditionError("q must be nonnegative")
        got = self._traces.get(q)
        if got is not None:
            return got
        size = self.trace_size(q)
        if size is not None and size > self.trace_cap:
            raise ResourceCapError(f"trace({q}) of {self.descriptor} has {size} elements (cap {self.trace_cap})")
        fam = self._compute_trace(q)
        if len(fam) > self.trace_cap:
            raise ResourceCapError(f"trace({q}) of {self.descriptor} exceeds cap {self.trace_cap}")
        return self._traces.setdefault(q, fam)

    def trace_masks(self, q: int) -> tuple:
        got = self._masks.get(q)
        if got is None:
            got = self._masks.setdefault(q, tuple(mask_of(s) for s in self.trace(q)))
        return got

    def _compute_trace(self, q):
        if self.kind == "schreier":
            out = [()]
            for m in range(1, q + 1):
                rest = range(m + 1, q + 1)
                for j in range(0, min(m - 1, q - m) + 1):
                    for c in combinations(rest, j):
                        out.append((m,) + c)
            return tuple(sorted(out, key=subset_key))
        if self.kind == "singletons":
            return ((),) + tuple((n,) for n in range(1, q + 1))
        if self.kind == "full":
            return (tuple(range(1, q + 1)),)
        if self.kind == "finite":
            found = {tuple(n for n in s if n <= q) for s in self.payload}
            return tuple(sorted(found, key=subset_key))
        parent, fam = self.payload
        k = min(q, len(fam))
        if k == 0:
            return ((),)
        hi = fam[k - 1][1]
        blocks = [interval_mask(lo, h) for lo, h in fam[:k]]
        found = set()
        for a in parent.trace_masks(hi):
            found.add(tuple(i + 1 for i, b in enumerate(blocks) if a & b))
        return tuple(sorted(found, key=subset_key))

    def is_member_trace(self, s: Sequence[int], q: int) -> bool:
        """Whether ``s`` (sorted, within 1..q) belongs to trace(q)."""
        s = tuple(s)
        if any(n < 1 or n > q for n in s) or list(s) != sorted(set(s)):
            return False
        if self.kind == "schreier":
            return not s or len(s) <= s[0]
        if self.kind == "singletons":
            return len(s) <= 1
        if self.kind == "full":
            return s == tuple(range(1, q + 1))
        return s in set(self.trace(q))


# construction ---------------------------------------------------------------

def schreier(**kw) -> SetSystem:
    return SetSystem("schreier", **kw)


def singletons(**kw) -> SetSystem:
    return SetSystem("singletons", **kw)


def full(**kw) -> SetSystem:
    return SetSystem("full", finite_sets_only=False, **kw)


def finite_list(sets, **kw) -> SetSystem:
    norm = set()
    for s in sets:
        t = tuple(s)
        if any(not isinstance(n, int) or n <= 0 for n in t):
            raise PreconditionError("finite-list members must be positive integers")
        if list(t) != sorted(set(t)):
            t = tuple(sorted(set(t)))
        norm.add(t)
    if not norm:
        raise PreconditionError("a finite-list system needs at least one set")
    return SetSystem("finite", tuple(sorted(norm, key=subset_key)), **kw)


def truncation(sys: SetSystem, q: int) -> SetSystem:
    """Finite-list system with the same traces as ``sys`` up to ``q``."""
    return finite_list(sys.trace(q), trace_cap=sys.trace_cap)


def derived_system(sys: SetSystem, fam) -> SetSystem:
    """The system {A' : A in M} with A' = {i : E_i meets A}."""
    fam = interval_family(fam)
    return SetSystem("derived", (sys, fam), trace_cap=sys.trace_cap)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.pos, self.text)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, tok):
        self.ws()
        if not self.text.startswith(tok, self.pos):
            self.error(f"expected {tok!r}")
        self.pos += len(tok)

    def integer(self):
        self.ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        body = self.text[start:self.pos]
        if not body.lstrip("+-"):
            self.pos = start
            self.error("expected integer")
        return int(body), start

    def system(self, trace_cap):
        self.ws()
        for word in ("schreier", "singletons", "full"):
            if self.text.startswith(word, self.pos):
                self.pos += len(word)
                return {"schreier": schreier, "singletons": singletons, "full": full}[word](trace_cap=trace_cap)
        if self.text.startswith("finite", self.pos):
            self.pos += len("finite")
            self.expect(":")
            self.expect("[")
            sets = [self.set_literal()]
            while self.peek() == ",":
                self.pos += 1
                sets.append(self.set_literal())
            self.expect("]")
            return finite_list(sets, trace_cap=trace_cap)
        if self.text.startswith("derived", self.pos):
            self.pos += len("derived")
            self.expect("(")
            parent = self.system(trace_cap)
            self.expect(";")
            self.expect("[")
            ivs = [self.interval()]
            while self.peek() == ",":
                self.pos += 1
                ivs.append(self.interval())
            self.expect("]")
            self.expect(")")
            prev = -1
            for lo, hi, at in ivs:
                if lo <= prev:
                    raise ParseError("intervals must be successive", at, self.text)
                prev = hi
            return derived_system(parent, [(lo, hi) for lo, hi, _ in ivs])
        self.error("unknown system kind")

    def set_literal(self):
        self.expect("{")
        out = []
        if self.peek() == "}":
            self.pos += 1
            return ()
        while True:
            n, at = self.integer()
            if n <= 0:
                raise ParseError("set elements must be positive integers", at, self.text)
            if out and n <= out[-1]:
                raise ParseError("set elements must be strictly increasing", at, self.text)
            out.append(n)
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("}")
            return tuple(out)

    def interval(self):
        self.expect("[")
        lo, at = self.integer()
        self.expect(",")
        hi, _ = self.integer()
        self.expect("]")
        if lo < 0 or hi < lo:
            raise ParseError(f"bad interval [{lo},{hi}]", at, self.text)
        return lo, hi, at


def build_system(text: str, trace_cap: int = DEFAULT_TRACE_CAP) -> SetSystem:
    """Parse a system descriptor such as ``schreier`` or ``finite:[{1,3},{2}]``."""
    p = _Parser(text)
    sys = p.system(trace_cap)
    p.ws()
    if p.pos != len(text):
        p.error("trailing input")
    return sys


# admissibility -------------------------------------------------------------

def _gap_masks(fam):
    out = []
    prev = 0
    for lo, hi in fam:
        out.append(interval_mask(prev + 1, lo) if lo >= prev + 1 else 0)
        prev = hi
    return out


def is_admissible(sys: SetSystem, fam) -> Optional[AdmissibilityWitness]:
    """Witness that ``fam`` is M-admissible, or None.

    Marker ``m_i`` must lie in ``(max E_{i-1}, min E_i]`` (with ``max E_0 = 0``)
    and all markers must come from one trace set.
    """
    fam = interval_family(fam)
    k = len(fam)
    if k == 0:
        return AdmissibilityWitness(sys.trace(0)[0], ())
    if fam[0][0] < 1:
        return None  # m_1 <= min E_1 = 0 is impossible inside {1, 2, ...}
    q = fam[-1][1]
    los = tuple(lo for lo, _ in fam)
    if sys.kind == "schreier":
        if k <= los[0]:
            return AdmissibilityWitness(los, los)
        return None
    if sys.kind == "singletons":
        if k == 1:
            return AdmissibilityWitness(los, los)
        return None
    if sys.kind == "full":
        return AdmissibilityWitness(tuple(range(1, q + 1)), los)
    gaps = _gap_masks(fam)
    idx = kernels.first_admissible(sys.trace_masks(q), gaps)
    if idx < 0:
        return None
    a = sys.trace(q)[idx]
    markers = []
    prev = 0
    for lo, hi in fam:
        markers.append(max(n for n in a if prev < n <= lo))
        prev = hi
    return AdmissibilityWitness(a, tuple(markers))


def verify_witness(sys: SetSystem, fam, w: AdmissibilityWitness) -> bool:
    fam = interval_family(fam)
    if len(w.markers) != len(fam):
        return False
    q = fam[-1][1] if fam else 0
    if not sys.is_member_trace(w.trace_set, q):
        return False
    members = set(w.trace_set)
    prev = 0
    for m, (lo, hi) in zip(w.markers, fam):
        if m not in members or not (prev < m <= lo):
            return False
        prev = hi
    return True


# hit mass ------------------------------------------------------------------

def _integerize(weights):
    """Integer weights sharing one denominator, or floats untouched."""
    if any(isinstance(w, float) for w in weights):
        return [float(w) for w in weights], None
    fr = [Fraction(w) for w in weights]
    d = 1
    for w in fr:
        d = lcm(d, w.denominator)
    return [int(w * d) for w in fr], d


def _unscale(value, d):
    if d is None:
        return value
    return Fraction(value, d)


def brute_hit_mass(sys: SetSystem, fam, weights):
    """Maximum over the whole trace; the reference the fast paths must match."""
    fam = interval_family(fam)
    q = max((hi for _, hi in fam), default=0)
    ints, d = _integerize(list(weights))
    blocks = [interval_mask(lo, hi) for lo, hi in fam]
    best, idx = kernels.hit_mass_scan(sys.trace_masks(q), blocks, ints)
    return _unscale(best, d), sys.trace(q)[idx]


def schreier_candidates(fam, weights):
    """For each interval j, the best Schreier set whose minimum lies in E_j.

    Returns ``(value, set)`` pairs, one per interval with ``hi >= 1``; their
    maximum is the Schreier hit mass.  Used to add many cuts at once.
    """
    out = []
    his = [hi for _, hi in fam]
    order = []  # later intervals sorted by (-weight, index)
    for j in range(len(fam) - 1, -1, -1):
        if his[j] >= 1:
            picks = order[:his[j] - 1]
            value = weights[j] + sum(weights[i] for i in picks)
            out.append((value, tuple(sorted([his[j]] + [fam[i][0] for i in picks]))))
        w = weights[j]
        pos = 0
        while pos < len(order) and (weights[order[pos]] > w or (weights[order[pos]] == w and order[pos] < j)):
            pos += 1
        order.insert(pos, j)
    out.reverse()
    return out


def max_hit_mass(sys: SetSystem, fam, weights):
    """``max_A sum{h_i : E_i meets A}`` with a maximizing trace set."""
    fam = interval_family(fam)
    weights = list(weights)
    if len(weights) != len(fam):
        raise PreconditionError("one weight per interval is required")
    if any(w < 0 for w in weights):
        raise PreconditionError("weights must be nonnegative")
    q = max((hi for _, hi in fam), default=0)
    if sys.kind == "schreier":
        ints, d = _integerize(weights)
        his = [hi for _, hi in fam]
        best, j = kernels.schreier_hit_mass(his, ints)
        if j < 0:
            return _unscale(best, d), ()
        c = his[j] - 1
        later = sorted(range(j + 1, len(fam)), key=lambda i: (-ints[i], i))[:c]
        arg = tuple(sorted([his[j]] + [fam[i][0] for i in later]))
        return _unscale(best, d), arg
    if sys.kind == "singletons":
        best, arg = 0, ()
        for (lo, hi), w in zip(fam, weights):
            if hi >= 1 and w > best:
                best, arg = w, (hi,)
        return best, arg
    if sys.kind == "full":
        total = sum((w for (lo, hi), w in zip(fam, weights) if hi >= 1), 0)
        return total, tuple(range(1, q + 1))
    return brute_hit_mass(sys, fam, weights)
