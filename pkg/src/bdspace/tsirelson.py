"""Tsirelson-type norms over a compact system, computed exactly.

The norm of ``x`` is the least solution of

    ||x|| = max(||x||_inf, theta * sup sum_t ||E_t x||)

with the sup over admissible families of successive blocks.  Because the norm
is 1-unconditional and monotone in the support, blocks can be taken to be
intervals of the support, and the least solution can be built bottom-up over
support intervals: a family with two or more blocks only refers to strictly
shorter intervals, while one-block families never raise the value.

Scalars are scaled to integers so the inner loops avoid Fraction overhead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import kernels
from .errors import ParseError, PreconditionError
from .rational import as_fraction, lcm
from .setsys import (AdmissibilityWitness, SetSystem, interval_mask, is_admissible,
                     verify_witness)


# vectors -------------------------------------------------------------------

def fin_vector(coords) -> dict:
    """Normalize a mapping ``index -> scalar`` (zeros dropped)."""
    out = {}
    for n, v in dict(coords).items():
        n = int(n)
        if n < 1:
            raise PreconditionError("vector indices start at 1")
        v = as_fraction(v)
        if v:
            out[n] = v
    return dict(sorted(out.items()))


def parse_vector(text: str) -> dict:
    """Parse ``{3:1,4:-1/2}``."""
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ParseError("vector literal must be enclosed in braces", 0, text)
    body = s[1:-1].strip()
    out = {}
    if not body:
        return out
    offset = text.index("{") + 1
    for chunk in body.split(","):
        at = offset + text[offset:].index(chunk) if chunk in text[offset:] else offset
        if ":" not in chunk:
            raise ParseError("expected index:value", at, text)
        key, val = chunk.split(":", 1)
        try:
            n = int(key.strip())
        except ValueError:
            raise ParseError(f"bad index {key.strip()!r}", at, text) from None
        if n < 1:
            raise ParseError("vector indices start at 1", at, text)
        if n in out:
            raise ParseError(f"duplicate index {n}", at, text)
        try:
            out[n] = Fraction(val.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad value {val.strip()!r}", at, text) from None
        offset = at + len(chunk) + 1
    return fin_vector(out)


# certificates --------------------------------------------------------------

@dataclass
class NormingTree:
    value: Fraction
    sign: int = 0
    index: int = 0
    children: list = field(default_factory=list)
    family: tuple = ()
    witness: Optional[AdmissibilityWitness] = None

    @property
    def is_leaf(self):
        return not self.children

    def support(self):
        if self.is_leaf:
            return {self.index}
        out = set()
        for c in self.children:
            out |= c.support()
        return out

    def depth(self):
        return 0 if self.is_leaf else 1 + max(c.depth() for c in self.children)

    def functional(self, theta):
        """Coefficients ``n -> sign * theta^depth`` of the norming functional."""
        theta = as_fraction(theta)
        if self.is_leaf:
            return {self.index: Fraction(self.sign)}
        out = {}
        for c in self.children:
            for n, v in c.functional(theta).items():
                out[n] = out.get(n, 0) + theta * v
        return out


def verify_tree(tree: NormingTree, x, sys: SetSystem, theta) -> bool:
    """Recompute every value and re-check every admissibility witness."""
    x = fin_vector(x)
    theta = as_fraction(theta)

    def check(t):
        if t.is_leaf:
            return t.sign in (-1, 1) and t.value == t.sign * x.get(t.index, 0)
        if len(t.children) != len(t.family) or t.witness is None:
            return False
        if not verify_witness(sys, t.family, t.witness):
            return False
        total = 0
        for c, (lo, hi) in zip(t.children, t.family):
            if not all(lo <= n <= hi for n in c.support()):
                return False
            if not check(c):
                return False
            total += c.value
        return t.value == theta * total

    return check(tree)


# engine --------------------------------------------------------------------

class _Engine:
    """Interval DP on the compressed support of a nonnegative vector.

    ``vals`` are nonnegative integers (exact mode) or floats; ``tmul``
    multiplies by theta in the matching arithmetic.
    """

    def __init__(self, sys, positions, vals, tmul):
        self.sys = sys
        self.pos = positions
        self.vals = vals
        self.tmul = tmul
        n = len(vals)
        self.n = n
        self.f = [[None] * n for _ in range(n)]
        self.leaf = [[0] * n for _ in range(n)]
        self.split = [[None] * n for _ in range(n)]  # best family (blocks) or None

    def run(self):
        kind = self.sys.kind
        if kind == "schreier":
            self._schreier()
        elif kind == "singletons":
            self._fill(lambda i, j: None)
        elif kind == "full":
            self._fill(lambda i, j: (sum(self.vals[i:j + 1]), tuple((t, t) for t in range(i, j + 1))))
        else:
            self._generic()
        return self

    def _fill(self, best_family):
        n, vals = self.n, self.vals
        for i in range(n):
            m, arg = vals[i], i
            for j in range(i, n):
                if vals[j] > m:
                    m, arg = vals[j], j
                self.leaf[i][j] = arg
                got = best_family(i, j) if j > i else None
                self._set(i, j, m, got)

    def _set(self, i, j, m, got):
        if got is not None and got[0] >= 0:
            t = self.tmul(got[0])
            if t > m:
                self.f[i][j] = t
                self.split[i][j] = got[1]
                return
        self.f[i][j] = m

    def _schreier(self):
        n, vals, pos, f = self.n, self.vals, self.pos, self.f
        g2 = [[None] * n for _ in range(n)]
        memo = {}

        def q(a, j, c):
            # best split of a..j into exactly c consecutive blocks
            if c == 1:
                return f[a][j], ((a, j),)
            if c == j - a + 1:
                return sum(vals[a:j + 1]), tuple((t, t) for t in range(a, j + 1))
            key = (a, j, c)
            got = memo.get(key)
            if got is not None:
                return got
            best, arg = None, None
            for b in range(a, j - c + 2):
                rest, fam = q(b + 1, j, c - 1)
                v = f[a][b] + rest
                if best is None or v > best:
                    best, arg = v, ((a, b),) + fam
            memo[key] = (best, arg)
            return best, arg

        for i in range(n):
            f[i][i] = vals[i]
            self.leaf[i][i] = i
        for length in range(2, n + 1):
            for i in range(0, n - length + 1):
                j = i + length - 1
                a0 = self.leaf[i][j - 1]
                self.leaf[i][j] = j if vals[j] > vals[a0] else a0
                m = vals[self.leaf[i][j]]
                got = g2[i + 1][j] if length >= 3 else None
                c = min(pos[i], length)
                if c >= 2:
                    cand = q(i, j, c)
                    if got is None or cand[0] > got[0]:
                        got = cand
                g2[i][j] = got
                self._set(i, j, m, got)

    def _generic(self):
        n, vals, pos, f = self.n, self.vals, self.pos, self.f
        trace = self.sys.trace_masks(pos[-1])

        def gap(b, a):
            # admissible marker positions for a block starting at support index
            # a right after a block ending at b (b = -1: no previous block)
            lo = pos[b] + 1 if b >= 0 else 1
            return interval_mask(lo, pos[a]) if pos[a] >= lo else 0

        # g[i][j]: best family of >= 2 blocks inside i..j, as (value, blocks)
        g = [[None] * n for _ in range(n)]
        for i in range(n - 1, -1, -1):
            f[i][i] = vals[i]
            self.leaf[i][i] = i
            live = [t for t, A in enumerate(trace) if A & gap(-1, i)]
            # chains[t][b]: best chain of blocks starting at i, ending at b,
            # admissible through trace set t
            chains = {t: [None] * n for t in live}
            prev = {t: [None] * n for t in live}
            for j in range(i, n):
                best = g[i + 1][j] if i + 1 <= j else None
                if j > i:
                    a0 = self.leaf[i][j - 1]
                    self.leaf[i][j] = j if vals[j] > vals[a0] else a0
                    for t in live:
                        A = trace[t]
                        ch, pv_row = chains[t], prev[t]
                        ext = None
                        for a in range(i + 1, j + 1):
                            pv = pv_row[a]
                            if pv is None:
                                pv = (None, ())
                                for b in range(i, a):
                                    c = ch[b]
                                    if c is not None and A & gap(b, a) and (pv[0] is None or c[0] > pv[0]):
                                        pv = c
                                pv_row[a] = pv
                            if pv[0] is None:
                                continue
                            v = pv[0] + f[a][j]
                            if ext is None or v > ext[0]:
                                ext = (v, pv[1] + ((a, j),))
                        if ext is not None and (best is None or ext[0] > best[0]):
                            best = ext
                        ch[j] = ext
                    self._set(i, j, vals[self.leaf[i][j]], best)
                g[i][j] = best
                single = (f[i][j], ((i, j),))
                for t in live:
                    c = chains[t][j]
                    if c is None or single[0] > c[0]:
                        chains[t][j] = single


def _prepare(x):
    x = fin_vector(x)
    positions = list(x)
    mags = [abs(v) for v in x.values()]
    return x, positions, mags


def _exact_engine(x, sys, theta):
    x, positions, mags = _prepare(x)
    theta = as_fraction(theta)
    if not 0 < theta < 1:
        raise PreconditionError("theta must lie in (0, 1)")
    if not mags:
        return x, None, None
    d = 1
    for v in mags:
        d = lcm(d, v.denominator)
    p, qd = theta.numerator, theta.denominator
    scale = d * qd ** max(len(mags) - 1, 0)
    vals = [int(v * scale) for v in mags]

    def tmul(v):
        r, rem = divmod(v * p, qd)
        assert rem == 0, "scaled DP lost exactness"
        return r

    eng = _Engine(sys, positions, vals, tmul).run()
    return x, eng, scale


def tsirelson_norm(x, sys: SetSystem, theta=Fraction(1, 2)) -> Fraction:
    """Exact norm of a finitely supported vector."""
    _, eng, scale = _exact_engine(x, sys, theta)
    if eng is None:
        return Fraction(0)
    return Fraction(eng.f[0][eng.n - 1], scale)


def norming_certificate(x, sys: SetSystem, theta=Fraction(1, 2)) -> NormingTree:
    """A norming tree whose value is the exact norm of ``x``."""
    x, eng, scale = _exact_engine(x, sys, theta)
    if eng is None:
        raise ValueError("the zero vector has no norming tree")
    theta = as_fraction(theta)
    pos = eng.pos
    coords = list(x.values())

    def build(i, j):
        fam = eng.split[i][j]
        if fam is None:
            a = eng.leaf[i][j]
            sign = 1 if coords[a] > 0 else -1
            return NormingTree(value=abs(coords[a]), sign=sign, index=pos[a])
        family = tuple((pos[a], pos[b]) for a, b in fam)
        kids = [build(a, b) for a, b in fam]
        w = is_admissible(sys, family)
        assert w is not None, "DP chose an inadmissible family"
        return NormingTree(value=theta * sum(k.value for k in kids), children=kids,
                           family=family, witness=w)

    tree = build(0, eng.n - 1)
    assert tree.value == Fraction(eng.f[0][eng.n - 1], scale)
    return tree


def float_norm(values, positions, sys: SetSystem, theta) -> float:
    """Floating-point norm used to screen candidates before exact checks."""
    theta = float(theta)
    vals = [abs(float(v)) for v in values]
    if sys.kind == "schreier":
        return kernels.schreier_norm(vals, list(positions), theta)
    eng = _Engine(sys, list(positions), vals, lambda v: theta * v).run()
    return eng.f[0][eng.n - 1] if vals else 0.0


# flat vectors --------------------------------------------------------------

def _uniform(k):
    return [[Fraction(1)] * k]


def _harmonic(k):
    return [[Fraction(1, i) for i in range(1, k + 1)], [Fraction(1, k + 1 - i) for i in range(1, k + 1)]]


def _averaging(k):
    """Repeated-averaging profiles that put nested Schreier averages on 1..k."""
    out = []
    for start in range(1, min(k, 8) + 1):
        for order in (1, 2, 3):
            v = _repeated_average(start, order, k)
            if v is not None:
                out.append(v)
    return out


def _repeated_average(start, order, k):
    # order-1 average: uniform on the Schreier-maximal block starting at
    # ``start``; order-n: uniform average of consecutive order-(n-1) averages
    def block(s, level):
        if level == 0:
            return {s: Fraction(1)}, s
        pieces, nxt = [], s
        count = s
        for _ in range(count):
            if nxt > k:
                return None, None
            got, last = block(nxt, level - 1)
            if got is None:
                return None, None
            pieces.append(got)
            nxt = last + 1
        out = {}
        for p in pieces:
            for n, v in p.items():
                out[n] = out.get(n, 0) + v / len(pieces)
        return out, nxt - 1

    got, last = block(start, order)
    if got is None or last > k or last != k:
        return None
    return [got.get(n, Fraction(0)) for n in range(1, k + 1)]


GENERATORS = {"uniform": _uniform, "harmonic": _harmonic, "averaging": _averaging}


def find_flat_vector(sys: SetSystem, omega, cap_support: int, theta=Fraction(1, 2),
                     generators=("uniform", "harmonic", "averaging")):
    """Smallest ``k <= cap_support`` with a candidate beta on ``e_1..e_k`` such
    that ``||sum beta_i e_i|| < theta * omega * sum |beta_i|``.

    Returns ``(k, beta)`` or None.  Candidates are screened in floating point
    and accepted only after the exact norm confirms the strict inequality.
    """
    omega = as_fraction(omega)
    theta = as_fraction(theta)
    factor = theta * omega
    for k in range(1, cap_support + 1):
        positions = list(range(1, k + 1))
        for name in generators:
            for beta in GENERATORS[name](k):
                l1 = sum(abs(b) for b in beta)
                if l1 == 0:
                    continue
                approx = float_norm(beta, positions, sys, theta)
                if approx > float(factor * l1) * (1 + 1e-9):
                    continue
                x = {n: b for n, b in zip(positions, beta) if b}
                if tsirelson_norm(x, sys, theta) < factor * l1:
                    return k, list(beta)
    return None
