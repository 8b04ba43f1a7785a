"""Dense tableau simplex over Fractions with lexicographic objectives.

Only what the minimax solver needs: equality-form problems ``A x = b``,
``x >= 0`` with ``b >= 0``, a sequence of objectives minimized one after the
other over the previous optimal face, and Bland's rule so degenerate pivots
cannot cycle.  Unit columns already present in ``A`` seed the basis, so
artificials are only added for rows that lack one.
"""

from fractions import Fraction
from math import gcd as _gcd

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


class _Tableau:
    def __init__(self, rows, rhs, ncols):
        self.rows = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.ncols = ncols
        self.basis = [None] * len(rows)
        self.blocked = set()
        self.obj = None  # reduced-cost row, last entry is -objective value

    def set_objective(self, cost):
        d = list(cost) + [_ZERO]
        for r, row in enumerate(self.rows):
            cb = cost[self.basis[r]]
            if cb:
                for j, v in enumerate(row):
                    if v:
                        d[j] -= cb * v
        self.obj = d

    def pivot(self, r, c):
        row = self.rows[r]
        p = row[c]
        if p != 1:
            row = [v / p for v in row]
            self.rows[r] = row
        nz = [(j, v) for j, v in enumerate(row) if v]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    for j, v in nz:
                        other[j] -= f * v
        if self.obj is not None:
            f = self.obj[c]
            if f:
                for j, v in nz:
                    self.obj[j] -= f * v
        self.basis[r] = c

    def optimize(self, max_pivots):
        d = self.obj
        for _ in range(max_pivots):
            basic = set(self.basis)
            enter = next((j for j in range(self.ncols)
                          if d[j] < 0 and j not in basic and j not in self.blocked), None)
            if enter is None:
                return
            best, leave = None, None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leave]):
                        best, leave = ratio, r
            if leave is None:
                raise Unbounded("objective unbounded below")
            self.pivot(leave, enter)
        raise RuntimeError("pivot limit reached")

    def solution(self):
        x = [_ZERO] * self.ncols
        for r, row in enumerate(self.rows):
            x[self.basis[r]] = row[-1]
        return x


def _unit_columns(rows, n):
    """Map row -> column index of a unit column with its 1 in that row."""
    found = {}
    m = len(rows)
    for j in range(n):
        nz = [r for r in range(m) if rows[r][j] != 0]
        if len(nz) == 1 and rows[nz[0]][j] == 1 and nz[0] not in found:
            found[nz[0]] = j
    return found


def lex_minimize(rows, rhs, objectives, max_pivots=100000):
    """Lexicographically minimize ``objectives`` subject to ``rows x = rhs``.

    Returns ``(x, values)`` with one optimal value per objective actually
    examined; stages stop early once the optimum is unique.
    """
    rows = [[Fraction(v) for v in r] for r in rows]
    rhs = [Fraction(b) for b in rhs]
    n = len(rows[0]) if rows else 0
    for i, b in enumerate(rhs):
        if b < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -b
    m = len(rows)
    units = _unit_columns(rows, n)
    missing = [r for r in range(m) if r not in units]
    na = len(missing)
    full_rows = []
    for r in range(m):
        extra = [_ONE if missing[a] == r else _ZERO for a in range(na)]
        full_rows.append(rows[r] + extra)
    tab = _Tableau(full_rows, rhs, n + na)
    for r in range(m):
        tab.basis[r] = units[r] if r in units else n + missing.index(r)
    if na:
        tab.set_objective([_ZERO] * n + [_ONE] * na)
        tab.optimize(max_pivots)
        if any(tab.rows[r][-1] != 0 for r in range(len(tab.rows)) if tab.basis[r] >= n):
            raise Infeasible("constraints are infeasible")
        tab.obj = None
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= n:
                col = next((j for j in range(n) if tab.rows[r][j] != 0), None)
                if col is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1
    tab.blocked = set(range(n, n + na))
    values = []
    for obj in objectives:
        cost = [Fraction(v) for v in obj] + [_ZERO] * na
        tab.set_objective(cost)
        tab.optimize(max_pivots)
        x = tab.solution()
        values.append(sum(c * v for c, v in zip(cost, x) if c))
        basic = set(tab.basis)
        tab.blocked |= {j for j in range(n) if j not in basic and tab.obj[j] > 0}
        if all(j in basic or j in tab.blocked for j in range(n)):
            break  # the optimal face is a single point
    return tab.solution()[:n], values


def solve_square(rows, rhs):
    """Exact solution of a consistent linear system with a unique solution.

    Rows may be redundant; returns None when the system is singular or
    inconsistent.  Integer inputs go through fraction-free elimination.
    """
    n = len(rows[0]) if rows else 0
    dens = 1
    for r, b in zip(rows, rhs):
        for v in list(r) + [b]:
            v = Fraction(v)
            dens = dens * v.denominator // _gcd(dens, v.denominator)
    m = [[int(Fraction(v) * dens) for v in r] + [int(Fraction(b) * dens)] for r, b in zip(rows, rhs)]
    pivots = []
    prev = 1
    row = 0
    for col in range(n):
        p = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if p is None:
            return None
        m[row], m[p] = m[p], m[row]
        piv = m[row][col]
        for i in range(len(m)):
            if i == row:
                continue
            f = m[i][col]
            if i > row:
                # Bareiss step keeps entries integral
                m[i] = [(piv * a - f * b) // prev for a, b in zip(m[i], m[row])]
            elif f:
                m[i] = [piv * a - f * b for a, b in zip(m[i], m[row])]
        pivots.append((row, col))
        prev = piv
        row += 1
    if any(any(v != 0 for v in m[i]) for i in range(row, len(m))):
        return None
    x = [_ZERO] * n
    for r, c in pivots:
        x[c] = Fraction(m[r][n], m[r][c])
    # rows above each pivot were combined without the Bareiss division, so
    # re-check the answer exactly rather than trusting the bookkeeping
    for rr, b in zip(rows, rhs):
        if sum(Fraction(a) * v for a, v in zip(rr, x) if a) != b:
            return None
    return x
