"""Convex coefficients with small worst-case mass on every member of a system.

For a given ``k`` we solve

    min_alpha  max_{A}  sum_{i hit by A} alpha_i    (alpha >= 0, sum alpha = 1)

by constraint generation.  Rounds run in floating point (HiGHS) and only
steer the search: for small ``k`` the answer comes from an exact
lexicographic simplex on the generated constraints, for larger ``k`` from the
float basis's vertex solved exactly, and either is confirmed by an exact
separation call.  A ``k`` is rejected only with an exact certificate: a
probability vector ``y`` over hit patterns whose minimum coverage is at least
``omega`` bounds the optimum from below.  Schreier systems skip constraint
generation altogether (see :class:`SchreierWindowSolver`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

from .errors import PreconditionError
from .rational import as_fraction
from .setsys import SetSystem, interval_family, max_hit_mass
from .simplex import lex_minimize, solve_square

FLOAT_TOL = 1e-9
DUAL_DENOMINATOR = 10 ** 9
LEX_LIMIT = 16  # up to this k the exact lexicographic simplex picks alpha


@dataclass(frozen=True)
class AlphaSolution:
    k: int
    alpha: tuple
    value: Fraction
    argmax: tuple
    intervals: tuple = ()


@dataclass
class _KResult:
    value: Optional[Fraction]  # exact optimum when solved exactly
    lower: Fraction  # certified lower bound on the optimum
    alpha: Optional[tuple] = None
    argmax: tuple = ()


class MinimaxSolver:
    """Constraint-generation solver for one family of separation oracles.

    ``separate(k, weights)`` must return ``(value, pattern, argmax)`` where
    ``pattern`` is the set of indices ``1..k`` hit by the maximizer.
    """

    def __init__(self, separate: Callable, max_rounds: int = 10000):
        self.separate = separate
        self.max_rounds = max_rounds
        self.patterns = set()  # carried across k (restricted on use)
        self._forced = set()  # cuts found violated by an exact solution
        self.rounds = 0

    def _cuts(self, k):
        out = set()
        for p in self.patterns:
            r = frozenset(i for i in p if i <= k)
            if r:
                out.add(r)
        if not out:
            # every cut must be a genuine hit pattern; seed from uniform weights
            _, pattern, _ = self.separate(k, [1.0 / k] * k)
            self.patterns.add(frozenset(pattern))
            out.add(frozenset(pattern))
        return sorted(out, key=lambda s: (len(s), sorted(s)))

    @staticmethod
    def _float_lp(k, cuts):
        c = np.zeros(k + 1)
        c[k] = 1.0
        a_ub = np.zeros((len(cuts), k + 1))
        for r, s in enumerate(cuts):
            a_ub[r, [i - 1 for i in s]] = 1.0
        a_ub[:, k] = -1.0
        a_eq = np.ones((1, k + 1))
        a_eq[0, k] = 0.0
        res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(cuts)), A_eq=a_eq, b_eq=[1.0],
                      bounds=[(0, None)] * (k + 1), method="highs")
        if res.status != 0:
            raise RuntimeError(f"floating LP failed: {res.message}")
        return res.x[:k], res.x[k], -np.asarray(res.ineqlin.marginals)

    def _float_phase(self, k):
        """Float constraint generation; returns ``(cuts, duals)`` of the final LP.

        The LP only carries a working set of cuts; the rest of the pool is
        re-checked with one matrix product per round and the separation
        oracle runs only when no pooled cut is violated.
        """
        pool = self._cuts(k)
        index = {c: i for i, c in enumerate(pool)}
        rows = [self._row(k, c) for c in pool]
        uniform = np.full(k, 1.0 / k)
        cov = np.array([r @ uniform for r in rows])
        batch = max(2 * k, 16)
        active = [int(i) for i in np.argsort(-cov, kind="stable")[:batch]]
        for c in self._forced:
            r = frozenset(i for i in c if i <= k)
            if r in index and index[r] not in active:
                active.append(index[r])

        def add(c):
            if c not in index:
                index[c] = len(pool)
                pool.append(c)
                rows.append(self._row(k, c))
            if index[c] not in active:
                active.append(index[c])
                return True
            return False

        pruned_at = -1.0
        for _ in range(self.max_rounds):
            self.rounds += 1
            cuts = [pool[i] for i in active]
            alpha, t, duals = self._float_lp(k, cuts)
            alpha = np.maximum(alpha, 0.0)
            cov = np.vstack(rows) @ alpha
            viol = [i for i in np.argsort(-cov, kind="stable")[:batch]
                    if cov[i] > t + FLOAT_TOL and i not in active]
            # dropping cuts with slack leaves the optimum unchanged; doing it
            # only after t has grown rules out cycling between equal optima
            prune = len(active) > 3 * k and t > pruned_at + FLOAT_TOL
            if prune:
                pruned_at = t
                active = [i for i in active if cov[i] > t - FLOAT_TOL]
            if viol:
                active.extend(int(i) for i in viol)
                continue
            weights = [float(a) for a in alpha]
            value, pattern, _ = self.separate(k, weights)
            if value > t + FLOAT_TOL:
                self.patterns.add(frozenset(pattern))
                if add(frozenset(pattern)):
                    continue
            return cuts, duals, alpha
        raise RuntimeError("constraint generation did not converge")

    @staticmethod
    def _row(k, cut):
        r = np.zeros(k)
        r[[i - 1 for i in cut]] = 1.0
        return r

    def _dual_bound(self, k, cuts, duals):
        """Exact lower bound from rationalized dual weights."""
        y = [max(Fraction(float(v)).limit_denominator(DUAL_DENOMINATOR), Fraction(0)) for v in duals]
        total = sum(y)
        if total == 0:
            return Fraction(0)
        cover = [Fraction(0)] * (k + 1)
        for w, s in zip(y, cuts):
            if w:
                for i in s:
                    cover[i] += w
        return min(cover[1:]) / total

    def _exact(self, k, cuts):
        """Lex-min exact optimum over the current cuts: (t, alpha)."""
        nv = k + 1 + len(cuts)  # alpha_1..alpha_k, t, slacks
        rows, rhs = [], []
        for r, s in enumerate(cuts):
            row = [Fraction(0)] * nv
            for i in s:
                row[i - 1] = Fraction(1)
            row[k] = Fraction(-1)
            row[k + 1 + r] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(0))
        row = [Fraction(0)] * nv
        for i in range(k):
            row[i] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))
        objectives = []
        obj = [Fraction(0)] * nv
        obj[k] = Fraction(1)
        objectives.append(obj)
        for i in range(k):
            obj = [Fraction(0)] * nv
            obj[i] = Fraction(1)
            objectives.append(obj)
        x, values = lex_minimize(rows, rhs, objectives)
        return values[0], tuple(x[:k])

    def _crossover(self, k, cuts, duals, alpha_f):
        """Exact vertex named by the float basis: tight cuts, positive alphas."""
        t_f = max(sum(alpha_f[i - 1] for i in c) for c in cuts)
        tight = [c for c in cuts if sum(alpha_f[i - 1] for i in c) > t_f - 1e-9]
        support = [i for i in range(k) if alpha_f[i] > 1e-9]
        if not tight or not support:
            return None
        pos = {i: j for j, i in enumerate(support)}
        n = len(support) + 1  # alpha on the support, then t
        rows, rhs = [], []
        for c in tight:
            row = [0] * n
            for i in c:
                j = pos.get(i - 1)
                if j is not None:
                    row[j] = 1
            row[-1] = -1
            rows.append(row)
            rhs.append(0)
        rows.append([1] * (n - 1) + [0])
        rhs.append(1)
        x = solve_square(rows, rhs)
        if x is None or any(v < 0 for v in x[:-1]):
            return None
        alpha = [Fraction(0)] * k
        for i, j in pos.items():
            alpha[i] = x[j]
        return x[-1], tuple(alpha)

    def solve(self, k, omega=None) -> _KResult:
        """Exact optimum for this ``k`` (or an exact certificate it is >= omega).

        The float basis is first turned into an exact vertex; when that fails
        the exact lexicographic simplex runs on the tight cuts instead.
        """
        while True:
            cuts, duals, alpha_f = self._float_phase(k)
            lower = self._dual_bound(k, cuts, duals)
            if omega is not None and lower >= omega:
                return _KResult(None, lower)
            got = self._crossover(k, cuts, duals, alpha_f) if k > LEX_LIMIT else None
            if got is not None:
                t, alpha = got
                value, pattern, argmax = self.separate(k, list(alpha))
                if value <= t:
                    return _KResult(value, max(lower, Fraction(0)), alpha, argmax)
                self.patterns.add(frozenset(pattern))
                self._forced.add(frozenset(pattern))
                continue
            # a subset of valid cuts is still a relaxation, so its exact
            # optimum bounds the true one from below
            forced = {frozenset(i for i in c if i <= k) for c in self._forced} - {frozenset()}
            tight = [c for c, y in zip(cuts, duals) if y > 1e-9 or c in forced]
            tight.extend(sorted(forced - set(tight), key=lambda c: (len(c), sorted(c))))
            t, alpha = self._exact(k, tight)
            if omega is not None and t >= omega:
                return _KResult(None, t)
            value, pattern, argmax = self.separate(k, list(alpha))
            if value <= t:
                return _KResult(value, value, alpha, argmax)
            self.patterns.add(frozenset(pattern))
            self._forced.add(frozenset(pattern))


class SchreierWindowSolver:
    """Exact minimax for Schreier hit patterns without constraint generation.

    A set whose minimum lies in ``E_j`` can meet ``c_j = hi_j - 1`` later
    intervals, and ``c`` is nondecreasing.  Sorting any ``alpha`` into
    nonincreasing order never raises the worst mass (for a sorted window
    ``j..j+c_j`` take the ``j``-th smallest position among the ``j + c_j``
    largest entries: that position plus the later ones is admissible and
    weighs at least the window).  So it suffices to solve

        min t  s.t.  alpha_j + ... + alpha_{j+c_j} <= t,  alpha nonincreasing,

    a problem with ``O(k)`` rows.  Rejections carry an exact dual bound.
    """

    def __init__(self, his, separate):
        self.his = his  # k -> upper ends of the first k intervals
        self.separate = separate
        self.rounds = 0

    def _windows(self, k):
        his = self.his(k)
        return [(j, min(k - 1, j + his[j] - 1)) for j in range(k)]

    def _float_lp(self, k, windows):
        nw, nm = len(windows), k - 1
        a_ub = np.zeros((nw + nm, k + 1))
        for r, (lo, hi) in enumerate(windows):
            a_ub[r, lo:hi + 1] = 1.0
        for i in range(nm):
            a_ub[nw + i, i + 1] = 1.0
            a_ub[nw + i, i] = -1.0
        a_ub[:nw, k] = -1.0
        c = np.zeros(k + 1)
        c[k] = 1.0
        a_eq = np.ones((1, k + 1))
        a_eq[0, k] = 0.0
        res = linprog(c, A_ub=a_ub, b_ub=np.zeros(nw + nm), A_eq=a_eq, b_eq=[1.0],
                      bounds=[(0, None)] * (k + 1), method="highs")
        if res.status != 0:
            raise RuntimeError(f"floating LP failed: {res.message}")
        return np.maximum(res.x[:k], 0.0), res.x[k], -np.asarray(res.ineqlin.marginals)

    @staticmethod
    def _dual_bound(k, windows, duals):
        """``t >= sum_m b_m alpha_m >= min_m b_m`` for rationalized multipliers."""
        nw = len(windows)
        rat = [max(Fraction(float(v)).limit_denominator(DUAL_DENOMINATOR), Fraction(0)) for v in duals]
        y, z = rat[:nw], rat[nw:]
        total = sum(y)
        if total == 0:
            return Fraction(0)
        b = [Fraction(0)] * k
        for w, (lo, hi) in zip(y, windows):
            if w:
                for m in range(lo, hi + 1):
                    b[m] += w
        for i, w in enumerate(z):  # multiplier of alpha_{i+1} - alpha_i <= 0
            b[i + 1] += w
            b[i] -= w
        return min(b) / total

    def _crossover(self, k, windows, alpha_f, t_f):
        rows, rhs = [], []
        for lo, hi in windows:
            if alpha_f[lo:hi + 1].sum() > t_f - FLOAT_TOL:
                rows.append([1 if lo <= m <= hi else 0 for m in range(k)] + [-1])
                rhs.append(0)
        for i in range(k - 1):
            if alpha_f[i] - alpha_f[i + 1] < FLOAT_TOL:
                row = [0] * (k + 1)
                row[i], row[i + 1] = 1, -1
                rows.append(row)
                rhs.append(0)
        for i in range(k):
            if alpha_f[i] < FLOAT_TOL:
                row = [0] * (k + 1)
                row[i] = 1
                rows.append(row)
                rhs.append(0)
        rows.append([1] * k + [0])
        rhs.append(1)
        x = solve_square(rows, rhs)
        if x is None:
            return None
        alpha, t = x[:k], x[k]
        if any(v < 0 for v in alpha) or any(alpha[i] < alpha[i + 1] for i in range(k - 1)):
            return None
        if any(sum(alpha[lo:hi + 1]) > t for lo, hi in windows):
            return None
        return t, tuple(alpha)

    def _exact(self, k, windows):
        nw, nm = len(windows), k - 1
        nv = k + 1 + nw + nm
        rows, rhs = [], []
        for r, (lo, hi) in enumerate(windows):
            row = [0] * nv
            for m in range(lo, hi + 1):
                row[m] = 1
            row[k] = -1
            row[k + 1 + r] = 1
            rows.append(row)
            rhs.append(0)
        for i in range(nm):
            row = [0] * nv
            row[i + 1], row[i] = 1, -1
            row[k + 1 + nw + i] = 1
            rows.append(row)
            rhs.append(0)
        rows.append([1] * k + [0] * (nv - k))
        rhs.append(1)
        objectives = [[1 if j == k else 0 for j in range(nv)]]
        objectives += [[1 if j == i else 0 for j in range(nv)] for i in range(k)]
        x, values = lex_minimize(rows, rhs, objectives)
        return values[0], tuple(x[:k])

    def solve(self, k, omega=None) -> _KResult:
        self.rounds += 1
        windows = self._windows(k)
        alpha_f, t_f, duals = self._float_lp(k, windows)
        lower = self._dual_bound(k, windows, duals)
        if omega is not None and lower >= omega:
            return _KResult(None, lower)
        got = None
        if k > LEX_LIMIT:
            got = self._crossover(k, windows, alpha_f, t_f)
            if got is not None and omega is not None and got[0] >= omega:
                got = None  # an upper bound at or above omega settles nothing
        if got is None:
            got = self._exact(k, windows)
        t, alpha = got
        value, _, argmax = self.separate(k, list(alpha))
        if value != t:
            raise RuntimeError("window bound disagrees with exact separation")
        return _KResult(value, max(lower, Fraction(0)), alpha, argmax)


def _search(solver, omega, k_max, search, ensure=None):
    """First k in 1..k_max with optimum < omega, relying on monotonicity in k.

    ``ensure(k)`` (optional) reports whether k items are available; a k past
    the end of the stream counts as infeasible.
    """
    cache = {}

    def ok(k):
        if ensure is not None and not ensure(k):
            return False
        if k not in cache:
            cache[k] = solver.solve(k, omega)
        r = cache[k]
        return r.value is not None and r.value < omega

    if search == "linear":
        for k in range(1, k_max + 1):
            if ok(k):
                return k, cache[k]
        return None
    lo, hi = 0, None  # ok(lo) false (lo = 0 vacuous), ok(hi) true
    k = 1
    while True:
        if ok(k):
            hi = k
            break
        lo = k
        if k == k_max:
            return None
        k = min(2 * k, k_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi, cache[hi]


def _check_omega(omega):
    omega = as_fraction(omega)
    if not 0 < omega < 1:
        raise PreconditionError("omega must lie in (0, 1)")
    return omega


def solve_alpha(sys: SetSystem, omega, k_max: int, search: str = "gallop") -> Optional[AlphaSolution]:
    """Smallest ``k <= k_max`` admitting alpha with ``max_A sum_{i in A} alpha_i < omega``."""
    omega = _check_omega(omega)
    if k_max < 1:
        raise PreconditionError("k_max must be positive")

    def separate(k, weights):
        fam = tuple((i, i) for i in range(1, k + 1))
        value, arg = max_hit_mass(sys, fam, weights)
        return value, tuple(arg), arg

    if sys.kind == "schreier":
        solver = SchreierWindowSolver(lambda k: list(range(1, k + 1)), separate)
    else:
        solver = MinimaxSolver(separate)
    got = _search(solver, omega, k_max, search)
    if got is None:
        return None
    k, r = got
    return AlphaSolution(k, r.alpha, r.value, tuple(r.argmax), tuple((i, i) for i in range(1, k + 1)))


def solve_alpha_blocks(sys: SetSystem, omega, intervals, k_max: int = 64,
                       search: str = "linear") -> Optional[AlphaSolution]:
    """Like :func:`solve_alpha` but mass counts intervals ``E_i`` met by A.

    ``intervals`` is any iterable of successive intervals, consumed lazily:
    one interval per ``k`` under linear search, up to about twice the answer
    under gallop search.
    """
    omega = _check_omega(omega)
    it = iter(intervals)
    fam = []

    def ensure(k):
        while len(fam) < k:
            try:
                fam.append(tuple(next(it)))
            except StopIteration:
                return False
            interval_family(fam)
        return True

    def separate(k, weights):
        ensure(k)
        value, arg = max_hit_mass(sys, fam[:k], weights)
        return value, hits(k, arg), arg

    def hits(k, arg):
        return tuple(i + 1 for i, (lo, hi) in enumerate(fam[:k]) if any(lo <= n <= hi for n in arg))

    def his(k):
        ensure(k)
        return [hi for _, hi in fam[:k]]

    if sys.kind == "schreier" and ensure(1) and fam[0][1] >= 1:
        solver = SchreierWindowSolver(his, separate)
    else:
        solver = MinimaxSolver(separate)
    limit = k_max
    if search == "linear":
        for k in range(1, k_max + 1):
            if not ensure(k):
                return None
            r = solver.solve(k, omega)
            if r.value is not None and r.value < omega:
                break
        else:
            return None
    else:
        got = _search(solver, omega, limit, search, ensure)
        if got is None:
            return None
        k, r = got
    value, arg = max_hit_mass(sys, fam[:k], list(r.alpha))
    assert value == r.value and value < omega
    return AlphaSolution(k, r.alpha, value, tuple(arg), tuple(fam[:k]))


def harmonic_alpha(k):
    h = sum(Fraction(1, i) for i in range(1, k + 1))
    return tuple(Fraction(1, i) / h for i in range(1, k + 1))


def from_flat_vector(beta):
    """Normalize a flat vector into convex coefficients."""
    total = sum(abs(Fraction(b)) for b in beta)
    return tuple(abs(Fraction(b)) / total for b in beta)
