# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels.

Sets and intervals are bitmasks (bit n stands for the integer n) packed into
uint64, so callers must only route here when every mask fits in 64 bits and
integer weights cannot overflow int64.  ``_scan_py`` has the same semantics
for the general case.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport malloc, free

ctypedef fused weight_t:
    int64_t
    double


def hit_mass_scan(const uint64_t[:] sets, const uint64_t[:] blocks, const weight_t[:] weights):
    cdef Py_ssize_t n = sets.shape[0], k = blocks.shape[0]
    cdef Py_ssize_t idx, i, best_idx = -1
    cdef weight_t total, best = 0
    cdef uint64_t a
    for idx in range(n):
        a = sets[idx]
        total = 0
        for i in range(k):
            if a & blocks[i]:
                total += weights[i]
        if best_idx < 0 or total > best:
            best = total
            best_idx = idx
    if best_idx < 0:
        return 0, -1
    return best, best_idx


def first_admissible(const uint64_t[:] sets, const uint64_t[:] gaps):
    cdef Py_ssize_t n = sets.shape[0], k = gaps.shape[0]
    cdef Py_ssize_t idx, i
    cdef uint64_t a
    cdef bint ok
    for idx in range(n):
        a = sets[idx]
        ok = True
        for i in range(k):
            if not (a & gaps[i]):
                ok = False
                break
        if ok:
            return idx
    return -1


def schreier_hit_mass(const int64_t[:] his, const weight_t[:] weights):
    cdef Py_ssize_t k = his.shape[0]
    cdef Py_ssize_t j, t, pos, c, length = 0, best_j = -1
    cdef weight_t w, total, best = 0
    cdef weight_t* seen = <weight_t*> malloc((k + 1) * sizeof(weight_t))
    if seen == NULL:
        raise MemoryError()
    try:
        for j in range(k - 1, -1, -1):
            w = weights[j]
            if his[j] >= 1:
                c = his[j] - 1
                if c > length:
                    c = length
                total = w
                for t in range(c):
                    total += seen[t]
                if total > best or (total == best and best_j != -1):
                    best = total
                    best_j = j
            pos = 0
            while pos < length and seen[pos] >= w:
                pos += 1
            t = length
            while t > pos:
                seen[t] = seen[t - 1]
                t -= 1
            seen[pos] = w
            length += 1
    finally:
        free(seen)
    return best, best_j


cdef double _q(double* f, double* memo, const double[:] values, Py_ssize_t n,
               Py_ssize_t a, Py_ssize_t j, Py_ssize_t c):
    cdef Py_ssize_t b, t
    cdef double best, v, s
    if c == 1:
        return f[a * n + j]
    if c == j - a + 1:
        s = 0.0
        for t in range(a, j + 1):
            s += values[t]
        return s
    v = memo[(a * n + j) * (n + 1) + c]
    if v >= 0.0:
        return v
    best = -1.0
    for b in range(a, j - c + 2):
        v = f[a * n + b] + _q(f, memo, values, n, b + 1, j, c - 1)
        if v > best:
            best = v
    memo[(a * n + j) * (n + 1) + c] = best
    return best


def schreier_norm(const double[:] values, const int64_t[:] positions, double theta):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i, j, length, c, t
    cdef double g, v, m
    if n == 0:
        return 0.0
    cdef double* f = <double*> malloc(n * n * sizeof(double))
    cdef double* g2 = <double*> malloc(n * n * sizeof(double))
    cdef double* mx = <double*> malloc(n * n * sizeof(double))
    cdef double* memo = <double*> malloc(n * n * (n + 1) * sizeof(double))
    if f == NULL or g2 == NULL or mx == NULL or memo == NULL:
        free(f); free(g2); free(mx); free(memo)
        raise MemoryError()
    try:
        for t in range(n * n * (n + 1)):
            memo[t] = -1.0
        for i in range(n):
            f[i * n + i] = values[i]
            mx[i * n + i] = values[i]
            g2[i * n + i] = -1.0
        for length in range(2, n + 1):
            for i in range(0, n - length + 1):
                j = i + length - 1
                m = mx[i * n + j - 1]
                if values[j] > m:
                    m = values[j]
                mx[i * n + j] = m
                g = g2[(i + 1) * n + j] if length >= 3 else -1.0
                c = positions[i]
                if c > length:
                    c = length
                if c >= 2:
                    v = _q(f, memo, values, n, i, j, c)
                    if v > g:
                        g = v
                g2[i * n + j] = g
                if g >= 0.0 and theta * g > m:
                    f[i * n + j] = theta * g
                else:
                    f[i * n + j] = m
        return f[n - 1]
    finally:
        free(f); free(g2); free(mx); free(memo)
