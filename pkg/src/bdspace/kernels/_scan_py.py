"""Pure-Python reference implementations of the scan kernels.

These mirror ``_scan.pyx`` exactly (same tie-breaking, same return shapes) and
accept arbitrary Python ints, so they also serve as the overflow fallback.
"""


def hit_mass_scan(sets, blocks, weights):
    best = None
    best_idx = -1
    for idx, a in enumerate(sets):
        total = 0
        for b, w in zip(blocks, weights):
            if a & b:
                total += w
        if best is None or total > best:
            best = total
            best_idx = idx
    if best is None:
        return 0, -1
    return best, best_idx


def first_admissible(sets, gaps):
    for idx, a in enumerate(sets):
        for g in gaps:
            if not a & g:
                break
        else:
            return idx
    return -1


def schreier_hit_mass(his, weights):
    """Best Schreier hit mass for successive intervals with right ends ``his``.

    A Schreier set with minimum ``m`` holds at most ``m`` points, so the best
    choice puts ``m`` at the right end of some interval ``j`` and spends the
    remaining ``m - 1`` points on the heaviest intervals after ``j``.
    Returns ``(value, j)``; ``j == -1`` when nothing beats the empty set.
    """
    k = len(his)
    seen = []  # weights of intervals right of j, descending
    best = 0
    best_j = -1
    for j in range(k - 1, -1, -1):
        w = weights[j]
        if his[j] >= 1:
            c = his[j] - 1
            total = w
            for v in seen[:c]:
                total += v
            if total > best or (total == best and best_j != -1):
                best = total
                best_j = j
        pos = 0
        while pos < len(seen) and seen[pos] >= w:
            pos += 1
        seen.insert(pos, w)
    return best, best_j


def schreier_norm(values, positions, theta):
    """Floating-point Schreier/Tsirelson norm of a nonnegative vector.

    ``values[i]`` sits at support position ``positions[i]``.  Used only to
    screen candidates; exact answers come from the rational engine.
    """
    n = len(values)
    if n == 0:
        return 0.0
    f = [[0.0] * n for _ in range(n)]
    g2 = [[-1.0] * n for _ in range(n)]
    mx = [[0.0] * n for _ in range(n)]
    for i in range(n):
        f[i][i] = float(values[i])
        mx[i][i] = float(values[i])
    memo = {}

    def q(a, j, c):
        if c == 1:
            return f[a][j]
        if c == j - a + 1:
            return sum(values[a:j + 1])
        key = (a, j, c)
        got = memo.get(key)
        if got is not None:
            return got
        best = -1.0
        for b in range(a, j - c + 2):
            v = f[a][b] + q(b + 1, j, c - 1)
            if v > best:
                best = v
        memo[key] = best
        return best

    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length - 1
            mx[i][j] = max(mx[i][j - 1], float(values[j]))
            g = g2[i + 1][j] if length >= 3 else -1.0
            c = min(positions[i], length)
            if c >= 2:
                v = q(i, j, c)
                if v > g:
                    g = v
            g2[i][j] = g
            f[i][j] = max(mx[i][j], theta * g) if g >= 0 else mx[i][j]
    return f[0][n - 1]
