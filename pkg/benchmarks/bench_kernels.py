"""Compare the compiled kernels with their pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same random inputs through both backends; results
are checked for equality before timings are printed.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

import numpy as np

from bdspace.kernels import _scan_py

try:
    from bdspace.kernels import _scan
except ImportError:
    _scan = None


def cases(rng):
    sets = [rng.getrandbits(40) for _ in range(20000)]
    blocks = [rng.getrandbits(40) for _ in range(12)]
    weights = [rng.randint(0, 1000) for _ in blocks]
    # only the last set meets the bit-41 gap, so the scan runs to the end
    gaps = [rng.getrandbits(40) for _ in range(5)] + [1 << 41]
    sets[-1] |= (1 << 42) - 1
    his = sorted(rng.sample(range(1, 5000), 1500))
    hweights = [rng.randint(0, 1000) for _ in his]
    pos = sorted(rng.sample(range(1, 60), 24))
    vals = [rng.random() for _ in pos]

    sets_a = np.asarray(sets, dtype=np.uint64)
    blocks_a = np.asarray(blocks, dtype=np.uint64)
    gaps_a = np.asarray(gaps, dtype=np.uint64)
    return [
        ("hit_mass_scan (20000 sets)",
         lambda: _scan_py.hit_mass_scan(sets, blocks, weights),
         lambda: _scan.hit_mass_scan(sets_a, blocks_a, np.asarray(weights, dtype=np.int64))),
        ("first_admissible (20000 sets)",
         lambda: _scan_py.first_admissible(sets, gaps),
         lambda: _scan.first_admissible(sets_a, gaps_a)),
        ("schreier_hit_mass (1500 intervals)",
         lambda: _scan_py.schreier_hit_mass(his, hweights),
         lambda: _scan.schreier_hit_mass(np.asarray(his, dtype=np.int64),
                                         np.asarray(hweights, dtype=np.int64))),
        ("schreier_norm (24 coordinates)",
         lambda: _scan_py.schreier_norm(vals, pos, 0.5),
         lambda: _scan.schreier_norm(np.asarray(vals), np.asarray(pos, dtype=np.int64), 0.5)),
    ]


END_TO_END = """
import time
from fractions import Fraction
from bdspace import kernels
from bdspace.bdcore import BDParams
from bdspace.bounds import build_growth_certificate
from bdspace.setsys import schreier
start = time.perf_counter()
build_growth_certificate(schreier(), BDParams(3, Fraction(7, 5), Fraction(1, 2)), Fraction(1, 10))
print(kernels.backend, time.perf_counter() - start)
"""


def end_to_end():
    """Seconds for one growth certificate under each backend (fresh processes)."""
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, BDSPACE_PURE_PYTHON=flag)
        run = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                             text=True, check=True)
        backend, seconds = run.stdout.split()
        out[backend] = float(seconds)
    return out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return abs(float(a) - float(b)) <= 1e-9 * max(1.0, abs(float(a)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _scan is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    print(f"{'kernel':36} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, py, cy in cases(random.Random(args.seed)):
        if not _same(py(), cy()):
            raise SystemExit(f"{name}: backends disagree")
        t_py = min(timeit.repeat(py, number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(cy, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:36} {t_py:10.3f} {t_cy:10.3f} {t_py / t_cy:7.1f}x")
    t = end_to_end()
    print(f"{'growth certificate (end to end)':36} {t['python'] * 1e3:10.1f} {t['cython'] * 1e3:10.1f} "
          f"{t['python'] / t['cython']:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
