import os
import random
import subprocess
import sys

import pytest

from bdspace import kernels
from bdspace.kernels import _scan_py

compiled = pytest.importorskip("bdspace.kernels._scan")
np = pytest.importorskip("numpy")


def _masks(rng, n, bits=20):
    return [rng.getrandbits(bits) for _ in range(n)]


def test_backend_selected():
    assert kernels.backend in ("cython", "python")


def test_hit_mass_scan_equivalence():
    rng = random.Random(1)
    for _ in range(300):
        sets = _masks(rng, rng.randint(0, 30))
        blocks = _masks(rng, rng.randint(0, 8))
        weights = [rng.randint(0, 50) for _ in blocks]
        want = _scan_py.hit_mass_scan(sets, blocks, weights)
        got = compiled.hit_mass_scan(np.asarray(sets, dtype=np.uint64),
                                     np.asarray(blocks, dtype=np.uint64),
                                     np.asarray(weights, dtype=np.int64))
        assert (int(got[0]), got[1]) == want
        assert kernels.hit_mass_scan(sets, blocks, weights) == want


def test_first_admissible_equivalence():
    rng = random.Random(2)
    for _ in range(300):
        sets = _masks(rng, rng.randint(0, 30), 12)
        gaps = _masks(rng, rng.randint(0, 4), 12)
        want = _scan_py.first_admissible(sets, gaps)
        got = compiled.first_admissible(np.asarray(sets, dtype=np.uint64), np.asarray(gaps, dtype=np.uint64))
        assert got == want == kernels.first_admissible(sets, gaps)


def test_schreier_hit_mass_equivalence():
    rng = random.Random(3)
    for _ in range(300):
        k = rng.randint(0, 25)
        his = sorted(rng.sample(range(0, 60), k))
        weights = [rng.randint(0, 9) for _ in range(k)]
        want = _scan_py.schreier_hit_mass(his, weights)
        got = compiled.schreier_hit_mass(np.asarray(his, dtype=np.int64), np.asarray(weights, dtype=np.int64))
        assert (int(got[0]), got[1]) == want


def test_schreier_norm_equivalence():
    rng = random.Random(4)
    for _ in range(100):
        k = rng.randint(1, 12)
        pos = sorted(rng.sample(range(1, 30), k))
        vals = [rng.random() for _ in range(k)]
        want = _scan_py.schreier_norm(vals, pos, 0.5)
        got = compiled.schreier_norm(np.asarray(vals), np.asarray(pos, dtype=np.int64), 0.5)
        assert got == pytest.approx(want, rel=1e-12)


def test_big_ints_fall_back():
    # masks beyond 64 bits and huge weights take the Python path
    sets = [1 << 70, (1 << 70) | 2]
    blocks = [1 << 70, 2]
    weights = [10 ** 30, 1]
    assert kernels.hit_mass_scan(sets, blocks, weights) == (10 ** 30 + 1, 1)
    assert kernels.first_admissible(sets, blocks) == 1


def test_pure_python_switch():
    code = ("from bdspace import kernels; from bdspace.setsys import schreier; "
            "from bdspace.tsirelson import tsirelson_norm; "
            "print(kernels.backend, tsirelson_norm({3: 1, 4: 1, 5: 1}, schreier()))")
    env = dict(os.environ, BDSPACE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "3/2"]
