import random
from fractions import Fraction
from itertools import combinations

import pytest

from bdspace.errors import ParseError, PreconditionError, ResourceCapError
from bdspace.setsys import (brute_hit_mass, build_system, derived_system, finite_list, full,
                            interval_family, is_admissible, max_hit_mass, schreier, singletons,
                            truncation, verify_witness)

BUILTINS = [schreier(), singletons(), full(), finite_list([(1, 3, 5), (2, 4), (6,), (2, 7, 9, 11)])]


def _restrict(trace, q):
    return {tuple(n for n in s if n <= q) for s in trace}


@pytest.mark.parametrize("sys_", BUILTINS, ids=lambda s: s.descriptor)
def test_trace_coherence(sys_):
    for q2 in range(13):
        big = sys_.trace(q2)
        for q in range(q2 + 1):
            assert set(sys_.trace(q)) == _restrict(big, q)


def test_trace_coherence_derived():
    d = derived_system(schreier(), [(1, 2), (3, 3), (4, 6), (7, 8), (9, 11)])
    for q2 in range(6):
        for q in range(q2 + 1):
            assert set(d.trace(q)) == _restrict(d.trace(q2), q)


def test_schreier_trace_size_matches_enumeration():
    s = schreier()
    for q in range(12):
        assert s.trace_size(q) == len(s.trace(q))
        assert all(len(a) <= a[0] for a in s.trace(q) if a)


def test_trace_cap():
    with pytest.raises(ResourceCapError):
        schreier(trace_cap=100).trace(12)


def test_admissible_examples():
    w = is_admissible(schreier(), [(2, 2), (3, 4)])
    assert w.trace_set == (2, 3) and w.markers == (2, 3)
    assert verify_witness(schreier(), [(2, 2), (3, 4)], w)
    assert is_admissible(schreier(), [(1, 1), (2, 2), (3, 3)]) is None
    w = is_admissible(full(), [(1, 1), (3, 5), (7, 7)])
    assert w.markers == (1, 3, 7)
    assert is_admissible(singletons(), [(1, 1), (2, 2)]) is None


def test_zero_start_never_admissible():
    # a marker would have to be <= 0
    assert is_admissible(full(), [(0, 2), (3, 4)]) is None


def _random_family(rng, q):
    cuts = sorted(rng.sample(range(0, q + 1), rng.randint(1, min(5, q + 1))))
    fam, prev = [], -1
    for c in cuts:
        lo = rng.randint(prev + 1, c)
        fam.append((lo, c))
        prev = c
    return fam


def _brute_admissible(sys_, fam):
    q = fam[-1][1]
    prev = 0
    gaps = []
    for lo, hi in fam:
        gaps.append(set(range(prev + 1, lo + 1)))
        prev = hi
    return any(all(g & set(a) for g in gaps) for a in sys_.trace(q))


@pytest.mark.parametrize("sys_", BUILTINS, ids=lambda s: s.descriptor)
def test_admissibility_oracle(sys_):
    rng = random.Random(7)
    for _ in range(200):
        fam = _random_family(rng, rng.randint(1, 10))
        w = is_admissible(sys_, fam)
        assert (w is not None) == _brute_admissible(sys_, fam)
        if w is not None:
            assert verify_witness(sys_, fam, w)


def test_hit_mass_examples():
    assert max_hit_mass(schreier(), [(0, 1), (2, 3)], [1, 1])[0] == 1
    assert max_hit_mass(full(), [(1, 1), (2, 2), (3, 3)], [2, 3, 4])[0] == 9
    assert max_hit_mass(singletons(), [(1, 2), (3, 4)], [5, 7])[0] == 7


def test_hit_mass_agrees_with_brute_force():
    rng = random.Random(11)
    systems = [schreier(), singletons(), full()]
    cases = 0
    for _ in range(200):
        fam = _random_family(rng, rng.randint(0, 10))
        weights = [Fraction(rng.randint(0, 12), rng.randint(1, 5)) for _ in fam]
        for s in systems:
            value, arg = max_hit_mass(s, fam, weights)
            brute, _ = brute_hit_mass(s, fam, weights)
            assert value == brute
            q = fam[-1][1]
            assert s.is_member_trace(arg, max(q, max(arg, default=0)))
            hit = sum(w for (lo, hi), w in zip(fam, weights) if any(lo <= n <= hi for n in arg))
            assert hit == value
            cases += 1
    assert cases >= 500


def test_hit_mass_rejects_bad_weights():
    with pytest.raises(PreconditionError):
        max_hit_mass(schreier(), [(1, 1)], [-1])
    with pytest.raises(PreconditionError):
        max_hit_mass(schreier(), [(1, 1)], [1, 2])


def test_derived_examples():
    assert full_trace(derived_system(full(), [(1, 1), (3, 3)]), 2) == {(1, 2)}
    assert full_trace(derived_system(singletons(), [(1, 2), (3, 4)]), 2) == {(), (1,), (2,)}
    assert (1, 2) in full_trace(derived_system(schreier(), [(2, 2), (3, 3)]), 2)


def full_trace(s, q):
    return set(s.trace(q))


def test_derived_matches_definition():
    rng = random.Random(5)
    for _ in range(40):
        fam = _random_family(rng, rng.randint(1, 10))
        parent = rng.choice([schreier(), singletons(), full()])
        d = derived_system(parent, fam)
        k = len(fam)
        direct = {tuple(i + 1 for i, (lo, hi) in enumerate(fam) if any(lo <= n <= hi for n in a))
                  for a in parent.trace(fam[-1][1])}
        assert set(d.trace(k)) == direct


def test_truncation_has_same_traces():
    t = truncation(schreier(), 9)
    for q in range(10):
        assert t.trace(q) == schreier().trace(q)


@pytest.mark.parametrize("text", [
    "schreier", "singletons", "full", "finite:[{2},{1,3}]", "derived(schreier;[[1,2],[3,5]])",
    "derived(derived(full;[[1,1],[2,4]]);[[1,1]])",
])
def test_descriptor_round_trip(text):
    assert build_system(text).descriptor == text


@pytest.mark.parametrize("text", [
    "", "schreir", "finite:[{3,1}]", "finite:[{0}]", "finite:[]", "derived(full;[[2,1]])",
    "derived(full;[[1,3],[2,4]])", "schreier extra", "finite:[{1,2}",
])
def test_descriptor_rejects(text):
    with pytest.raises((ParseError, PreconditionError)):
        build_system(text)


def test_interval_family_validation():
    assert interval_family([(0, 0), (1, 3)]) == ((0, 0), (1, 3))
    with pytest.raises(PreconditionError):
        interval_family([(1, 3), (3, 4)])
    with pytest.raises(PreconditionError):
        interval_family([(2, 1)])


def test_systems_are_values():
    assert schreier() == build_system("schreier")
    assert len({schreier(), build_system("schreier"), full()}) == 2
    pairs = list(combinations(BUILTINS, 2))
    assert all(a != b for a, b in pairs)


def test_finite_descriptor_is_canonical():
    assert build_system("finite:[{1,3},{2}]").descriptor == "finite:[{2},{1,3}]"
