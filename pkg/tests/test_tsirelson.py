import random
from fractions import Fraction

import pytest

from oracles import brute_norm

from bdspace.errors import ParseError, PreconditionError
from bdspace.setsys import finite_list, full, schreier, singletons
from bdspace.tsirelson import (find_flat_vector, float_norm, norming_certificate, parse_vector,
                               tsirelson_norm, verify_tree)

HALF = Fraction(1, 2)
SYSTEMS = [schreier(), singletons(), full(), finite_list([(1, 4), (2, 3, 5), (6, 7)])]


def _vector(rng, top=7):
    support = rng.sample(range(1, top + 1), rng.randint(1, top))
    return {n: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 6)) for n in support}


def test_worked_example():
    assert tsirelson_norm({3: 1, 4: 1, 5: 1}, schreier(), HALF) == Fraction(3, 2)


def test_examples():
    assert tsirelson_norm({1: 1, 2: 1}, schreier(), HALF) == 1
    assert tsirelson_norm({2: 1, 3: 1}, schreier(), HALF) == 1
    assert tsirelson_norm({}, schreier(), HALF) == 0
    assert tsirelson_norm({1: 1, 2: 1, 3: 1}, full(), HALF) == Fraction(3, 2)
    assert tsirelson_norm({1: 1, 2: 1, 3: 1, 4: 1, 5: 1}, singletons(), HALF) == 1


@pytest.mark.parametrize("sys_", SYSTEMS, ids=lambda s: s.descriptor)
def test_matches_brute_force(sys_):
    rng = random.Random(2)
    for _ in range(40):
        x = _vector(rng)
        for theta in (HALF, Fraction(1, 3), Fraction(3, 4)):
            assert tsirelson_norm(x, sys_, theta) == brute_norm(x, sys_, theta)


def test_unconditional_and_sandwich():
    rng = random.Random(3)
    for _ in range(60):
        x = _vector(rng, 10)
        s = rng.choice(SYSTEMS[:3])
        v = tsirelson_norm(x, s, HALF)
        flipped = {n: (-c if rng.random() < 0.5 else c) for n, c in x.items()}
        assert tsirelson_norm(flipped, s, HALF) == v
        drop = rng.choice(list(x))
        smaller = {n: c for n, c in x.items() if n != drop}
        assert tsirelson_norm(smaller, s, HALF) <= v
        assert max(abs(c) for c in x.values()) <= v <= sum(abs(c) for c in x.values())


def test_monotone_in_system():
    rng = random.Random(4)
    for _ in range(60):
        x = _vector(rng, 10)
        a = tsirelson_norm(x, singletons(), HALF)
        b = tsirelson_norm(x, schreier(), HALF)
        c = tsirelson_norm(x, full(), HALF)
        assert a <= b <= c


def test_certificates_verify():
    rng = random.Random(5)
    for _ in range(40):
        x = _vector(rng, 12)
        s = rng.choice(SYSTEMS)
        tree = norming_certificate(x, s, HALF)
        assert tree.value == tsirelson_norm(x, s, HALF)
        assert verify_tree(tree, x, s, HALF)
        # the functional evaluates to the norm
        f = tree.functional(HALF)
        assert sum(v * x.get(n, 0) for n, v in f.items()) == tree.value


def test_tampered_certificate_fails():
    x = {3: 1, 4: 1, 5: 1}
    tree = norming_certificate(x, schreier(), HALF)
    assert not tree.is_leaf
    tree.value += 1
    assert not verify_tree(tree, x, schreier(), HALF)


def test_float_norm_close():
    rng = random.Random(6)
    for _ in range(30):
        x = _vector(rng, 12)
        pos = sorted(x)
        for s in (schreier(), full()):
            exact = tsirelson_norm(x, s, HALF)
            approx = float_norm([x[n] for n in pos], pos, s, HALF)
            assert abs(approx - float(exact)) < 1e-9


def test_parse_vector():
    assert parse_vector("{3:1, 4:-1/2}") == {3: 1, 4: Fraction(-1, 2)}
    assert parse_vector("{}") == {}
    for bad in ("3:1", "{0:1}", "{1:1,1:2}", "{a:1}", "{1:x}", "{1}"):
        with pytest.raises(ParseError):
            parse_vector(bad)


def test_negative_index_rejected():
    with pytest.raises(PreconditionError):
        tsirelson_norm({0: 1}, schreier(), HALF)


def test_flat_vector_examples():
    k, beta = find_flat_vector(singletons(), HALF, 16)
    assert k == 5 and beta == [1] * 5
    assert find_flat_vector(full(), HALF, 16) is None


def test_flat_vector_schreier():
    got = find_flat_vector(schreier(), HALF, 64)
    assert got is not None
    k, beta = got
    x = {n: b for n, b in enumerate(beta, 1) if b}
    assert tsirelson_norm(x, schreier(), HALF) < HALF * HALF * sum(abs(b) for b in beta)
