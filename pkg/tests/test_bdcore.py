import random
from fractions import Fraction

import pytest

from bdspace.bdcore import (ATOM, BDParams, Caps, DVector, GenerationSet, canonical_order, coords_of,
                            enumerate_pruned, eval_coord, filler, grow_generation, make_node,
                            materialize_extension, parse_node, project_d, restrict, validate_node)
from bdspace.errors import (InvalidNodeError, MissingCoordinateError, ParseError, PreconditionError,
                            UnresolvedReferenceError)
from bdspace.setsys import full, schreier, singletons, truncation

P = BDParams(3, Fraction(7, 5), Fraction(1, 2))


@pytest.fixture(scope="module")
def gens():
    return [grow_generation(s, P, max_rank=7, per_rank=40, seed=i)
            for i, s in enumerate([schreier(), singletons(), full()])]


def _rational(rng):
    return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


def test_params_validation():
    assert P.weight == Fraction(7, 15)
    for bad in [(2, Fraction(7, 5), Fraction(1, 2)), (3, Fraction(3, 2), Fraction(1, 2)),
                (3, 1, Fraction(1, 2)), (3, Fraction(7, 5), Fraction(5, 7))]:
        with pytest.raises(PreconditionError):
            BDParams(*bad)


def test_golden_ids():
    assert ATOM.id == "0"
    assert filler(1).id == "1|a|-|1|(1,0,0,0,1)"
    g = make_node(4, "a", [(1, 2, 3, ATOM, 1), (1, 0, 1, ATOM, 1)])
    assert g.id == "4|a|-|2|(1,0,1,0,1);(1,2,3,0,1)"
    b = make_node(5, "b", [(-1, 2, 4, filler(2), 2)], base=filler(1))
    assert b.id == "5|b|1|a|-|1|(1,0,0,0,1)|1|(-1,2,4,2|a|-|1|(1,0,0,0,1),2)"
    assert b.age == 2


def test_zero_weights_dropped():
    a = make_node(3, "a", [(1, 0, 0, ATOM, 1), (1, 1, 2, ATOM, 0)])
    assert a == filler(3) and a.id == filler(3).id


def test_parse_round_trip(gens):
    for G in gens:
        for n in G:
            assert parse_node(n.id) == n


@pytest.mark.parametrize("text", [
    "", "1|c|-|1|(1,0,0,0,1)", "1|a|-|1|(1,0,0,0,1)x", "1|a|-|2|(1,0,0,0,1)",
    "4|a|-|2|(1,2,3,0,1);(1,0,1,0,1)", "1|a|0|1|(1,0,0,0,1)", "1|a|-|1|(1,0,0,0,0)",
])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_node(text)


def test_canonical_order():
    assert canonical_order(filler(1), filler(2)) == -1
    assert canonical_order(filler(2), filler(1)) == 1
    assert canonical_order(filler(2), parse_node(filler(2).id)) == 0
    a = make_node(4, "a", [(1, 0, 0, ATOM, 1)])
    b = make_node(4, "b", [(1, 2, 3, ATOM, 1)], base=filler(1))
    assert canonical_order(a, b) == -1
    assert canonical_order(ATOM, filler(1)) == -1


def test_validate_examples():
    good = make_node(4, "a", [(1, 0, 1, ATOM, 1), (1, 2, 3, ATOM, 1)])
    assert validate_node(good, schreier(), P).ok
    heavy = make_node(4, "a", [(1, 0, 1, ATOM, 2), (1, 2, 3, ATOM, 2)])
    rep = validate_node(heavy, schreier(), P)
    assert rep.failures() == ["mass"]
    with pytest.raises(InvalidNodeError):
        rep.raise_if_invalid()
    # age(base) = N forbids a further form (b) step
    chain = filler(1)
    for r in (3, 5):
        chain = make_node(r, "b", [(1, r - 1, r - 1, ATOM, 1)], base=chain)
    assert chain.age == 3
    top = make_node(7, "b", [(1, 6, 6, ATOM, 1)], base=chain)
    assert validate_node(top, schreier(), P).failures() == ["age"]


def test_validate_structure():
    over = make_node(2, "a", [(1, 0, 0, ATOM, 3)])
    assert "budget" in validate_node(over, schreier(), P).failures()
    late = make_node(3, "a", [(1, 0, 3, ATOM, 1)])
    assert "intervals" in validate_node(late, schreier(), P).failures()
    low = make_node(4, "b", [(1, 1, 2, ATOM, 1)], base=filler(2))
    assert "intervals" in validate_node(low, schreier(), P).failures()
    G = GenerationSet([filler(1)])
    with pytest.raises(UnresolvedReferenceError):
        validate_node(make_node(4, "a", [(1, 2, 2, filler(2), 1)]), schreier(), P, G)
    with pytest.raises(PreconditionError):
        make_node(3, "b", [(1, 0, 0, ATOM, 1)])


def test_enumerate_examples():
    G = GenerationSet()
    caps = Caps(k_max=1, h_grid=(1,), interval_grid=((0, 0),), eta_grid=(ATOM,))
    got = enumerate_pruned(schreier(), P, 0, G, caps)
    assert [n.id for n in got] == ["1|a|-|1|(-1,0,0,0,1)", "1|a|-|1|(1,0,0,0,1)"]
    assert enumerate_pruned(schreier(), P, 0, G, Caps(h_grid=())) == []
    caps = Caps(k_max=2, h_grid=(1,), interval_grid=((1, 1), (2, 2)), eta_grid=(ATOM,), kinds=("a",))
    got = enumerate_pruned(full(), P, 3, G, caps)
    assert got and all(n.k == 1 for n in got)


def test_enumeration_canonical_and_valid(gens):
    for G in gens:
        G.check_closed()
        nodes = list(G)
        assert all(canonical_order(a, b) == -1 for a, b in zip(nodes, nodes[1:]))
        for n in nodes:
            assert n.age <= P.N


def test_trace_determinism():
    rng = random.Random(8)
    G = GenerationSet([filler(1), filler(2)])
    for q in range(2, 6):
        grid = [(lo, hi) for lo in range(q + 1) for hi in range(lo, q + 1) if rng.random() < 0.3]
        caps = Caps(k_max=2, h_grid=(1, 2), interval_grid=grid)
        a = enumerate_pruned(schreier(), P, q, G, caps)
        b = enumerate_pruned(truncation(schreier(), q), P, q, G, caps)
        assert [n.id for n in a] == [n.id for n in b]
        G = G.with_nodes(rng.sample(a, min(len(a), 4)))


def test_eval_coord_examples():
    g = make_node(5, "a", [(1, 2, 3, filler(3), 2)])
    assert eval_coord(DVector.unit(g), g, P) == 1
    assert eval_coord(DVector.unit(filler(3)), g, P) == P.weight * 2 / 5
    assert eval_coord(DVector.unit(make_node(6, "a", [(1, 0, 0, ATOM, 1)])), g, P) == 0
    G = GenerationSet([filler(1)])
    y = materialize_extension(G, 0, 1, {ATOM: 1}, P)
    assert y[filler(1)] == Fraction(7, 15)


def test_project_d_examples():
    g = filler(3)
    assert project_d(DVector.unit(g), 0, 3) == DVector.unit(g)
    assert not project_d(DVector.unit(g), 0, 2)
    x = DVector({ATOM: 2, g: 3})
    assert project_d(x, 1) == DVector({g: 3})
    assert x.range() == (0, 3) and x.l1() == 5


def test_coordinates_match_extension(gens):
    rng = random.Random(9)
    for G in gens:
        nodes = list(G)
        for _ in range(30):
            x = DVector({n: _rational(rng) for n in rng.sample(nodes, rng.randint(1, 5))})
            coords = coords_of(G, x, G.max_rank, P)
            for g in nodes:
                assert eval_coord(x, g, P) == coords[g]


def test_extension_bound_and_compatibility(gens):
    rng = random.Random(10)
    for G in gens:
        q = G.max_rank
        for _ in range(20):
            p = rng.randint(0, q - 1)
            s = rng.randint(p, q)
            x = {n: _rational(rng) for n in G.up_to(p)}
            direct = materialize_extension(G, p, q, x, P)
            mid = materialize_extension(G, p, s, x, P)
            assert materialize_extension(G, s, q, mid, P) == direct
            top = max(abs(v) for v in x.values())
            assert max(abs(v) for v in direct.values()) <= 15 * top


def test_d_diagonality(gens):
    rng = random.Random(11)
    for G in gens:
        q = G.max_rank
        nodes = list(G)
        for _ in range(20):
            x = DVector({n: _rational(rng) for n in rng.sample(nodes, rng.randint(1, 5))})
            p = rng.randint(0, q)
            whole = coords_of(G, x, q, P)
            via_ext = materialize_extension(G, p, q, restrict(whole, p), P)
            assert coords_of(G, project_d(x, 0, p), q, P) == via_ext


def test_missing_coordinate():
    G = GenerationSet([filler(1), filler(2)])
    with pytest.raises(MissingCoordinateError):
        materialize_extension(G, 1, 2, {ATOM: 1}, P)
