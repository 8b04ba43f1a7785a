import json
from dataclasses import replace
from fractions import Fraction

import pytest

from bdspace.bdcore import ATOM, BDParams, DVector, eval_coord, filler
from bdspace.bounds import (Budget, SkippedDecomposition, build_growth_certificate, constants_of,
                            dumps, iterate_growth, loads, read_certificate, skipped_sum_bound,
                            verify_certificate, write_certificate)
from bdspace.bounds.growth import _rank_for
from bdspace.errors import (AlphaNotFoundError, DecompositionError, ParseError,
                            PreconditionError, ResourceCapError)
from bdspace.setsys import full, schreier, singletons

P = BDParams(3, Fraction(7, 5), Fraction(1, 2))
EPS = Fraction(1, 10)


@pytest.fixture(scope="module")
def cert():
    return build_growth_certificate(schreier(), P, EPS)


def test_constants():
    c = constants_of(P)
    assert (c.iso_bound, c.proj_bound, c.C, c.c) == (15, 30, 440, Fraction(1, 30))
    assert c.check()
    assert constants_of(BDParams(3, Fraction(11, 10), Fraction(1, 2))).iso_bound == Fraction(15, 4)
    with pytest.raises(PreconditionError):
        BDParams(3, Fraction(3, 2), Fraction(1, 2))


def test_single_atom_block():
    dec = SkippedDecomposition([DVector({ATOM: Fraction(1, 15)})], (), ())
    bound, rep = skipped_sum_bound(dec, P, full())
    assert bound == 440 and rep.max_abs == Fraction(1, 15)


def test_skipped_filler_blocks():
    blocks = [DVector({filler(1): Fraction(1, 15)}), DVector({filler(3): Fraction(-1, 15)}),
              DVector({filler(6): Fraction(1, 30), filler(7): Fraction(1, 30)})]
    dec = SkippedDecomposition(blocks, (2, 5), (1, 2, 3, 4, 5))
    bound, rep = skipped_sum_bound(dec, P, full())
    assert rep.sampled == 5 and rep.max_abs <= bound
    assert dec.block_bounds == [1, 1, 1]


def test_not_skipped():
    blocks = [DVector({filler(2): Fraction(1, 15)}), DVector({filler(3): Fraction(1, 15)})]
    with pytest.raises(DecompositionError):
        skipped_sum_bound(SkippedDecomposition(blocks, (2,), (2,)), P, full())
    with pytest.raises(DecompositionError):
        # {2, 3, 4} is not a Schreier set
        blocks = [DVector({filler(r): Fraction(1, 15)}) for r in (1, 2, 3, 4)]
        skipped_sum_bound(SkippedDecomposition(blocks, (2, 3, 4), (2, 3, 4)), P, schreier())


def test_unscaled_blocks_rejected():
    dec = SkippedDecomposition([DVector({filler(2): 1})], (), ())
    with pytest.raises(PreconditionError):
        skipped_sum_bound(dec, P, full())


def test_schreier_certificate(cert):
    assert cert.ks[0] == 4
    assert cert.values[-1] > Fraction(13, 10)
    assert [g.age for g, _ in cert.chain] == [1, 2, 3]
    rep = verify_certificate(cert, schreier())
    assert rep.ok, rep.failures()
    total = cert.combined()
    assert rep.values[-1] == eval_coord(total, cert.top, P)


def test_singletons_certificate():
    params = BDParams(3, Fraction(7, 5), Fraction(2, 5))
    c = build_growth_certificate(singletons(), params, EPS)
    assert c.ks == [3, 3, 3]
    assert c.values == [Fraction(7, 15), Fraction(14, 15), Fraction(7, 5)]
    assert verify_certificate(c, singletons()).ok


def test_rank_rules():
    alpha = (Fraction(2, 5), Fraction(1, 5), Fraction(1, 5), Fraction(1, 5))
    # q + 1 > 2 k theta / epsilon with k = 4 forces rank >= 113
    assert _rank_for(alpha, 6, P, EPS, "apriori") == 113
    need = 1 - EPS / (2 * P.theta)

    def enough(r):
        return sum(r * a // 1 for a in alpha) > r * need
    tight = _rank_for(alpha, 6, P, EPS, "tight")
    assert enough(tight) and not any(enough(r) for r in range(6, tight))
    with pytest.raises(PreconditionError):
        _rank_for(alpha, 6, P, EPS, "other")


def test_full_fails_at_alpha():
    for omega in (Fraction(1, 4), Fraction(1, 2), Fraction(7, 10)):
        with pytest.raises(AlphaNotFoundError):
            build_growth_certificate(full(), BDParams(3, Fraction(7, 5), omega), EPS)


def test_preconditions():
    with pytest.raises(PreconditionError):
        build_growth_certificate(schreier(), P, Fraction(7, 5))
    with pytest.raises(PreconditionError):
        iterate_growth(schreier(), P, Fraction(1, 2), 2)
    with pytest.raises(PreconditionError):
        iterate_growth(schreier(), P, EPS, 9)


def test_budget_caps():
    with pytest.raises(ResourceCapError):
        build_growth_certificate(schreier(), P, EPS, budget=Budget(max_rank=50))
    with pytest.raises(ResourceCapError):
        build_growth_certificate(schreier(), P, EPS, budget=Budget(k_max=3))


def test_level_one_matches_builder(cert):
    again = iterate_growth(schreier(), P, EPS, 1)
    assert dumps(again) == dumps(cert)


def test_singletons_level_two():
    c = iterate_growth(singletons(), BDParams(3, Fraction(7, 5), Fraction(2, 5)), EPS, 2)
    rep = verify_certificate(c, singletons())
    assert rep.ok, rep.failures()
    assert c.top_value > Fraction(169, 100) == c.target


def test_tampering_detected(cert):
    bad = replace(cert, values=cert.values[:-1] + [cert.values[-1] + 1])
    assert "values" in verify_certificate(bad, schreier()).failures()
    assert "system" in verify_certificate(cert, full()).failures()


def test_certfile_round_trip(cert, tmp_path):
    text = dumps(cert)
    back = loads(text)
    assert dumps(back) == text
    assert verify_certificate(back, schreier()).ok
    path = tmp_path / "c.json"
    write_certificate(cert, path)
    assert dumps(read_certificate(path)) == text
    doc = json.loads(text)
    assert {"params", "epsilon", "chain", "blocks", "values"} <= set(doc)


def test_certfile_rejects_garbage():
    for text in ('{"format": "something-else"}', "not json"):
        with pytest.raises(ParseError):
            loads(text)
