from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lexmaxmin.dominance import (
    DominanceResult,
    OrderResult,
    d_dominance,
    disagreement_projection,
    leximin_compare,
    restrict,
    strictly_d_dominates,
)
from lexmaxmin.errors import DimensionMismatch

F = Fraction
U = tuple(F(k, 10) for k in (1, 2, 3, 4, 5))
V = tuple(F(k, 10) for k in (3, 3, 4, 1, 2))

unit = st.fractions(0, 1, max_denominator=12)


def vectors(n):
    return st.lists(unit, min_size=n, max_size=n).map(tuple)


pairs = st.integers(1, 6).flatmap(lambda n: st.tuples(vectors(n), vectors(n)))


def test_regression_pair_orders_disagree():
    assert leximin_compare(U, V) is OrderResult.STRICTLY_GREATER
    assert d_dominance(U, V) is DominanceResult.SECOND_STRICT
    assert disagreement_projection(U, V) == (F(1, 10), F(1, 5), F(3, 10), 1, 1)
    assert disagreement_projection(V, U) == (1, 1, 1, F(1, 10), F(1, 5))


def test_example1_comparisons():
    lex, ks, a = (F(3, 5), F(3, 5), F(7, 10)), (F(3, 5),) * 3, (1, 0, 0)
    assert leximin_compare(lex, ks) is OrderResult.STRICTLY_GREATER
    assert disagreement_projection(lex, a) == (F(3, 5), 1, 1)
    assert disagreement_projection(a, lex) == (1, 0, 0)
    assert d_dominance(lex, a) is DominanceResult.FIRST_STRICT


def test_unit_vectors_tie():
    assert leximin_compare((1, 0), (0, 1)) is OrderResult.EQUIVALENT
    assert d_dominance((1, 0), (0, 1)) is DominanceResult.MUTUAL_TIE


def test_length_mismatch():
    with pytest.raises(DimensionMismatch):
        leximin_compare((1, 2), (1,))
    with pytest.raises(DimensionMismatch):
        d_dominance((1, 2), (1,))


def test_restrict():
    assert restrict((F(1), F(2), F(3)), (3, 1)) == (F(3), F(1))


@given(pairs)
def test_leximin_compare_antisymmetric(pq):
    p, q = pq
    assert leximin_compare(p, q) is leximin_compare(q, p).flip()


@given(vectors(5), st.permutations(range(5)))
def test_permutation_is_equivalent(p, perm):
    assert leximin_compare(p, [p[i] for i in perm]) is OrderResult.EQUIVALENT


@given(pairs)
def test_projection_definition(pq):
    u, v = pq
    proj = disagreement_projection(u, v)
    for a, b, c in zip(u, v, proj):
        assert c == (a if a < b else 1)
    assert disagreement_projection(u, u) == (1,) * len(u)


@given(pairs)
def test_dominance_antisymmetric_and_total(pq):
    u, v = pq
    r = d_dominance(u, v)
    assert r in set(DominanceResult)
    assert not (strictly_d_dominates(u, v) and strictly_d_dominates(v, u))
    flip = {DominanceResult.FIRST_STRICT: DominanceResult.SECOND_STRICT,
            DominanceResult.SECOND_STRICT: DominanceResult.FIRST_STRICT,
            DominanceResult.MUTUAL_TIE: DominanceResult.MUTUAL_TIE}
    assert d_dominance(v, u) is flip[r]


@given(vectors(4))
def test_self_is_mutual_tie(u):
    assert d_dominance(u, u) is DominanceResult.MUTUAL_TIE
