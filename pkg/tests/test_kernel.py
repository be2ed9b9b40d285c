from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import colored_partition_count, partitions, rank_of
from voak.kernel import (
    VACUUM,
    ZERO,
    GradedElement,
    NotInAmbientSpan,
    Q,
    canonical,
    contains,
    det,
    echelonize,
    enumerate_basis,
    identity,
    inverse,
    mat,
    mat_from_json,
    mat_to_json,
    matmul,
    mono_from_json,
    mono_key,
    mono_to_json,
    mono_weight,
    nullspace,
    q_str,
    quotient_coords,
    rank,
)

a1 = ((1, 1),)


def e(*factors, c=1):
    return GradedElement.basis(canonical(factors), c)


def test_rationals_print_exactly():
    assert q_str(Fraction(6, 4)) == "3/2"
    assert q_str(Fraction(-4, 2)) == "-2"
    assert Q("3/6") == Fraction(1, 2)
    with pytest.raises(TypeError):
        Q(0.5)


def test_mono_weight():
    assert mono_weight(VACUUM) == 0
    assert mono_weight(canonical([(1, 1), (1, 3)])) == 4
    assert mono_weight(canonical([(2, 2), (1, 2)])) == 4


def test_canonical_order_descending_depth_then_index():
    assert canonical([(2, 1), (1, 3), (1, 1), (1, 2)]) == ((1, 3), (1, 2), (1, 1), (2, 1))


def test_enumerate_small_cases():
    assert len(enumerate_basis(1, 4)) == len(partitions(4)) == 5
    assert enumerate_basis(1, 0) == (VACUUM,)
    assert len(enumerate_basis(2, 2)) == 5
    with pytest.raises(ValueError):
        enumerate_basis(0, 1)


@pytest.mark.parametrize("rank_", [1, 2, 3])
def test_enumerate_matches_partition_oracle(rank_):
    for w in range(9):
        basis = enumerate_basis(rank_, w)
        assert len(basis) == colored_partition_count(rank_, w)
        assert len(set(basis)) == len(basis)
        assert all(canonical(m) == m and mono_weight(m) == w for m in basis)
        assert list(basis) == sorted(basis, key=mono_key)


def test_mono_json_round_trip():
    m = canonical([(2, 1), (1, 3)])
    assert mono_from_json(json.loads(json.dumps(mono_to_json(m)))) == m


def test_graded_element_drops_zeros():
    v = e((1, 1)) - e((1, 1))
    assert v == ZERO and not v
    w = GradedElement([(a1, Fraction(1)), (a1, Fraction(-1)), (VACUUM, Fraction(2))])
    assert dict(w) == {VACUUM: Fraction(2)}


def test_graded_element_components_and_json():
    v = e() + e((1, 1), (1, 1), c=Fraction(1, 2)) + e((1, 2))
    comps = v.homogeneous_components(mono_weight)
    assert set(comps) == {0, 2}
    assert len(comps[2]) == 2
    assert GradedElement.from_json(json.loads(json.dumps(v.to_json()))) == v


def test_echelonize_examples():
    assert echelonize([]).dim == 0
    v = e((1, 1))
    assert echelonize([v, v.scale(2)]).dim == 1
    S = echelonize([e((1, 1)) + e(), e()])
    assert set(S.basis) == {e((1, 1)), e()}


def test_contains_examples():
    S = echelonize([e((1, 1), (1, 1))])
    assert contains(S, ZERO)
    assert not contains(echelonize([]), e())
    assert contains(S, e((1, 1), (1, 1), c=3))


def test_quotient_coords_examples():
    ambient = [m for w in range(3) for m in enumerate_basis(1, w)]
    S = echelonize([e((1, 1), (1, 1)) - e()])
    assert quotient_coords(ambient, S, e((1, 1), (1, 1))) == quotient_coords(ambient, S, e())
    assert not any(quotient_coords(ambient, S, e((1, 1), (1, 1)) - e()))
    zero = echelonize([])
    v = e((1, 2)) + e(c=5)
    coords = quotient_coords(ambient, zero, v)
    assert sorted(c for c in coords if c) == [1, 5]
    with pytest.raises(NotInAmbientSpan):
        quotient_coords(ambient, S, e((1, 3)))


def _rref_invariant(S):
    piv = S.pivots
    for p, row in zip(piv, S.basis):
        assert row.get(p) == 1
        for other_p, other in zip(piv, S.basis):
            if other is not row:
                assert other.get(p) == 0


small_monos = st.sampled_from([m for w in range(4) for m in enumerate_basis(2, w)])
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
elements = st.lists(st.tuples(small_monos, coeffs), max_size=5).map(GradedElement)


@settings(max_examples=60, deadline=None)
@given(st.lists(elements, max_size=6))
def test_echelonize_is_idempotent_and_reduced(vs):
    S = echelonize(vs)
    _rref_invariant(S)
    again = echelonize(S.basis)
    assert again.basis == S.basis
    assert all(contains(S, v) for v in vs)
    keys = sorted({k for w in vs for k in w}, key=mono_key)
    expected = rank_of([[v.get(m) for m in keys] for v in vs]) if keys else 0
    assert S.dim == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(elements, max_size=4), elements, elements)
def test_quotient_coords_detects_cosets(gens, v1, v2):
    ambient = [m for w in range(4) for m in enumerate_basis(2, w)]
    S = echelonize(gens)
    same = quotient_coords(ambient, S, v1) == quotient_coords(ambient, S, v2)
    assert same == contains(S, v1 - v2)


@settings(max_examples=60, deadline=None)
@given(elements, elements, coeffs)
def test_arithmetic_stays_in_lowest_terms(v, w, c):
    for x in (v + w, v - w, v.scale(c)):
        for val in x.values():
            assert isinstance(val, Fraction) and val != 0


def test_dense_matrix_helpers():
    A = mat([[2, 1], [1, 1]])
    assert det(A) == 1
    assert matmul(A, inverse(A)) == identity(2)
    assert rank(mat([[1, 2], [2, 4]])) == 1
    ns = nullspace(mat([[1, 2], [2, 4]]))
    assert len(ns) == 1 and ns[0][0] + 2 * ns[0][1] == 0
    assert mat_from_json(json.loads(json.dumps(mat_to_json(A)))) == A
