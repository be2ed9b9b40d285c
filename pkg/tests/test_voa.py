from __future__ import annotations

from fractions import Fraction

import pytest

from voak.kernel import ZERO, GradedElement, identity, mono_weight
from voak.voa import (
    CommAssocData,
    MixedInstanceError,
    NotHomogeneous,
    alpha,
    comm_assoc,
    complex_numbers,
    dual_numbers,
    element,
    from_header,
    heisenberg,
)

V1 = heisenberg(1)
V2 = heisenberg(2)
vac = V1.vacuum


def basis_elements(V, wmax):
    return [GradedElement.basis(k) for k in V.basis_upto(wmax)]


def test_heisenberg_structure():
    assert V1.omega == element((1, 1), (1, 1), coeff=Fraction(1, 2))
    assert V1.central_charge == 1
    assert len(heisenberg(3).basis(1)) == 3
    with pytest.raises(ValueError):
        heisenberg(0)


def test_alpha_mode_examples():
    assert V1.alpha_mode(1, 1, alpha()) == vac
    assert V1.alpha_mode(1, -2, vac) == alpha(1, 2)
    for v in basis_elements(V1, 4):
        assert V1.alpha_mode(1, 0, v) == ZERO
    with pytest.raises(IndexError):
        V1.alpha_mode(2, 1, vac)


def test_heisenberg_bracket():
    for i in (1, 2):
        for j in (1, 2):
            for m in range(1, 6):
                for n in range(1, 6):
                    for v in basis_elements(V2, 4):
                        lhs = V2.alpha_mode(i, m, V2.alpha_mode(j, -n, v)) - V2.alpha_mode(j, -n, V2.alpha_mode(i, m, v))
                        expected = v.scale(m) if (i == j and m == n) else ZERO
                        assert lhs == expected


def test_generator_field_is_alpha():
    for n in range(-4, 5):
        for v in basis_elements(V2, 3):
            assert V2.mode(alpha(2), n, v) == V2.alpha_mode(2, n, v)


def test_vacuum_field_is_identity():
    for n in range(-3, 3):
        for v in basis_elements(V1, 4):
            assert V1.mode(vac, n, v) == (v if n == -1 else ZERO)


def test_grading_and_finiteness():
    us = basis_elements(V2, 3)
    vs = basis_elements(V2, 3)
    for u in us:
        wu = mono_weight(next(iter(u)))
        for v in vs:
            wv = mono_weight(next(iter(v)))
            for n in range(-4, 5):
                out = V2.mode(u, n, v)
                assert all(mono_weight(k) == wu - n - 1 + wv for k in out)
                if n > wu - 1 + wv:
                    assert out == ZERO


def test_l0_is_weight():
    for V in (V1, V2):
        wmax = 8 if V is V1 else 5
        for k in V.basis_upto(wmax):
            v = GradedElement.basis(k)
            assert V.l_op(0, v) == v.scale(mono_weight(k))


def test_l_examples():
    assert V1.l_op(0, alpha()) == alpha()
    assert V1.l_op(-1, vac) == ZERO
    bracket = V1.l_op(2, V1.l_op(-2, vac)) - V1.l_op(-2, V1.l_op(2, vac))
    assert bracket == vac.scale(Fraction(1, 2))


def test_translation_on_low_weight():
    # L(-1) alpha(-1)1 = alpha(-2)1
    assert V1.l_op(-1, alpha()) == alpha(1, 2)


def test_mode_matrix_examples():
    assert V1.mode_matrix(alpha(), 1, 1) == ((Fraction(1),),)
    assert V1.mode_matrix(vac, -1, 3) == identity(len(V1.basis(3)))
    assert V1.mode_matrix(alpha(), 5, 2) == ()
    with pytest.raises(NotHomogeneous):
        V1.mode_matrix(vac + alpha(), 0, 1)


def test_mixed_instances_rejected():
    with pytest.raises(MixedInstanceError):
        V1.mode(alpha(2), 0, vac)
    C = comm_assoc(complex_numbers())
    with pytest.raises(MixedInstanceError):
        C.mode(alpha(), -1, C.vacuum)


def test_commutative_instances():
    C = comm_assoc(complex_numbers())
    one = C.vacuum
    assert C.mode(one, -1, one) == one
    assert C.central_charge == 0 and not C.omega
    D = comm_assoc(dual_numbers())
    x = GradedElement.basis(((2, 0),))
    assert D.mode(x, -1, x) == ZERO
    assert D.mode(x, -1, D.vacuum) == x
    assert D.mode(x, 0, D.vacuum) == ZERO
    assert all(D.weight(k) == 0 for k in D.basis(0)) and D.basis(1) == ()


def test_comm_assoc_validation():
    with pytest.raises(ValueError, match="commutative"):
        CommAssocData(2, [[[1, 0], [0, 1]], [[0, 0], [0, 0]]], 0)
    with pytest.raises(ValueError, match="unit"):
        CommAssocData(2, [[[0, 1], [0, 0]], [[0, 0], [0, 0]]], 0)
    # e1^2 = e1, e1 e2 = e2, e2^2 = e2: commutative, unital, associative
    ok = CommAssocData(2, [[[1, 0], [0, 1]], [[0, 1], [0, 1]]], 0)
    assert CommAssocData.from_json(ok.to_json()) == ok


def test_header_round_trip():
    assert from_header(V2.header()).header() == V2.header()
    assert from_header(comm_assoc(complex_numbers()).header()).kind == "commutative-associative"


def test_perturbed_copy_is_independent():
    P = V1.perturbed((), -1, ((1, 1),), alpha())
    assert P.mode(vac, -1, alpha()) == alpha().scale(2)
    assert V1.mode(vac, -1, alpha()) == alpha()
