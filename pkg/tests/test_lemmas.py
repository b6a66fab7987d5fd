from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from tarry.exponents import ShapeError
from tarry.lemmas import (
    classify_blocks,
    closed_form_det,
    closed_form_factor,
    expected_lemma1_structure,
    hessian_matrix,
    mixed_bound_holds,
    monomial_hessian_det,
    verify_lemma1,
    verify_lemma2,
)
from tarry.structure import two_var_matrix

from oracles import det_leibniz


@pytest.mark.parametrize("kvec,A,det", [
    ((1, 1), [[0, 1], [1, 0]], -1),
    ((2, 1), [[2, 2], [2, 0]], -4),
])
def test_hessian_examples(kvec, A, det):
    assert hessian_matrix(kvec, (1, 1)) == A
    assert monomial_hessian_det(kvec, (1, 1)) == det
    assert closed_form_det(kvec, (1, 1)) == det


def test_three_variable_closed_form():
    assert closed_form_det((1, 1, 1), (1, 1, 1)) == 2
    x = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 7))
    assert closed_form_det((1, 1, 1), x) == 2 * x[0] * x[1] * x[2]


@given(st.lists(st.integers(1, 4), min_size=2, max_size=4),
       st.lists(st.fractions(Fraction(1, 16), 1, max_denominator=64), min_size=4, max_size=4))
def test_identity_exact(kvec, xs):
    pt = xs[:len(kvec)]
    A = hessian_matrix(kvec, pt)
    assert det_leibniz(A) == closed_form_det(kvec, pt)


@given(st.lists(st.integers(1, 6), min_size=2, max_size=6))
def test_factor_nonzero(kvec):
    assert closed_form_factor(kvec) != 0


@pytest.mark.parametrize("kvec", [(1,), (0, 2), (2, -1)])
def test_bad_exponents(kvec):
    with pytest.raises(ShapeError):
        closed_form_factor(kvec)


def test_zero_coordinate():
    with pytest.raises(ValueError):
        hessian_matrix((1, 2), (0, 1))


def test_verify_lemma2_passes_and_is_deterministic():
    res = verify_lemma2((2, 3, 1), trials=500, seed=3)
    assert res.passed and res.exact_checked == 16
    assert res.to_dict()["pass"] is True
    assert res == verify_lemma2((2, 3, 1), trials=500, seed=3)


def test_verify_lemma2_catches_wrong_factor(monkeypatch):
    import tarry.lemmas as lm
    monkeypatch.setattr(lm, "closed_form_factor", lambda k: (-1) ** len(k) * (2 - sum(k)))
    assert not lm.verify_lemma2((1, 2), trials=100).passed


@pytest.mark.parametrize("n,m,blocks", [
    (3, 3, (2,) * 7 + (1,)),
    (3, 1, (2, 2, 2, 1)),
    (1, 1, (2, 1)),
])
def test_lemma1_examples(n, m, blocks):
    rep = verify_lemma1(n, m)
    assert rep.structure == blocks and rep.passed
    assert expected_lemma1_structure(len(two_var_matrix(n, m))) == blocks


@pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 11) for m in range(1, n + 1)])
def test_lemma1_grid(n, m):
    rep = verify_lemma1(n, m)
    assert rep.passed
    for b in rep.blocks:
        if b.kind == "mixed3":
            (a0, b0), (a1, b1) = b.rows
            assert (a0, a1, b1) == (n, n + b0 + 1 - m, m)
            assert b.det >= n * (m - b0) > 0


def test_mixed_bound_exhaustive():
    for n, m in product(range(1, 13), repeat=2):
        for a in range(0, m):
            det = det_leibniz([[n, n - m + 1 + a], [a, m]])
            assert mixed_bound_holds(n, m, a)
            assert det >= n * (m - a) > 0


def test_block_kinds_cover_grid():
    kinds = {b.kind for n in range(1, 8) for m in range(1, n + 1) for b in classify_blocks(n, m)}
    assert {"stage", "mixed1", "mixed3"} <= kinds
