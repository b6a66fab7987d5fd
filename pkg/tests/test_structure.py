import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tarry.corpus import EXAMPLE_SET, product_family
from tarry.exponents import PolynomialShape, ShapeError, rank_exact
from tarry.structure import (
    gram_det,
    iterated_jacobi,
    j0_at,
    k_matrix_at,
    phi_levels,
    prop3_rank_check,
    s_matrix_at,
    shape_structure,
    singular_fraction,
    structure_decompose,
    system_residual,
    two_var_matrix,
)

from oracles import rank_by_minors


def shape(mons):
    return PolynomialShape.from_lists(mons)


# --- structure decomposition ------------------------------------------------

@pytest.mark.parametrize("M,blocks", [
    (EXAMPLE_SET, (2, 2, 2, 2, 1)),
    ([[1, 1], [2, 2], [3, 3]], (1, 1, 1)),
    (two_var_matrix(3, 3)[:8], (2, 2, 2, 2)),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (3,)),
])
def test_structure_examples(M, blocks):
    dec = structure_decompose(M)
    assert dec.blocks == blocks and dec.q == len(blocks)


def test_structure_rejects_zero_row():
    with pytest.raises(ShapeError):
        structure_decompose([[1, 0], [0, 0]])


def _check_definition(M, dec):
    assert sum(dec.blocks) == len(M)
    assert dec.rho == rank_by_minors(M)
    spans = dec.block_row_spans
    assert spans[0][0] == 0 and spans[-1][1] == len(M)
    for (lo, hi), (lo2, _) in zip(spans, spans[1:]):
        assert hi == lo2
    for j, (lo, hi) in enumerate(spans):
        block = M[lo:hi]
        assert hi - lo <= dec.rho
        assert rank_exact(block) == hi - lo
        assert rank_exact(block[:-1]) == hi - lo - 1 if hi - lo > 1 else True
        if j + 1 < len(spans):
            assert rank_exact(block + [M[hi]]) == rank_exact(block)


int_rows = st.integers(1, 4).flatmap(lambda c: st.lists(
    st.lists(st.integers(0, 3), min_size=c, max_size=c).filter(any), min_size=1, max_size=7))


@given(int_rows)
def test_definition_invariants(M):
    _check_definition(M, structure_decompose(M))


def test_definition_invariants_grids():
    for n in range(1, 8):
        for m in range(1, n + 1):
            M = two_var_matrix(n, m)
            _check_definition(M, structure_decompose(M))


def test_shape_structure_uses_nl_order():
    rev = shape(EXAMPLE_SET[::-1])
    assert shape_structure(rev).blocks == (2, 2, 2, 2, 1)


# --- grid -------------------------------------------------------------------

def test_two_var_matrix_examples():
    assert two_var_matrix(3, 3)[:6] == [[0, 1], [1, 0], [0, 2], [1, 1], [2, 0], [0, 3]]
    assert two_var_matrix(1, 1) == [[0, 1], [1, 0], [1, 1]]
    with pytest.raises(ValueError):
        two_var_matrix(1, 2)


@pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 9) for m in range(1, n + 1)])
def test_two_var_matrix_enumeration(n, m):
    grid = [(i, j) for i in range(n + 1) for j in range(m + 1) if i + j >= 1]
    grid.sort(key=lambda t: (t[0] + t[1], t))
    assert two_var_matrix(n, m) == [list(t) for t in grid]
    M = two_var_matrix(n, m)
    for lo, hi in structure_decompose(M).block_row_spans:
        if hi - lo == 2:
            (a, b), (c, d) = M[lo:hi]
            assert a * d - b * c != 0


# --- evaluated matrices -------------------------------------------------------

def test_k_matrix_examples():
    assert k_matrix_at(shape([[1]]), (0.5,)).tolist() == [[0.5]]
    assert k_matrix_at(shape([[1, 1]]), (1, 1)).tolist() == [[1, 1]]
    assert k_matrix_at(shape([[1], [2]]), (2,)).tolist() == [[2], [8]]


def test_s_matrix_is_gradient():
    p = shape([[2, 1], [0, 3]])
    x = (Fraction(1, 3), Fraction(2, 5))
    S = s_matrix_at(p, x).tolist()
    assert S == [[2 * x[0] * x[1], x[0] ** 2], [0, 3 * x[1] ** 2]]


def test_zero_coordinate_rejected():
    with pytest.raises(ValueError):
        k_matrix_at(shape([[1, 1]]), (0, 1))


def test_j0_examples():
    x = shape([[1]])
    J = j0_at(x, 1, [(0.5,), (0.5,)])
    assert J.tolist() == [[1.0, -1.0]]
    assert gram_det(J.entries) == pytest.approx(2.0, rel=1e-14)
    assert j0_at(shape([[1], [2]]), 1, [(1,), (1,)]).tolist() == [[1, -1], [2, -2]]


def test_j0_block_layout():
    p = shape([[1, 2], [2, 1]])
    pts = [(Fraction(1, 2), Fraction(1, 3)), (Fraction(2, 3), Fraction(3, 4))]
    J = j0_at(p, 1, pts).tolist()
    S1, S2 = (s_matrix_at(p, pt).tolist() for pt in pts)
    assert J == [S1[j] + [-v for v in S2[j]] for j in range(2)]


def test_product_family_single_block_rank_one():
    p = product_family(2, 1)
    rng = np.random.default_rng(3)
    for _ in range(20):
        pts = [tuple(rng.uniform(0.1, 1, 2)) for _ in range(4)]
        assert np.linalg.matrix_rank(j0_at(p, 2, pts).entries) == 1


def test_level_one_matches_j0():
    p = shape([[1, 1], [2, 1]])
    pts = [(0.3, 0.8), (0.6, 0.4), (0.9, 0.2), (0.5, 0.5)]
    assert np.array_equal(iterated_jacobi(p, 2, 1, pts).entries, j0_at(p, 2, pts).entries)


def test_level_two_second_derivative():
    assert iterated_jacobi(shape([[2]]), 1, 2, [(1,), (1,)]).tolist() == [[2, 0], [0, -2]]
    with pytest.raises(ValueError):
        iterated_jacobi(shape([[2]]), 1, 3, [(1,), (1,)])


def _fd_next_level(p, k, level, pts, h=1e-6):
    """Transposed Jacobian of the previous level's nonzero entries, by central differences."""
    r = p.r
    flat = np.array([c for pt in pts for c in pt], dtype=float)

    def entries(x):
        blocks = [tuple(x[b * r:(b + 1) * r]) for b in range(2 * k)]
        return np.asarray(iterated_jacobi(p, k, level - 1, blocks).entries).T.reshape(-1)

    keep = entries(flat) != 0
    cols = []
    for v in range(flat.size):
        e = np.zeros_like(flat)
        e[v] = h
        cols.append((entries(flat + e) - entries(flat - e))[keep] / (2 * h))
    return np.array(cols)


@pytest.mark.parametrize("mons,k,level", [
    ([[1, 1], [2, 2]], 1, 2),
    ([[1, 0], [0, 1], [1, 1], [2, 1]], 1, 2),
    ([[1], [2], [3]], 2, 2),
    ([[1], [2], [3]], 1, 3),
])
def test_iterated_jacobi_against_finite_differences(mons, k, level):
    p = shape(mons)
    rng = np.random.default_rng(11)
    pts = [tuple(rng.uniform(0.3, 0.9, p.r)) for _ in range(2 * k)]
    sym = np.asarray(iterated_jacobi(p, k, level, pts).entries)
    fd = _fd_next_level(p, k, level, pts)
    assert sym.shape == fd.shape
    assert np.allclose(sym, fd, rtol=1e-6, atol=1e-7)


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_gram_det_nonnegative(vals):
    A = np.array(vals).reshape(2, 3)
    assert gram_det(A) >= 0
    assert gram_det(A.T) == 0.0


def test_phi_levels():
    assert phi_levels(shape([[1, 0], [0, 1]])) == [1]
    assert phi_levels(product_family(2, 2)) == [1, 2, 3]


# --- residuals ----------------------------------------------------------------

def test_residual_examples():
    assert system_residual(shape([[1]]), 1, [(0.3,), (0.7,)])[0] == pytest.approx(-0.4, abs=1e-15)
    p = product_family(2, 2)
    pts = [(Fraction(1, 2), Fraction(1, 3)), (Fraction(2, 5), Fraction(3, 4))]
    assert system_residual(p, 2, pts + pts) == [0, 0]


def test_residual_depends_on_products_only():
    p = product_family(3, 3)
    pts = [(Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)), (Fraction(1, 5), Fraction(1, 2), Fraction(4, 5))]
    rescaled = [(pts[0][0] * 2, pts[0][1] / 2, pts[0][2]), pts[1]]
    assert system_residual(p, 1, pts) == system_residual(p, 1, rescaled)


# --- randomized checks ------------------------------------------------------

def test_prop3_full_rank_shape():
    rep = prop3_rank_check(shape([[1, 0], [0, 1]]), trials=50, seed=1)
    assert shape_structure(shape([[1, 0], [0, 1]])).q == 1
    assert rep.fraction == 1.0


@pytest.mark.parametrize("mons,q", [([[1, 1], [2, 2]], 2), (EXAMPLE_SET, 5)])
def test_prop3_sampling(mons, q):
    p = shape(mons)
    assert shape_structure(p).q == q
    assert prop3_rank_check(p, trials=200, seed=2).fraction >= 0.99


def test_prop3_too_few_points_fails():
    # with one point the assembled matrix has only r columns
    assert prop3_rank_check(shape(EXAMPLE_SET), trials=20, seed=0, q=1).fraction == 0.0


def test_prop3_deterministic():
    p = shape(EXAMPLE_SET)
    assert prop3_rank_check(p, 100, seed=5) == prop3_rank_check(p, 100, seed=5)


def test_singular_fraction_lambda_conventions():
    p = product_family(2, 2)
    assert singular_fraction(p, 2, 0.0, trials=100, seed=0).fraction == 1.0
    assert singular_fraction(p, 2, math.inf, trials=100, seed=0).fraction == 0.0
    rep = singular_fraction(p, 2, 1e-12, trials=500, seed=0)
    assert rep.fraction >= 0.99 and 0 <= rep.fraction <= 1
    assert rep.levels == (1, 2, 3)


def test_singular_report_dict():
    rep = singular_fraction(product_family(2, 2), 2, 1e-12, trials=300, seed=4)
    d = rep.to_dict()
    assert d["passes"] == rep.in_D_lambda and d["lambda"] == 1e-12
