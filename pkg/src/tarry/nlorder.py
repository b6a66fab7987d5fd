"""Normally-lexicographic order: total degree first, then plain lexicographic.

The lexicographic tie-break reads coordinates left to right in stored
variable order, so everything here is sensitive to permuting variables.
"""

from __future__ import annotations

from enum import Enum
from functools import cmp_to_key

from .exponents import ExponentVector, PolynomialShape, ShapeError


class OrderOutcome(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def _as_tuple(v) -> tuple[int, ...]:
    return v.exponents if isinstance(v, ExponentVector) else tuple(v)


def nl_key(v) -> tuple:
    t = _as_tuple(v)
    return (sum(t), t)


def nl_compare(a, b) -> OrderOutcome:
    ta, tb = _as_tuple(a), _as_tuple(b)
    if len(ta) != len(tb):
        raise ShapeError(f"length mismatch: {len(ta)} vs {len(tb)}")
    ka, kb = nl_key(ta), nl_key(tb)
    if ka < kb:
        return OrderOutcome.LESS
    if ka > kb:
        return OrderOutcome.GREATER
    return OrderOutcome.EQUAL


def nl_less(a, b) -> bool:
    return nl_compare(a, b) is OrderOutcome.LESS


def nl_sort(p: PolynomialShape) -> PolynomialShape:
    """Same monomials, strictly increasing in n.-l. order."""
    return PolynomialShape(p.r, tuple(sorted(p.monomials, key=nl_key)))


def nl_sorted_vectors(vectors):
    """Sort arbitrary exponent tuples with the comparator (used as an oracle in tests)."""
    order = {OrderOutcome.LESS: -1, OrderOutcome.EQUAL: 0, OrderOutcome.GREATER: 1}
    return sorted(vectors, key=cmp_to_key(lambda a, b: order[nl_compare(a, b)]))


def high_member(p: PolynomialShape) -> ExponentVector:
    return max(p.monomials, key=nl_key)


def support_product(p: PolynomialShape, q: PolynomialShape) -> PolynomialShape:
    """Support of the product of two polynomials with positive coefficients.

    Pairwise exponent sums, deduplicated, in order of first appearance.
    """
    if p.r != q.r:
        raise ShapeError(f"r mismatch: {p.r} vs {q.r}")
    out: dict[ExponentVector, None] = {}
    for a in p.monomials:
        for b in q.monomials:
            out.setdefault(a + b)
    return PolynomialShape(p.r, tuple(out))
