"""Certificates and numerical diagnostics for the convergence exponent of the Tarry special integral."""

from .criteria import convergence_report, max_v, v_complete
from .exponents import PolynomialShape, ExponentVector, parse_polynomial, rank_exact
from .nlorder import high_member, nl_compare, nl_sort
from .structure import structure_decompose, two_var_matrix

__all__ = [
    "ExponentVector",
    "PolynomialShape",
    "convergence_report",
    "high_member",
    "max_v",
    "nl_compare",
    "nl_sort",
    "parse_polynomial",
    "rank_exact",
    "structure_decompose",
    "two_var_matrix",
    "v_complete",
]
