"""Named shapes used by the golden files, the consistency checks and the scripts."""

from __future__ import annotations

from .exponents import PolynomialShape
from .structure import two_var_matrix

EXAMPLE_SET = [[0, 1], [1, 0], [0, 2], [1, 1], [2, 0], [0, 3], [1, 2], [2, 1], [3, 0]]

GRIDS = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 2)]


def product_family(r: int, m: int) -> PolynomialShape:
    """sum_{j=1}^m alpha_j (x_1 ... x_r)^j."""
    return PolynomialShape.from_lists([[j] * r for j in range(1, m + 1)], r)


def complete_1d(n: int) -> PolynomialShape:
    return PolynomialShape.from_lists([[j] for j in range(1, n + 1)], 1)


def grid_shape(n: int, m: int) -> PolynomialShape:
    return PolynomialShape.from_lists(two_var_matrix(n, m), 2)


def corpus() -> dict[str, PolynomialShape]:
    out: dict[str, PolynomialShape] = {}
    for r in range(1, 5):
        for m in range(1, 5):
            out[f"prod_r{r}_m{m}"] = product_family(r, m)
    for n in range(1, 6):
        out[f"complete1d_n{n}"] = complete_1d(n)
    out["example9"] = PolynomialShape.from_lists(EXAMPLE_SET, 2)
    for n, m in GRIDS:
        out[f"grid_n{n}_m{m}"] = grid_shape(n, m)
    extra = {
        "xy": [[1, 1]],
        "x2": [[2]],
        "sum_of_squares": [[2, 0], [0, 2]],
        "chain_r2": [[1, 1, 0], [0, 1, 1]],
        # k >= q is the binding convergence condition here
        "binding_q_r4": [[1, 0, 0, 0], [2, 0, 0, 0], [3, 0, 0, 0], [0, 1, 1, 1], [1, 0, 0, 1]],
        # 2kr >= 2N + r is the binding convergence condition here
        "binding_2n_r4": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1],
                          [1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0]],
    }
    for name, mons in extra.items():
        out[name] = PolynomialShape.from_lists(mons)
    return out


# Not part of the corpus: a rank-deficient support on which the real
# thresholds cross (gamma_low = 4 > gamma_high = 11/3) while the integer
# certificates stay disjoint.
CROSSING_SHAPE = PolynomialShape.from_lists([[1, 0, 0], [2, 0, 0], [0, 1, 1], [1, 1, 1]])
