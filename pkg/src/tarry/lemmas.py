"""Checks for the two-variable block lemma and the monomial Hessian identity.

For a monomial x^k with all k_i >= 1 and r >= 2, the matrix

    A_ij = k_i (k_j - delta_ij) x^k / (x_i x_j)

(the transposed Jacobian of the gradient) satisfies

    det A = (-1)^r (1 - sum k_i) * prod k_i * (x^k)^r / prod x_i^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _parallel
from .exponents import ShapeError, det_exact
from .structure import DEFAULT_DELTA, structure_decompose, two_var_matrix


def _check_kvec(kvec: Sequence[int]) -> tuple[int, ...]:
    kvec = tuple(int(k) for k in kvec)
    if len(kvec) < 2:
        raise ShapeError("the identity needs r > 1")
    if any(k < 1 for k in kvec):
        raise ShapeError(f"all exponents must be positive, got {kvec}")
    return kvec


def closed_form_factor(kvec: Sequence[int]) -> int:
    """(-1)^r (1 - sum k_i)."""
    kvec = _check_kvec(kvec)
    return (-1) ** len(kvec) * (1 - sum(kvec))


def hessian_matrix(kvec: Sequence[int], point: Sequence) -> list[list]:
    kvec = _check_kvec(kvec)
    point = tuple(point)
    if len(point) != len(kvec):
        raise ShapeError("point and exponent vector differ in length")
    if any(x == 0 for x in point):
        raise ValueError(f"zero coordinate in {point}")
    exact = all(isinstance(x, (int, Fraction)) for x in point)
    mono = Fraction(1) if exact else 1.0
    for x, k in zip(point, kvec):
        mono *= x ** k
    r = len(kvec)
    return [[kvec[i] * (kvec[j] - (i == j)) * mono / (point[i] * point[j]) for j in range(r)]
            for i in range(r)]


def monomial_hessian_det(kvec: Sequence[int], point: Sequence) -> float:
    A = hessian_matrix(kvec, point)
    if isinstance(A[0][0], Fraction):
        return det_exact(A)
    return float(np.linalg.det(np.array(A, dtype=float)))


def closed_form_det(kvec: Sequence[int], point: Sequence):
    kvec = _check_kvec(kvec)
    exact = all(isinstance(x, (int, Fraction)) for x in point)
    one = Fraction(1) if exact else 1.0
    mono = one
    sq = one
    for x, k in zip(point, kvec):
        mono *= x ** k
        sq *= x * x
    return closed_form_factor(kvec) * math.prod(kvec) * mono ** len(kvec) / sq


@dataclass(frozen=True)
class Lemma2Result:
    exponents: tuple[int, ...]
    trials: int
    max_relative_error: float
    sign_mismatches: int
    closed_form_factor: int
    exact_checked: int = 0

    @property
    def passed(self) -> bool:
        return self.max_relative_error < 1e-9 and self.sign_mismatches == 0

    def to_dict(self) -> dict:
        return {
            "check": "lemma2",
            "exponents": list(self.exponents),
            "trials": self.trials,
            "max_rel_err": self.max_relative_error,
            "sign_mismatches": self.sign_mismatches,
            "closed_form_factor": self.closed_form_factor,
            "exact_checked": self.exact_checked,
            "pass": self.passed,
        }


def _batched_dets(kvec: tuple[int, ...], X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Determinant by LU and closed form at each row of X (shape (T, r))."""
    k = np.array(kvec, dtype=float)
    K = k[:, None] * (k[None, :] - np.eye(len(k)))
    mono = np.prod(X ** k, axis=1)
    A = K[None] * mono[:, None, None] / (X[:, :, None] * X[:, None, :])
    det = np.linalg.det(A)
    closed = closed_form_factor(kvec) * math.prod(kvec) * mono ** len(kvec) / np.prod(X ** 2, axis=1)
    return det, closed


def verify_lemma2(kvec: Sequence[int], trials: int = 1000, seed: int = 0,
                  delta: float = DEFAULT_DELTA, exact: bool | None = None) -> Lemma2Result:
    """Compare det A against the closed form at random points of [delta, 1]^r.

    With ``exact`` (default for r <= 3) a further 16 dyadic rational points
    are checked with exact arithmetic and must agree identically.
    """
    kvec = _check_kvec(kvec)
    r = len(kvec)
    factor = closed_form_factor(kvec)

    def run(batch):
        b, _, count = batch
        rng = _parallel.batch_rng(seed, b)
        X = rng.uniform(delta, 1.0, size=(count, r))
        det, closed = _batched_dets(kvec, X)
        rel = np.abs(det - closed) / np.abs(closed)
        signs = int(np.count_nonzero(np.sign(det) != np.sign(factor)))
        return float(rel.max()), signs

    res = _parallel.ordered_map(run, _parallel.batches(trials))
    max_rel = max((x[0] for x in res), default=0.0)
    mismatches = sum(x[1] for x in res)

    exact_checked = 0
    if exact is None:
        exact = r <= 3
    if exact:
        rng = _parallel.batch_rng(seed, 1 << 20)
        for _ in range(16):
            pt = [Fraction(int(a), 2 ** 16) for a in rng.integers(1, 2 ** 16, size=r, endpoint=True)]
            if monomial_hessian_det(kvec, pt) != closed_form_det(kvec, pt):
                mismatches += 1
            exact_checked += 1
    return Lemma2Result(kvec, trials, max_rel, mismatches, factor, exact_checked)


# ---------------------------------------------------------------------------
# two-variable grid
# ---------------------------------------------------------------------------

def expected_lemma1_structure(n_rows: int) -> tuple[int, ...]:
    return (2,) * (n_rows // 2) + ((1,) if n_rows % 2 else ())


@dataclass(frozen=True)
class BlockCheck:
    rows: tuple[tuple[int, int], ...]
    det: int
    kind: str  # "stage", "mixed1", "mixed2", "mixed3", "single"
    a: int | None = None
    bound: int | None = None

    @property
    def ok(self) -> bool:
        if self.kind == "single":
            return True
        if self.det == 0:
            return False
        if self.kind == "mixed3":
            return self.det >= self.bound > 0
        return True


def classify_blocks(n: int, m: int) -> list[BlockCheck]:
    """Determinant and type of every block of the decomposition of the (n, m) grid.

    A mixed block pairs the last row of degree d with the first row of
    degree d + 1.  When d > n its rows are (n, a) and (n + a + 1 - m, m),
    and the determinant is bounded below by n (m - a).
    """
    M = two_var_matrix(n, m)
    dec = structure_decompose(M)
    out = []
    for lo, hi in dec.block_row_spans:
        rows = tuple(tuple(M[i]) for i in range(lo, hi))
        if len(rows) == 1:
            out.append(BlockCheck(rows, 0, "single"))
            continue
        (a0, b0), (a1, b1) = rows
        det = a0 * b1 - b0 * a1
        d = a0 + b0
        if d == a1 + b1:
            out.append(BlockCheck(rows, det, "stage"))
        elif d > n:
            out.append(BlockCheck(rows, det, "mixed3", a=b0, bound=n * (m - b0)))
        elif d + 1 <= m:
            out.append(BlockCheck(rows, det, "mixed1"))
        else:
            out.append(BlockCheck(rows, det, "mixed2"))
    return out


def mixed_bound_holds(n: int, m: int, a: int) -> bool:
    """det [[n, n - m + 1 + a], [a, m]] >= n (m - a) > 0, for m >= 1 + a."""
    det = n * m - a * (n - m + 1 + a)
    return det == n * m - a * n + a * m - a - a * a and det >= n * (m - a) > 0


@dataclass(frozen=True)
class Lemma1Report:
    n: int
    m: int
    structure: tuple[int, ...]
    expected: tuple[int, ...]
    blocks: tuple[BlockCheck, ...]

    @property
    def passed(self) -> bool:
        return self.structure == self.expected and all(b.ok for b in self.blocks)

    def to_dict(self) -> dict:
        return {
            "check": "lemma1",
            "n": self.n,
            "m": self.m,
            "structure": list(self.structure),
            "expected": list(self.expected),
            "mixed_blocks": [
                {"rows": [list(r) for r in b.rows], "det": b.det, "kind": b.kind,
                 "a": b.a, "bound": b.bound}
                for b in self.blocks if b.kind.startswith("mixed")
            ],
            "pass": self.passed,
        }


def verify_lemma1(n: int, m: int) -> Lemma1Report:
    M = two_var_matrix(n, m)
    dec = structure_decompose(M)
    return Lemma1Report(n, m, dec.blocks, expected_lemma1_structure(len(M)),
                        tuple(classify_blocks(n, m)))
