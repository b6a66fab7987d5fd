"""Monomial supports, exponent matrices and exact integer/rational rank.

A polynomial is only ever known here through its support: the list of
exponent vectors of its monomials.  Coefficients are integration variables
elsewhere and are never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence


class ShapeError(ValueError):
    """Raised for an invalid polynomial document or shape."""


@dataclass(frozen=True, order=True)
class ExponentVector:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ShapeError(f"negative exponent in {exps}")
        if sum(exps) < 1:
            raise ShapeError(f"zero-degree monomial {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def r(self) -> int:
        return len(self.exponents)

    @property
    def support(self) -> frozenset[int]:
        """0-based indices of variables with a positive exponent."""
        return frozenset(i for i, e in enumerate(self.exponents) if e)

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        if self.r != other.r:
            raise ShapeError("length mismatch")
        return ExponentVector(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __iter__(self):
        return iter(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]


@dataclass(frozen=True)
class PolynomialShape:
    """Ordered monomial support of F = sum_j alpha_j * x^k_j.

    Storage order is the input order; nothing here sorts implicitly.
    """

    r: int
    monomials: tuple[ExponentVector, ...]

    def __post_init__(self):
        if self.r < 1:
            raise ShapeError("r must be a positive integer")
        mons = tuple(m if isinstance(m, ExponentVector) else ExponentVector(tuple(m))
                     for m in self.monomials)
        if not mons:
            raise ShapeError("at least one monomial is required")
        seen = set()
        for m in mons:
            if m.r != self.r:
                raise ShapeError(f"monomial {m.exponents} does not have length r={self.r}")
            if m in seen:
                raise ShapeError(f"duplicate monomial {m.exponents}")
            seen.add(m)
        object.__setattr__(self, "monomials", mons)

    @classmethod
    def from_lists(cls, monomials: Iterable[Sequence[int]], r: int | None = None) -> "PolynomialShape":
        mons = [tuple(m) for m in monomials]
        if r is None:
            if not mons:
                raise ShapeError("cannot infer r from an empty monomial list")
            r = len(mons[0])
        return cls(r, tuple(ExponentVector(m) for m in mons))

    @property
    def N(self) -> int:
        return len(self.monomials)

    @property
    def m(self) -> int:
        return max(mon.degree for mon in self.monomials)

    @property
    def exponent_sum(self) -> int:
        """Total of all exponents over all monomials."""
        return sum(mon.degree for mon in self.monomials)

    def as_lists(self) -> list[list[int]]:
        return [list(mon.exponents) for mon in self.monomials]

    def to_doc(self) -> dict:
        return {"r": self.r, "monomials": self.as_lists()}


def parse_polynomial(doc) -> PolynomialShape:
    """Validate a polynomial document ``{"r": int, "monomials": [[int, ...], ...]}``.

    ``doc`` may be a mapping or a JSON string.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ShapeError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ShapeError("document must be a JSON object")
    if set(doc) - {"r", "monomials", "name"}:
        raise ShapeError(f"unknown keys {sorted(set(doc) - {'r', 'monomials', 'name'})}")
    r = doc.get("r")
    mons = doc.get("monomials")
    if not isinstance(r, int) or isinstance(r, bool):
        raise ShapeError("'r' must be an integer")
    if r <= 0:
        raise ShapeError("'r' must be positive")
    if not isinstance(mons, list) or not mons:
        raise ShapeError("'monomials' must be a non-empty list")
    rows = []
    for mon in mons:
        if not isinstance(mon, list) or len(mon) != r:
            raise ShapeError(f"monomial {mon!r} is not a list of length {r}")
        if not all(isinstance(e, int) and not isinstance(e, bool) for e in mon):
            raise ShapeError(f"monomial {mon!r} has non-integer entries")
        rows.append(tuple(mon))
    return PolynomialShape(r, tuple(ExponentVector(m) for m in rows))


def load_polynomial(path) -> PolynomialShape:
    with open(path) as fh:
        text = fh.read()
    return parse_polynomial(text)


def exponent_matrix(p: PolynomialShape) -> list[list[int]]:
    """N x r integer matrix; row j is monomial j in storage order."""
    return p.as_lists()


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------

def _integer_rows(M) -> list[list[int]]:
    """Scale each row of a rational matrix to integers (row scaling keeps rank)."""
    rows = []
    for row in M:
        row = [Fraction(x) for x in row]
        den = lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * den) for x in row])
    return rows


def rank_exact(M) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination.

    Entries may be ints or Fractions; floats are rejected.
    """
    M = [list(row) for row in M]
    if any(isinstance(x, float) for row in M for x in row):
        raise TypeError("rank_exact takes integer or rational entries only")
    A = _integer_rows(M)
    if not A or not A[0]:
        return 0
    n_rows, n_cols = len(A), len(A[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((i for i in range(rank, n_rows) if A[i][col]), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        p = A[rank][col]
        for i in range(rank + 1, n_rows):
            a = A[i][col]
            row_i, row_p = A[i], A[rank]
            for j in range(col + 1, n_cols):
                row_i[j] = (p * row_i[j] - a * row_p[j]) // prev
            row_i[col] = 0
        prev = p
        rank += 1
    return rank


def det_exact(M) -> Fraction:
    """Determinant of a square rational matrix by Gaussian elimination over Q."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix is not square")
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if A[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                for j in range(c, n):
                    A[i][j] -= f * A[c][j]
    return det


# ---------------------------------------------------------------------------
# support structure
# ---------------------------------------------------------------------------

def senior_form_support(p: PolynomialShape) -> frozenset[int]:
    """Variables (0-based) occurring in some monomial of top degree m."""
    top = p.m
    out: set[int] = set()
    for mon in p.monomials:
        if mon.degree == top:
            out |= mon.support
    return frozenset(out)


@dataclass(frozen=True)
class Decomposition:
    decomposable: bool
    components: tuple[frozenset[int], ...]
    unused: frozenset[int]


def is_decomposable(p: PolynomialShape) -> Decomposition:
    """Connected components of the hypergraph whose edges are monomial supports.

    Only variables that occur somewhere take part; the rest are ``unused``.
    """
    parent = list(range(p.r))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    used: set[int] = set()
    for mon in p.monomials:
        supp = sorted(mon.support)
        used.update(supp)
        for v in supp[1:]:
            a, b = find(supp[0]), find(v)
            if a != b:
                parent[b] = a
    groups: dict[int, set[int]] = {}
    for v in sorted(used):
        groups.setdefault(find(v), set()).add(v)
    comps = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    unused = frozenset(range(p.r)) - used
    return Decomposition(len(comps) > 1, comps, unused)
