"""Block structure of the exponent matrix and the Jacobian families of the connected system.

The connected system for a shape and a natural k is

    gamma_j(x_1) + ... + gamma_j(x_k) - gamma_j(x_{k+1}) - ... - gamma_j(x_{2k}) = 0,

in 2k blocks of r variables (D = 2kr unknowns in total).  Its Jacobian J0 is
the level-1 matrix; level j+1 is the transposed Jacobian of the entries of
level j read column by column.  Every entry at every level is a single signed
monomial, so the levels are built symbolically as (coefficient, exponent)
arrays and only evaluated at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _parallel
from .exponents import PolynomialShape, ShapeError, exponent_matrix, rank_exact
from .nlorder import nl_key, nl_sort

DEFAULT_DELTA = 1.0 / 16
DYADIC_BITS = 16


# ---------------------------------------------------------------------------
# block structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureDecomposition:
    rho: int
    blocks: tuple[int, ...]
    block_row_spans: tuple[tuple[int, int], ...]  # half-open, 0-based

    @property
    def q(self) -> int:
        return len(self.blocks)

    @property
    def uniform(self) -> bool:
        """True for the structure (rho, rho, ..., rho)."""
        return all(b == self.rho for b in self.blocks)


def structure_decompose(M) -> StructureDecomposition:
    """Greedy consecutive decomposition into maximal independent runs.

    Rows are scanned top-down; a row joins the current block while it is
    independent of the block's rows, otherwise it opens the next block.
    """
    M = [list(row) for row in M]
    for idx, row in enumerate(M):
        if not any(row):
            raise ShapeError(f"zero row at index {idx}")
    blocks: list[tuple[int, int]] = []
    start = 0
    for idx in range(1, len(M)):
        cur = M[start:idx + 1]
        if rank_exact(cur) < len(cur):
            blocks.append((start, idx))
            start = idx
    if M:
        blocks.append((start, len(M)))
    return StructureDecomposition(
        rho=rank_exact(M),
        blocks=tuple(b - a for a, b in blocks),
        block_row_spans=tuple(blocks),
    )


def shape_structure(p: PolynomialShape) -> StructureDecomposition:
    """Structure of the exponent matrix with rows in n.-l. order."""
    return structure_decompose(exponent_matrix(nl_sort(p)))


def two_var_matrix(n: int, m: int) -> list[list[int]]:
    """All pairs (i, j), 0 <= i <= n, 0 <= j <= m, i + j >= 1, increasing n.-l. order."""
    if m < 1 or n < m:
        raise ValueError(f"need n >= m >= 1, got n={n}, m={m}")
    pairs = [(i, j) for i in range(n + 1) for j in range(m + 1) if i + j >= 1]
    return [list(t) for t in sorted(pairs, key=nl_key)]


# ---------------------------------------------------------------------------
# evaluated matrices
# ---------------------------------------------------------------------------

@dataclass
class EvaluatedMatrix:
    entries: object  # numpy float array, or list of lists of Fractions
    family: str  # "K", "S", "J0" or "phi_level_<j>"
    points: tuple = field(repr=False, default=())

    @property
    def shape(self) -> tuple[int, int]:
        if isinstance(self.entries, np.ndarray):
            return self.entries.shape
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def tolist(self):
        if isinstance(self.entries, np.ndarray):
            return self.entries.tolist()
        return [list(row) for row in self.entries]


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def _check_point(point: Sequence, r: int) -> tuple:
    point = tuple(point)
    if len(point) != r:
        raise ShapeError(f"point {point} does not have length {r}")
    if any(v == 0 for v in point):
        raise ValueError(f"zero coordinate in {point}")
    return point


def _flatten_points(points, k: int, r: int) -> tuple:
    points = [tuple(pt) for pt in points]
    if len(points) != 2 * k:
        raise ValueError(f"expected {2 * k} points, got {len(points)}")
    flat = []
    for pt in points:
        flat.extend(_check_point(pt, r))
    return tuple(flat)


def _monomial_value(exps, point):
    out = 1
    for e, x in zip(exps, point):
        if e:
            out = out * x ** e
    return out


def k_matrix_at(p: PolynomialShape, point) -> EvaluatedMatrix:
    """Entry (j, i) = k_ji * gamma_j(x), over all r columns."""
    point = _check_point(point, p.r)
    rows = []
    for mon in p.monomials:
        g = _monomial_value(mon.exponents, point)
        rows.append([e * g for e in mon.exponents])
    exact = _is_exact(point)
    entries = rows if exact else np.array(rows, dtype=float)
    return EvaluatedMatrix(entries, "K", (point,))


def s_matrix_at(p: PolynomialShape, point) -> EvaluatedMatrix:
    """Entry (j, i) = d gamma_j / d x_i = k_ji * x_i^-1 * gamma_j(x)."""
    point = _check_point(point, p.r)
    rows = []
    for mon in p.monomials:
        row = []
        for i, e in enumerate(mon.exponents):
            if e == 0:
                row.append(0)
            else:
                d = list(mon.exponents)
                d[i] -= 1
                row.append(e * _monomial_value(d, point))
        rows.append(row)
    entries = rows if _is_exact(point) else np.array(rows, dtype=float)
    return EvaluatedMatrix(entries, "S", (point,))


# symbolic levels: coef has shape (rows, cols); exps has shape (rows, cols, D)

@lru_cache(maxsize=64)
def _level_one(p: PolynomialShape, k: int) -> tuple[np.ndarray, np.ndarray]:
    r, N = p.r, p.N
    D = 2 * k * r
    coef = np.zeros((N, D), dtype=np.int64)
    exps = np.zeros((N, D, D), dtype=np.int64)
    for j, mon in enumerate(p.monomials):
        for b in range(2 * k):
            sign = 1 if b < k else -1
            for i in range(r):
                if mon[i] == 0:
                    continue
                coef[j, b * r + i] = sign * mon[i]
                for t in range(r):
                    exps[j, b * r + i, b * r + t] = mon[t] - (t == i)
    coef.setflags(write=False)
    exps.setflags(write=False)
    return coef, exps


@lru_cache(maxsize=64)
def symbolic_level(p: PolynomialShape, k: int, level: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient/exponent arrays of the level-``level`` matrix.

    Identically zero entries of the previous level are dropped before
    differentiating; they would only contribute zero columns.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    if level == 1:
        return _level_one(p, k)
    prev_coef, prev_exps = symbolic_level(p, k, level - 1)
    D = prev_exps.shape[-1]
    # column by column: entries of column 0 top to bottom, then column 1, ...
    c = prev_coef.T.reshape(-1)
    e = prev_exps.transpose(1, 0, 2).reshape(-1, D)
    keep = c != 0
    c, e = c[keep], e[keep]
    M = c.shape[0]
    coef = np.zeros((D, M), dtype=np.int64)
    exps = np.zeros((D, M, D), dtype=np.int64)
    for v in range(D):
        coef[v] = c * e[:, v]
        ev = e.copy()
        ev[:, v] -= 1
        ev[coef[v] == 0] = 0
        exps[v] = ev
    coef.setflags(write=False)
    exps.setflags(write=False)
    return coef, exps


def _evaluate_symbolic(coef, exps, flat_point) -> object:
    if _is_exact(flat_point):
        R, C = coef.shape
        return [[int(coef[a, b]) * _monomial_value(exps[a, b].tolist(), flat_point)
                 if coef[a, b] else 0 for b in range(C)] for a in range(R)]
    x = np.asarray(flat_point, dtype=float)
    return coef * np.prod(x ** exps, axis=-1)


def _evaluate_symbolic_batch(coef, exps, X: np.ndarray) -> np.ndarray:
    """Evaluate at many points; X has shape (T, D), result (T, rows, cols)."""
    R, C, D = exps.shape
    out = np.empty((X.shape[0], R, C))
    chunk = max(1, 20_000_000 // max(1, R * C * D))
    for s in range(0, X.shape[0], chunk):
        xs = X[s:s + chunk]
        out[s:s + chunk] = coef * np.prod(xs[:, None, None, :] ** exps[None], axis=-1)
    return out


def j0_at(p: PolynomialShape, k: int, points) -> EvaluatedMatrix:
    """Jacobian of the connected system: (S(x_1), ..., S(x_k), -S(x_{k+1}), ..., -S(x_2k))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    flat = _flatten_points(points, k, p.r)
    coef, exps = _level_one(p, k)
    return EvaluatedMatrix(_evaluate_symbolic(coef, exps, flat), "J0", tuple(points))


def iterated_jacobi(p: PolynomialShape, k: int, level: int, points) -> EvaluatedMatrix:
    if not 1 <= level <= p.m:
        raise ValueError(f"level must lie in 1..{p.m}, got {level}")
    flat = _flatten_points(points, k, p.r)
    coef, exps = symbolic_level(p, k, level)
    return EvaluatedMatrix(_evaluate_symbolic(coef, exps, flat), f"phi_level_{level}", tuple(points))


def gram_det(A) -> float:
    """det(A A^T) as the product of squared singular values; never negative."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] > A.shape[1]:
        return 0.0
    s = np.linalg.svd(A, compute_uv=False)
    return float(np.prod(s ** 2))


def _gram_dets_batch(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gram determinants and condition numbers for a stack (T, R, C)."""
    T, R, C = A.shape
    if R > C:
        return np.zeros(T), np.full(T, np.inf)
    s = np.linalg.svd(A, compute_uv=False)
    with np.errstate(divide="ignore"):
        cond = np.where(s[:, -1] > 0, s[:, 0] / s[:, -1], np.inf)
    return np.prod(s ** 2, axis=1), cond


def phi_levels(p: PolynomialShape) -> list[int]:
    """Levels entering D_lambda: 1..m-1, or just level 1 when m = 1."""
    return list(range(1, max(2, p.m)))


def system_residual(p: PolynomialShape, k: int, points) -> list:
    flat = _flatten_points(points, k, p.r)
    r = p.r
    blocks = [flat[b * r:(b + 1) * r] for b in range(2 * k)]
    out = []
    for mon in p.monomials:
        vals = [_monomial_value(mon.exponents, blk) for blk in blocks]
        out.append(sum(vals[:k]) - sum(vals[k:]))
    if _is_exact(flat):
        return out
    return [float(v) for v in out]


# ---------------------------------------------------------------------------
# randomized checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckReport:
    check: str
    trials: int
    passes: int

    @property
    def fraction(self) -> float:
        return self.passes / self.trials if self.trials else 1.0

    def to_dict(self) -> dict:
        return {"check": self.check, "trials": self.trials, "passes": self.passes,
                "fraction": self.fraction}


def assembled_k_integer(p: PolynomialShape, numerators: np.ndarray) -> list[list[int]]:
    """(K(x_1), ..., K(x_q)) at dyadic points x_b = numerators[b] / 2**16.

    Row j is multiplied by 2**(16 * deg_j), which makes every entry an
    integer and leaves the rank unchanged.
    """
    q = numerators.shape[0]
    rows = []
    for mon in p.monomials:
        row = []
        for b in range(q):
            g = 1
            for a, e in zip(numerators[b].tolist(), mon.exponents):
                if e:
                    g *= a ** e
            row.extend(e * g for e in mon.exponents)
        rows.append(row)
    return rows


def prop3_rank_check(p: PolynomialShape, trials: int = 500, seed: int = 0,
                     q: int | None = None) -> CheckReport:
    """Fraction of random dyadic points where (K(x_1), ..., K(x_q)) has rank N.

    ``q`` defaults to the block count of the n.-l. ordered exponent matrix.
    """
    if q is None:
        q = shape_structure(p).q

    def run(batch):
        b, _, count = batch
        rng = _parallel.batch_rng(seed, b)
        ok = 0
        for _ in range(count):
            nums = rng.integers(1, 2 ** DYADIC_BITS, size=(q, p.r), endpoint=True)
            ok += rank_exact(assembled_k_integer(p, nums)) == p.N
        return ok

    passes = sum(_parallel.ordered_map(run, _parallel.batches(trials, 64)))
    return CheckReport("prop3", trials, passes)


@dataclass(frozen=True)
class SingularSampleReport:
    lam: float
    trials: int
    in_D_lambda: int
    levels: tuple[int, ...]
    min_phi: float
    max_condition: float

    @property
    def fraction(self) -> float:
        return self.in_D_lambda / self.trials if self.trials else 1.0

    def to_dict(self) -> dict:
        def num(v):
            return v if math.isfinite(v) else str(v)
        return {
            "check": "singular",
            "lambda": num(self.lam),
            "trials": self.trials,
            "passes": self.in_D_lambda,
            "fraction": self.fraction,
            "levels": list(self.levels),
            "min_phi": num(self.min_phi),
            "max_condition": num(self.max_condition),
            "caveat": "Phi_j evaluated in float64; values near lambda with large condition numbers are not certified",
        }


def singular_fraction(p: PolynomialShape, k: int, lam: float, trials: int = 1000,
                      seed: int = 0, delta: float = DEFAULT_DELTA) -> SingularSampleReport:
    """Fraction of uniform points in [delta, 1]^(2kr) where min_j Phi_j >= lam."""
    if k < 1:
        raise ValueError("k must be >= 1")
    levels = phi_levels(p)
    D = 2 * k * p.r
    syms = [symbolic_level(p, k, j) for j in levels]

    def run(batch):
        b, _, count = batch
        rng = _parallel.batch_rng(seed, b)
        X = rng.uniform(delta, 1.0, size=(count, D))
        phis = np.full(count, np.inf)
        conds = np.zeros(count)
        for coef, exps in syms:
            g, c = _gram_dets_batch(_evaluate_symbolic_batch(coef, exps, X))
            phis = np.minimum(phis, g)
            conds = np.maximum(conds, c)
        return int(np.count_nonzero(phis >= lam)), float(phis.min()), float(conds.max())

    res = _parallel.ordered_map(run, _parallel.batches(trials, 256))
    return SingularSampleReport(
        lam=float(lam), trials=trials,
        in_D_lambda=sum(r[0] for r in res),
        levels=tuple(levels),
        min_phi=min((r[1] for r in res), default=math.inf),
        max_condition=max((r[2] for r in res), default=0.0),
    )
