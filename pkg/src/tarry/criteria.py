"""v-completeness and the divergence/convergence certificates for theta_k.

Notation: N monomials in r variables, exponent sum S, exponent-matrix rank
rho, block count q of the n.-l. ordered exponent matrix, v_max the largest
v for which the support is v-complete.

Divergence (tags T1, T2):
    T1  k * rho < N
    T2  k >= q and 2kr <= v + S                   (v from a complete witness)
Convergence, all requiring an indecomposable support whose top-degree
monomials involve every variable (tags T3, T4, C):
    T3  k >= q,          2kr >= 2N + r,  2kr > r + S
    T4  k * rho >= N,    2kr >= 2N + r,  2kr > r + S   (structure (rho, ..., rho))
    C   k >= N,                          2kr > r + S

Real thresholds are reported apart from the integer certificates:
gamma_low = max(2N / rho, (v + S) / r when that is >= 2q) and
gamma_high = (r + S) / r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor

from .exponents import ExponentVector, PolynomialShape, is_decomposable, senior_form_support
from .structure import StructureDecomposition, shape_structure

MAX_V_SEARCH_R = 12
CONVERGENCE_TAGS = ("T3", "T4", "C")


class SearchTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class CompletenessResult:
    v: int
    witness_subset: frozenset[int] | None
    is_complete: bool


def v_complete(p: PolynomialShape, subset) -> bool:
    """Downward closure of the support on the coordinates in ``subset`` (0-based).

    For each monomial every vector obtained by lowering the subset
    coordinates (0 <= k'_i <= k_i, other coordinates fixed) with total degree
    >= 1 must also be in the support.
    """
    subset = sorted(set(subset))
    if any(not 0 <= i < p.r for i in subset):
        raise ValueError(f"subset {subset} out of range for r={p.r}")
    present = set(p.monomials)
    for mon in p.monomials:
        ranges = [range(mon[i] + 1) for i in subset]
        for lowered in product(*ranges):
            exps = list(mon.exponents)
            for i, e in zip(subset, lowered):
                exps[i] = e
            if sum(exps) < 1:
                continue
            if ExponentVector(tuple(exps)) not in present:
                return False
    return True


def max_v(p: PolynomialShape) -> CompletenessResult:
    if p.r > MAX_V_SEARCH_R:
        raise SearchTooLarge(f"exhaustive subset search is limited to r <= {MAX_V_SEARCH_R}, got r={p.r}")
    for v in range(p.r, -1, -1):
        for subset in combinations(range(p.r), v):
            if v_complete(p, subset):
                return CompletenessResult(v, frozenset(subset), True)
    raise AssertionError("v = 0 is always complete")  # pragma: no cover


@dataclass(frozen=True)
class ShapeInvariants:
    r: int
    N: int
    m: int
    S: int
    structure: StructureDecomposition
    v_max: int
    v_witness: frozenset[int]
    senior_form_full: bool
    indecomposable: bool

    @property
    def rho(self) -> int:
        return self.structure.rho

    @property
    def q(self) -> int:
        return self.structure.q

    @property
    def uniform_structure(self) -> bool:
        return self.structure.uniform


def shape_invariants(p: PolynomialShape) -> ShapeInvariants:
    mv = max_v(p)
    return ShapeInvariants(
        r=p.r, N=p.N, m=p.m, S=p.exponent_sum,
        structure=shape_structure(p),
        v_max=mv.v, v_witness=mv.witness_subset,
        senior_form_full=senior_form_support(p) == frozenset(range(p.r)),
        indecomposable=not is_decomposable(p).decomposable,
    )


def _inv(p) -> ShapeInvariants:
    return p if isinstance(p, ShapeInvariants) else shape_invariants(p)


def divergence_certificates(p, up_to_k: int) -> list[tuple[int, str]]:
    """Every (k, tag) with k <= up_to_k certified divergent, ordered by k then tag."""
    inv = _inv(p)
    out = []
    for k in range(1, up_to_k + 1):
        if k * inv.rho < inv.N:
            out.append((k, "T1"))
        if k >= inv.q and 2 * k * inv.r <= inv.v_max + inv.S:
            out.append((k, "T2"))
    return out


def max_divergent_k(inv: ShapeInvariants) -> int:
    """Largest k certified divergent (0 if none)."""
    best = 0
    t1 = (inv.N - 1) // inv.rho  # largest k with k * rho < N
    best = max(best, t1)
    t2 = (inv.v_max + inv.S) // (2 * inv.r)
    if t2 >= inv.q:
        best = max(best, t2)
    return best


def _min_k_strict(r: int, S: int) -> int:
    """Smallest natural k with 2kr > r + S."""
    return floor(Fraction(r + S, 2 * r)) + 1


def _min_k_weak(r: int, N: int) -> int:
    """Smallest natural k with 2kr >= 2N + r."""
    return max(1, ceil(Fraction(2 * N + r, 2 * r)))


def convergence_minimal_k(p, drop: str | None = None) -> dict[str, int]:
    """Minimal k per applicable convergence statement.

    ``drop`` removes one T3 condition ("q", "2N+r" or "r+S"); it exists to
    show in tests that each condition matters.
    """
    inv = _inv(p)
    if not (inv.indecomposable and inv.senior_form_full):
        return {}
    strict = _min_k_strict(inv.r, inv.S)
    weak = _min_k_weak(inv.r, inv.N)
    t3 = [("q", inv.q), ("2N+r", weak), ("r+S", strict)]
    out = {"T3": max(1, *(v for name, v in t3 if name != drop))}
    if drop is None:
        if inv.uniform_structure:
            out["T4"] = max(ceil(Fraction(inv.N, inv.rho)), weak, strict)
        out["C"] = max(inv.N, strict)
    return out


@dataclass(frozen=True)
class Certificate:
    two_k: int
    tag: str


def convergence_certificate(p) -> Certificate | None:
    """Smallest even 2k certified convergent; ties go to T3, then T4, then C."""
    mins = convergence_minimal_k(p)
    if not mins:
        return None
    tag = min(CONVERGENCE_TAGS, key=lambda t: (mins.get(t, float("inf")), CONVERGENCE_TAGS.index(t)))
    return Certificate(2 * mins[tag], tag)


def _frac_dict(x: Fraction | None, tags) -> dict | None:
    if x is None:
        return None
    return {"value": float(x), "exact": str(x), "theorems": list(tags)}


@dataclass
class ConvergenceReport:
    r: int
    N: int
    m: int
    S: int
    rho: int
    q: int
    structure: tuple[int, ...]
    v_max: int
    v_witness: tuple[int, ...]
    divergent: list[tuple[int, str]]
    convergent: Certificate | None
    convergence_minimal_k: dict[str, int]
    gamma_low: Fraction
    gamma_low_tags: tuple[str, ...]
    gamma_high: Fraction | None
    gamma_high_tags: tuple[str, ...]
    hypothesis_flags: dict[str, bool]
    k_status: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def exact_exponent(self) -> Fraction | None:
        if self.gamma_high is not None and self.gamma_low == self.gamma_high:
            return self.gamma_low
        return None

    @property
    def threshold_conflict(self) -> bool:
        return self.gamma_high is not None and self.gamma_low > self.gamma_high

    def status_of(self, k: int) -> str:
        if any(kk == k for kk, _ in self.divergent):
            return "divergent"
        if self.convergent is not None and 2 * k >= self.convergent.two_k:
            return "convergent"
        return "unknown"

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "N": self.N,
            "m": self.m,
            "S": self.S,
            "rho": self.rho,
            "q": self.q,
            "structure": list(self.structure),
            "v_max": self.v_max,
            "v_witness": [i + 1 for i in self.v_witness],
            "hypothesis_flags": dict(self.hypothesis_flags),
            "divergence_region": [{"k": k, "two_k": 2 * k, "theorem": t} for k, t in self.divergent],
            "convergence_region": None if self.convergent is None else {
                "smallest_two_k": self.convergent.two_k,
                "theorem": self.convergent.tag,
                "minimal_k_by_theorem": dict(self.convergence_minimal_k),
            },
            "real_thresholds": {
                "gamma_low": _frac_dict(self.gamma_low, self.gamma_low_tags),
                "gamma_high": _frac_dict(self.gamma_high, self.gamma_high_tags),
                "exact_exponent": None if self.exact_exponent is None else str(self.exact_exponent),
                "threshold_conflict": self.threshold_conflict,
            },
            "k_status": self.k_status,
            "notes": list(self.notes),
        }


def convergence_report(p: PolynomialShape) -> ConvergenceReport:
    inv = shape_invariants(p)
    cert = convergence_certificate(inv)
    mins = convergence_minimal_k(inv)

    k_div = max_divergent_k(inv)
    horizon = max(k_div, cert.two_k // 2 if cert else 0, inv.q, 1)
    divergent = divergence_certificates(inv, horizon)

    low = [(Fraction(2 * inv.N, inv.rho), "T1")]
    t2 = Fraction(inv.v_max + inv.S, inv.r)
    if t2 >= 2 * inv.q:
        low.append((t2, "T2"))
    gamma_low = max(v for v, _ in low)
    low_tags = tuple(t for v, t in low if v == gamma_low)

    gamma_high = Fraction(inv.r + inv.S, inv.r) if mins else None
    high_tags = tuple(t for t in CONVERGENCE_TAGS if t in mins)

    report = ConvergenceReport(
        r=inv.r, N=inv.N, m=inv.m, S=inv.S, rho=inv.rho, q=inv.q,
        structure=inv.structure.blocks,
        v_max=inv.v_max, v_witness=tuple(sorted(inv.v_witness)),
        divergent=divergent, convergent=cert, convergence_minimal_k=mins,
        gamma_low=gamma_low, gamma_low_tags=low_tags,
        gamma_high=gamma_high, gamma_high_tags=high_tags,
        hypothesis_flags={
            "senior_form_full": inv.senior_form_full,
            "indecomposable": inv.indecomposable,
            "uniform_structure": inv.uniform_structure,
        },
    )
    for k in range(1, horizon + 1):
        tags = [t for kk, t in divergent if kk == k]
        status = report.status_of(k)
        entry = {"k": k, "two_k": 2 * k, "status": status}
        if status == "divergent":
            entry["theorems"] = tags
        elif status == "convergent":
            entry["theorems"] = [t for t, kmin in mins.items() if k >= kmin]
        report.k_status.append(entry)

    if inv.v_max > 0:
        report.notes.append("v-completeness bounds the lowered subset sum by the subset's own exponent sum")
    if any(e["status"] == "unknown" and e["k"] < inv.q for e in report.k_status):
        report.notes.append("k < q outside T1 is not covered by any divergence statement")
    if gamma_high is None:
        report.notes.append("convergence hypotheses fail; gamma_high unknown")
    if report.threshold_conflict:
        report.notes.append("real thresholds cross (gamma_low > gamma_high); integer certificates remain disjoint")
    return report
