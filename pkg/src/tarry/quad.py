"""Numerical estimates of I(alpha) = int_[0,1]^r exp(2 pi i F(x)) dx and of truncated theta_k.

theta_k integrates |I(alpha)|^(2k) over all of R^N.  Here that integral is
cut into a central box [-a0, a0]^N and sup-norm shells
{a0 2^i <= |alpha|_inf < a0 2^(i+1)}; each shell is estimated by plain Monte
Carlo, and the ratios of consecutive shell masses are used as a decay
diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from . import _parallel
from .exponents import PolynomialShape

TENSOR_MAX_R = 3
DEFAULT_RESOLUTION = 8.0
_CHUNK_ELEMENTS = 4_000_000


class ResolutionError(RuntimeError):
    """The quadrature could not reach the requested accuracy."""


@dataclass(frozen=True)
class InnerEstimate:
    value: complex
    error: float
    nodes: int
    mode: str


def _check_alpha(p: PolynomialShape, alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float).reshape(-1)
    if a.shape[0] != p.N:
        raise ValueError(f"alpha has length {a.shape[0]}, shape has N={p.N}")
    return a


def node_count(p: PolynomialShape, amax: float, resolution: float = DEFAULT_RESOLUTION) -> int:
    """Nodes per axis: resolution * (1 + m * max|alpha_j|)."""
    return int(math.ceil(resolution * (1.0 + p.m * float(amax))))


@lru_cache(maxsize=32)
def _gauss_legendre_grid(n: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    if r == 1:
        return x[:, None], w
    grids = np.meshgrid(*([x] * r), indexing="ij")
    weights = np.meshgrid(*([w] * r), indexing="ij")
    X = np.stack([g.reshape(-1) for g in grids], axis=1)
    W = np.prod(np.stack([g.reshape(-1) for g in weights], axis=1), axis=1)
    return X, W


def _monomial_table(p: PolynomialShape, X: np.ndarray) -> np.ndarray:
    """gamma_j at each node: shape (N, nodes)."""
    E = np.array(p.as_lists(), dtype=float)
    return np.prod(X[None, :, :] ** E[:, None, :], axis=2)


def _integrate_batch(p: PolynomialShape, alphas: np.ndarray, X: np.ndarray, W: np.ndarray) -> np.ndarray:
    G = _monomial_table(p, X)
    out = np.empty(alphas.shape[0], dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // max(1, X.shape[0]))
    for s in range(0, alphas.shape[0], chunk):
        phase = alphas[s:s + chunk] @ G
        out[s:s + chunk] = np.exp(2j * np.pi * phase) @ W
    return out


def _tensor_batch(p: PolynomialShape, alphas: np.ndarray, n: int) -> np.ndarray:
    X, W = _gauss_legendre_grid(n, p.r)
    return _integrate_batch(p, alphas, X, W)


def _qmc_batch(p: PolynomialShape, alphas: np.ndarray, points: int, seed: int,
               scrambles: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over independently scrambled Sobol' point sets."""
    m = max(1, int(math.ceil(math.log2(max(2, points)))))
    ests = []
    for s in range(scrambles):
        rng = _parallel.batch_rng(seed, 7919, s)
        X = qmc.Sobol(d=p.r, scramble=True, seed=rng).random_base2(m)
        W = np.full(X.shape[0], 1.0 / X.shape[0])
        ests.append(_integrate_batch(p, alphas, X, W))
    ests = np.array(ests)
    return ests.mean(axis=0), ests.std(axis=0, ddof=1) / math.sqrt(scrambles)


def inner_integral(p: PolynomialShape, alpha, resolution: float = DEFAULT_RESOLUTION,
                   mode: str = "auto", tol: float | None = None,
                   qmc_points: int = 2 ** 14, seed: int = 0) -> InnerEstimate:
    """Estimate I(alpha) with an error estimate.

    Tensor Gauss-Legendre (r <= 3) compares the rule against one with a
    quarter fewer nodes; the QMC mode uses the spread over scrambles.
    Raises ResolutionError when ``tol`` is given and not met.
    """
    a = _check_alpha(p, alpha)
    if mode == "auto":
        mode = "tensor" if p.r <= TENSOR_MAX_R else "qmc"
    if not np.any(a):
        return InnerEstimate(1.0 + 0.0j, 0.0, 1, mode)
    if mode == "tensor":
        n = node_count(p, np.abs(a).max(), resolution)
        fine = _tensor_batch(p, a[None], n)[0]
        coarse = _tensor_batch(p, a[None], max(1, n - max(4, n // 4)))[0]
        est = InnerEstimate(complex(fine), float(abs(fine - coarse)), n ** p.r, mode)
    elif mode == "qmc":
        mean, se = _qmc_batch(p, a[None], qmc_points, seed)
        est = InnerEstimate(complex(mean[0]), float(3 * se[0]), qmc_points, mode)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if tol is not None and est.error > tol:
        raise ResolutionError(f"estimated error {est.error:.3g} exceeds tolerance {tol:.3g} "
                              f"({est.mode}, {est.nodes} nodes)")
    return est


def inner_integral_batch(p: PolynomialShape, alphas: np.ndarray, amax: float,
                         resolution: float = DEFAULT_RESOLUTION, qmc_points: int = 2 ** 12,
                         seed: int = 0) -> np.ndarray:
    """I at each row of ``alphas`` using one rule sized for |alpha_j| <= amax."""
    alphas = np.asarray(alphas, dtype=float)
    if p.r <= TENSOR_MAX_R:
        return _tensor_batch(p, alphas, node_count(p, amax, resolution))
    return _qmc_batch(p, alphas, qmc_points, seed, scrambles=1)[0]


# ---------------------------------------------------------------------------
# shells
# ---------------------------------------------------------------------------

def _check_two_k(two_k: int) -> int:
    if two_k < 2 or two_k % 2:
        raise ValueError(f"2k must be a positive even integer, got {two_k}")
    return int(two_k)


def sample_shell(rng: np.random.Generator, N: int, a_lo: float, a_hi: float, count: int) -> np.ndarray:
    """Uniform points of {a_lo <= |alpha|_inf < a_hi} in R^N.

    The sup-norm radius has density proportional to t^(N-1); given the
    radius, the point is uniform on the cube surface (all 2N faces have
    equal area).
    """
    u = rng.random(count)
    s = (a_lo ** N + u * (a_hi ** N - a_lo ** N)) ** (1.0 / N)
    pts = rng.uniform(-1.0, 1.0, size=(count, N)) * s[:, None]
    face = rng.integers(0, N, size=count)
    sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    pts[np.arange(count), face] = sign * s
    return pts


def shell_volume(N: int, a_lo: float, a_hi: float) -> float:
    return (2.0 * a_hi) ** N - (2.0 * a_lo) ** N


@dataclass(frozen=True)
class ShellEstimate:
    A_lo: float
    A_hi: float
    two_k: int
    mass: float
    std_error: float
    samples: int

    def to_dict(self) -> dict:
        return asdict(self)


def _shell_moments(p, two_k, a_lo, a_hi, samples, seed, shell_key, resolution, half=0):
    """(sum f, sum f^2) over the shell's sample batches, f = |I|^(2k).

    ``half`` = +1 / -1 restricts to alpha_1 >= 0 / <= 0 by reflection.
    """
    def run(batch):
        b, _, count = batch
        rng = _parallel.batch_rng(seed, shell_key, b)
        if a_lo == 0.0:
            alphas = rng.uniform(-a_hi, a_hi, size=(count, p.N))
        else:
            alphas = sample_shell(rng, p.N, a_lo, a_hi, count)
        if half:
            alphas[:, 0] = half * np.abs(alphas[:, 0])
        vals = np.abs(inner_integral_batch(p, alphas, a_hi, resolution, seed=seed)) ** two_k
        return _parallel.pairwise_sum(vals), _parallel.pairwise_sum(vals * vals)

    res = _parallel.ordered_map(run, _parallel.batches(samples))
    return _parallel.pairwise_sum(r[0] for r in res), _parallel.pairwise_sum(r[1] for r in res)


def shell_mass(p: PolynomialShape, two_k: int, A_lo: float, A_hi: float, samples: int = 10_000,
               seed: int = 0, shell_key: int = 0, resolution: float = DEFAULT_RESOLUTION,
               half: int = 0) -> ShellEstimate:
    """Monte Carlo estimate of the integral of |I|^(2k) over a sup-norm shell.

    ``A_lo = 0`` means the full box [-A_hi, A_hi]^N.  Samples depend only on
    (seed, shell_key), so re-running one shell inside a longer schedule
    reproduces it exactly.
    """
    two_k = _check_two_k(two_k)
    if not 0 <= A_lo <= A_hi:
        raise ValueError("need 0 <= A_lo <= A_hi")
    vol = shell_volume(p.N, A_lo, A_hi)
    if half:
        vol /= 2.0
    if A_lo == A_hi or samples == 0:
        return ShellEstimate(A_lo, A_hi, two_k, 0.0, 0.0, samples)
    s1, s2 = _shell_moments(p, two_k, A_lo, A_hi, samples, seed, shell_key, resolution, half)
    mean = s1 / samples
    var = max(0.0, (s2 - samples * mean * mean) / max(1, samples - 1))
    return ShellEstimate(A_lo, A_hi, two_k, vol * mean, vol * math.sqrt(var / samples), samples)


@dataclass(frozen=True)
class ThetaEstimate:
    """Truncated theta_k: box [-a0, a0]^N plus doubling shells out to a_max."""

    value: float
    std_error: float
    central: ShellEstimate | None
    shells: tuple[ShellEstimate, ...]
    partial_sums: tuple[float, ...]

    @property
    def last_shell_fraction(self) -> float:
        if not self.shells or self.value == 0:
            return 0.0
        return self.shells[-1].mass / self.value

    @property
    def stabilized(self) -> bool:
        return bool(self.shells) and self.last_shell_fraction < 0.01


def shell_edges(a0: float, a_max: float) -> list[tuple[float, float]]:
    edges = []
    lo = a0
    while lo < a_max:
        hi = min(2.0 * lo, a_max)
        edges.append((lo, hi))
        lo = hi
    return edges


def theta_truncated(p: PolynomialShape, two_k: int, a_max: float, samples: int = 10_000,
                    seed: int = 0, a0: float = 1.0,
                    resolution: float = DEFAULT_RESOLUTION) -> ThetaEstimate:
    two_k = _check_two_k(two_k)
    if a_max <= 0:
        return ThetaEstimate(0.0, 0.0, None, (), (0.0,))
    box = min(a0, a_max)
    central = shell_mass(p, two_k, 0.0, box, samples, seed, 0, resolution)
    shells = tuple(
        shell_mass(p, two_k, lo, hi, samples, seed, i + 1, resolution)
        for i, (lo, hi) in enumerate(shell_edges(a0, a_max))
    )
    sums = [central.mass]
    for sh in shells:
        sums.append(sums[-1] + sh.mass)
    se = math.sqrt(central.std_error ** 2 + sum(s.std_error ** 2 for s in shells))
    return ThetaEstimate(sums[-1], se, central, shells, tuple(sums))


# ---------------------------------------------------------------------------
# decay diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    slope: float | None
    ratios: tuple[float, ...]
    classification: str  # "converging" | "diverging" | "inconclusive"
    shells_used: int
    eps: float

    def to_dict(self) -> dict:
        return asdict(self)


def decay_fit(shells, eps: float = 0.1, window: int = 3) -> DecayFit:
    """Classify the trailing ``window`` ratios of consecutive shell masses.

    Converging when every ratio is <= 1 - eps, diverging when every ratio is
    >= 1 - eps, inconclusive otherwise or when a mass vanishes.
    """
    masses = [s.mass if isinstance(s, ShellEstimate) else float(s) for s in shells]
    if len(masses) < window + 1:
        raise ValueError(f"need at least {window + 1} shells, got {len(masses)}")
    tail = masses[-(window + 1):]
    if any(m <= 0 for m in tail):
        return DecayFit(None, (), "inconclusive", window + 1, eps)
    ratios = tuple(tail[i + 1] / tail[i] for i in range(window))
    slope = sum(math.log2(x) for x in ratios) / window
    if all(x <= 1 - eps for x in ratios):
        cls = "converging"
    elif all(x >= 1 - eps for x in ratios):
        cls = "diverging"
    else:
        cls = "inconclusive"
    return DecayFit(slope, ratios, cls, window + 1, eps)


@dataclass(frozen=True)
class ShellConfig:
    a_max: float = 64.0
    shells: int = 8
    samples: int = 100_000
    seed: int = 42
    eps: float = 0.1
    window: int = 3
    resolution: float = DEFAULT_RESOLUTION

    @property
    def a0(self) -> float:
        return self.a_max / 2 ** self.shells


@dataclass
class EmpiricalReport:
    two_k: int
    config: ShellConfig
    shells: list[ShellEstimate]
    fit: DecayFit
    certified: str  # "divergent" | "convergent" | "unknown"
    certified_by: list[str] = field(default_factory=list)

    @property
    def agreement(self) -> str:
        if self.certified == "unknown":
            return "untested"
        if self.fit.classification == "inconclusive":
            return "inconclusive"
        expected = "diverging" if self.certified == "divergent" else "converging"
        return "agree" if self.fit.classification == expected else "disagree"

    def to_dict(self) -> dict:
        return {
            "two_k": self.two_k,
            "config": asdict(self.config),
            "shells": [s.to_dict() for s in self.shells],
            "ratios": list(self.fit.ratios),
            "slope": self.fit.slope,
            "classification": self.fit.classification,
            "certified": self.certified,
            "certified_by": list(self.certified_by),
            "agreement_with_bounds": self.agreement,
        }


def classify_empirical(p: PolynomialShape, two_k: int, config: ShellConfig | None = None,
                       report=None) -> EmpiricalReport:
    """Run the shell schedule, fit the decay and compare with the certificates."""
    from .criteria import convergence_report

    config = config or ShellConfig()
    two_k = _check_two_k(two_k)
    edges = [(config.a0 * 2 ** i, config.a0 * 2 ** (i + 1)) for i in range(config.shells)]
    shells = [shell_mass(p, two_k, lo, hi, config.samples, config.seed, i + 1, config.resolution)
              for i, (lo, hi) in enumerate(edges)]
    fit = decay_fit(shells, config.eps, config.window)
    report = report or convergence_report(p)
    k = two_k // 2
    status = report.status_of(k)
    by = [e.get("theorems", []) for e in report.k_status if e["k"] == k]
    if status == "convergent" and not by:
        by = [[t for t, kmin in report.convergence_minimal_k.items() if k >= kmin]]
    return EmpiricalReport(two_k, config, shells, fit, status, by[0] if by else [])
