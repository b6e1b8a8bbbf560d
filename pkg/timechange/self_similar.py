"""Self-similar measures on [0, 1] under the convex open set condition.

An IFS here is a list of maps S_i(x) = r_i x + d_i with probability weights
p_i. For convex-OSC systems the L^q spectrum solves
sum_i p_i^q r_i^(-tau) = 1 exactly, and cylinder words give exact covers of
the attractor at a uniform scale.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from timechange.errors import DomainError, NumericalError, PreconditionError, ResourceError, ValidationError

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12
TAU_BRACKET = (-64.0, 64.0)
MAX_WORD_DEPTH = 64


@dataclass(frozen=True)
class IFS:
    """Contraction ratios, translations and probability weights of an IFS on [0, 1]."""

    ratios: Tuple[float, ...]
    translations: Tuple[float, ...]
    weights: Tuple[float, ...]
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        object.__setattr__(self, "translations", tuple(float(d) for d in self.translations))
        object.__setattr__(self, "weights", tuple(float(p) for p in self.weights))

        m = len(self.ratios)
        if m < 2 or len(self.translations) != m or len(self.weights) != m:
            raise ValidationError(
                f"IFS '{self.name}' needs at least two maps with matching ratios, translations and weights"
            )
        if any(not 0.0 < r < 1.0 for r in self.ratios):
            raise ValidationError(f"IFS '{self.name}': contraction ratios must lie in (0, 1)")
        if any(p <= 0.0 for p in self.weights):
            raise ValidationError(f"IFS '{self.name}': weights must be positive")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(
                f"IFS '{self.name}': weights sum to {math.fsum(self.weights)!r}, expected 1 within {WEIGHT_TOLERANCE}"
            )
        if self.translations[0] != 0.0 or any(b < a for a, b in zip(self.translations, self.translations[1:])):
            raise ValidationError(f"IFS '{self.name}': translations must start at 0 and be sorted")
        if abs(self.translations[-1] - (1.0 - self.ratios[-1])) > WEIGHT_TOLERANCE:
            raise ValidationError(f"IFS '{self.name}': the last map must send 1 to 1")

    @property
    def size(self) -> int:
        return len(self.ratios)

    @property
    def convex_osc(self) -> bool:
        """True when the images S_i(0, 1) are pairwise disjoint."""
        return all(
            self.translations[i + 1] >= self.translations[i] + self.ratios[i] - WEIGHT_TOLERANCE
            for i in range(self.size - 1)
        )

    @property
    def equicontractive(self) -> bool:
        return max(self.ratios) - min(self.ratios) <= WEIGHT_TOLERANCE

    @property
    def full_support(self) -> bool:
        """True when the first-level cylinders cover [0, 1] without gaps."""
        reach = 0.0
        for r, d in zip(self.ratios, self.translations):
            if d > reach + WEIGHT_TOLERANCE:
                return False
            reach = max(reach, d + r)
        return reach >= 1.0 - WEIGHT_TOLERANCE

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.array(self.ratios), np.array(self.translations), np.array(self.weights)


def _golden_bernoulli() -> IFS:
    rho = (math.sqrt(5.0) - 1.0) / 2.0
    return IFS((rho, rho), (0.0, 1.0 - rho), (0.5, 0.5), name="golden-bernoulli")


PRESET_IFS = {
    "cantor3": lambda: IFS((1 / 3, 1 / 3), (0.0, 2 / 3), (0.5, 0.5), name="cantor3"),
    "uneven-2-4": lambda: IFS((0.5, 0.25), (0.0, 0.75), (0.5, 0.5), name="uneven-2-4"),
    "golden-bernoulli": _golden_bernoulli,
    "dyadic-uniform": lambda: IFS((0.5, 0.5), (0.0, 0.5), (0.5, 0.5), name="dyadic-uniform"),
}


def preset_ifs(name: str) -> IFS:
    """Look up a named IFS preset"""
    try:
        return PRESET_IFS[name]()
    except KeyError:
        raise ValidationError(f"Unknown IFS preset '{name}'. Available: {', '.join(sorted(PRESET_IFS))}") from None


def _require_convex_osc(ifs: IFS, operation: str) -> None:
    if not ifs.convex_osc:
        raise PreconditionError(f"{operation} requires the convex open set condition; IFS '{ifs.name}' overlaps")


# ------------------ L^q SPECTRUM ------------------


def lq_spectrum(ifs: IFS, q: float, tol: float = 1e-12) -> float:
    """Solve sum_i p_i^q r_i^(-tau) = 1 for tau.

    The left side is strictly increasing in tau, so the root is bracketed on
    TAU_BRACKET with brentq at coarse tolerance and then polished by Newton.
    Equicontractive systems return the closed form log(sum p^q) / log r after
    comparing it with the iterative root.
    """
    _require_convex_osc(ifs, "lq_spectrum")
    if tol <= 0:
        raise DomainError("tol must be positive")

    r, _, p = ifs.arrays()
    log_r, log_p = np.log(r), np.log(p)

    def moment(tau):
        return float(np.sum(np.exp(q * log_p - tau * log_r))) - 1.0

    def moment_prime(tau):
        return float(np.sum(-log_r * np.exp(q * log_p - tau * log_r)))

    lo, hi = TAU_BRACKET
    if moment(lo) > 0 or moment(hi) < 0:
        raise NumericalError(f"tau({q}) for IFS '{ifs.name}' lies outside the bracket {TAU_BRACKET}")

    rough = optimize.brentq(moment, lo, hi, xtol=1e-3)
    try:
        tau = float(optimize.newton(moment, rough, fprime=moment_prime, tol=tol * 0.1, maxiter=100))
        if not lo <= tau <= hi:
            raise RuntimeError("Newton left the bracket")
    except RuntimeError:
        logger.debug("Newton polish failed for q=%s, falling back to brentq", q)
        tau = float(optimize.brentq(moment, lo, hi, xtol=tol * 0.1, rtol=4 * np.finfo(float).eps))

    if ifs.equicontractive:
        closed = math.log(float(np.sum(np.exp(q * log_p)))) / math.log(ifs.ratios[0])
        if abs(closed - tau) > max(10 * tol, 1e-9):
            logger.warning("tau(%s) closed form %.15g disagrees with root %.15g", q, closed, tau)
        tau = closed
    return tau


def tau_curve(ifs: IFS, q_grid: Sequence[float], tol: float = 1e-12) -> pd.Series:
    """tau sampled on a q grid, indexed by q."""
    q_values = np.asarray(q_grid, dtype=float)
    return pd.Series([lq_spectrum(ifs, q, tol) for q in q_values], index=pd.Index(q_values, name="q"), name="tau")


def tau_derivative(ifs: IFS, q: float, step: float = 1e-5) -> float:
    return (lq_spectrum(ifs, q + step) - lq_spectrum(ifs, q - step)) / (2 * step)


def box_dimension(ifs: IFS) -> float:
    """Similarity dimension of the attractor, -tau(0)."""
    return -lq_spectrum(ifs, 0.0)


def gibbs_weights(ifs: IFS, q: float) -> IFS:
    """IFS carrying the weights p_i^q r_i^(-tau(q))."""
    tau = lq_spectrum(ifs, q)
    r, d, p = ifs.arrays()
    q_weights = p**q * r ** (-tau)
    q_weights = q_weights / q_weights.sum()
    return IFS(tuple(r), tuple(d), tuple(q_weights), name=f"{ifs.name}@q={q:g}")


@dataclass(frozen=True)
class LegendreResult:
    value: float
    q_star: float
    at_boundary: bool


def legendre_transform(tau_values: pd.Series, alpha: float) -> LegendreResult:
    """min over the sampled grid of q*alpha - tau(q).

    The boundary flag is raised when an end of the grid is strictly below
    every interior value; the true infimum may then lie outside the grid.
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    q = np.asarray(tau_values.index, dtype=float)
    tau = np.asarray(tau_values.values, dtype=float)
    if q.size < 3 or q.min() > -10 + 1e-9 or q.max() < 10 - 1e-9:
        raise DomainError("the q grid must span at least [-10, 10]")
    if np.max(np.diff(q)) > 0.01 + 1e-9:
        raise DomainError("the q grid step must be at most 0.01")

    values = q * alpha - tau
    interior = values[1:-1]
    interior_min = interior.min()
    edge_min = min(values[0], values[-1])
    scale = max(1.0, abs(interior_min))
    if edge_min < interior_min - 1e-12 * scale:
        index = 0 if values[0] <= values[-1] else len(values) - 1
        logger.warning("Legendre minimum at grid boundary q=%g for alpha=%g", q[index], alpha)
        return LegendreResult(float(values[index]), float(q[index]), True)
    index = 1 + int(np.argmin(interior))
    return LegendreResult(float(values[index]), float(q[index]), False)


# ------------------ WORD SETS ------------------


@dataclass(frozen=True)
class WordSet:
    """The cut-set Lambda_n of words with r_sigma <= t^n < r_(sigma^-)."""

    base_scale: float
    level: int
    words: Tuple[Tuple[int, ...], ...]
    ratios: np.ndarray = field(compare=False)
    masses: np.ndarray = field(compare=False)
    left: np.ndarray = field(compare=False)

    def __len__(self):
        return len(self.words)

    @property
    def midpoints(self) -> np.ndarray:
        return self.left + self.ratios / 2.0

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "word": ["".join(str(i) for i in w) for w in self.words],
                "r": self.ratios,
                "p": self.masses,
                "left": self.left,
            }
        )


def enumerate_lambda_n(ifs: IFS, t: float, n: int) -> WordSet:
    """Depth-first traversal emitting each word the first time r_sigma <= t^n."""
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in (0, 1)")
    if n < 1:
        raise DomainError("n must be at least 1")
    depth = n * math.log(t) / math.log(max(ifs.ratios))
    if depth > MAX_WORD_DEPTH:
        raise ResourceError(f"word depth {depth:.1f} exceeds the limit of {MAX_WORD_DEPTH}")

    threshold = t**n * (1.0 + 1e-12)
    words: List[Tuple[int, ...]] = []
    ratios: List[float] = []
    masses: List[float] = []
    lefts: List[float] = []

    # children are pushed in reverse so they pop left to right
    stack = [((), 1.0, 1.0, 0.0)]
    while stack:
        word, r_word, p_word, left = stack.pop()
        if r_word <= threshold:
            words.append(word)
            ratios.append(r_word)
            masses.append(p_word)
            lefts.append(left)
            continue
        for i in reversed(range(ifs.size)):
            stack.append(
                (word + (i,), r_word * ifs.ratios[i], p_word * ifs.weights[i], left + r_word * ifs.translations[i])
            )

    order = np.argsort(np.array(lefts), kind="stable")
    return WordSet(
        base_scale=t,
        level=n,
        words=tuple(words[k] for k in order),
        ratios=np.array(ratios)[order],
        masses=np.array(masses)[order],
        left=np.array(lefts)[order],
    )


def children_counts(ifs: IFS, t: float, n: int) -> np.ndarray:
    """#Lambda_(sigma,n) = #{sigma' : sigma sigma' in Lambda_(n+1)} for each sigma in Lambda_n."""
    parents = enumerate_lambda_n(ifs, t, n)
    children = enumerate_lambda_n(ifs, t, n + 1)
    position: Dict[Tuple[int, ...], int] = {w: k for k, w in enumerate(parents.words)}
    counts = np.zeros(len(parents), dtype=int)
    for word in children.words:
        for cut in range(len(word), -1, -1):
            k = position.get(word[:cut])
            if k is not None:
                counts[k] += 1
                break
    return counts


def lambda_n_moment_exponent(ifs: IFS, q: float, t: float, n: int) -> float:
    """log(sum over Lambda_n of p_sigma^q) / (n log t)."""
    words = enumerate_lambda_n(ifs, t, n)
    return float(np.log(np.sum(words.masses**q)) / (n * np.log(t)))


@dataclass(frozen=True)
class Quadrature:
    points: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(np.sum(self.weights * f(self.points)))


def measure_quadrature(ifs: IFS, n: int, t: Optional[float] = None) -> Quadrature:
    """Cylinder-midpoint rule for mu over Lambda_n, ordered by left endpoint.

    t defaults to the largest contraction ratio.
    """
    _require_convex_osc(ifs, "measure_quadrature")
    words = enumerate_lambda_n(ifs, max(ifs.ratios) if t is None else t, n)
    return Quadrature(points=words.midpoints, weights=words.masses.copy())


def predicted_graph_dim(ifs: IFS, H: float, tol: float = 1e-12) -> float:
    """Hausdorff dimension 1 - tau_mu(H) of the graph of B^H_(V(t)), V the CDF of mu."""
    if not 0.0 < H < 1.0:
        raise DomainError("H must lie in (0, 1)")
    return 1.0 - lq_spectrum(ifs, H, tol)


def fourier_product(ifs: IFS, xi: float, terms: int = 60) -> complex:
    """Truncated infinite product for the Fourier transform of an equicontractive self-similar measure.

    mu^(xi) = prod_(k>=1) sum_i p_i exp(-2 pi i xi d_i r^(k-1)); for the
    middle-third Cantor measure its modulus is prod_k |cos(2 pi xi / 3^k)|.
    """
    if not ifs.equicontractive:
        raise PreconditionError(f"the product formula needs equal contraction ratios; '{ifs.name}' has several")
    r, d, p = ifs.arrays()
    scales = r[0] ** np.arange(terms)
    factors = np.exp(-2j * np.pi * xi * np.outer(scales, d)) @ p
    return complex(np.prod(factors))
