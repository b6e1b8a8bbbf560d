"""Catalog of variance functions V, their generalized inverses and Hölder indices.

A variance function is the deterministic clock of a centered additive
process: X_t - X_u ~ N(0, V(t) - V(u)). Every entry is continuous,
non-decreasing and starts at V(0) = 0.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from timechange.errors import DomainError, PreconditionError, RangeError, StateError, ValidationError
from timechange.self_similar import IFS, preset_ifs

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

CANTOR_DIGITS = 64
DEFAULT_CDF_DEPTH = 40

# pair sampling inside I(t, delta)
GEOMETRIC_DEPTH = 44
CLOSE_PAIR_EXPONENTS = np.arange(4, 45, 4)
# pairs closer than delta * 2^-REFINE_EXPONENT are left out of the coarse supremum
REFINE_EXPONENT = 4

UPPER_DELTAS = tuple(2.0 ** -k for k in range(2, 41, 2))
LOWER_DELTAS = tuple(2.0 ** -k for k in range(1, 53, 3))
# relative to V(S); errors in beta reach alpha multiplied by alpha^2
INVERSE_DELTAS = tuple(2.0 ** -k for k in range(2, 201, 6))
UPPER_ALPHA_GRID = tuple(np.round(np.arange(0.0, 2.0 + 1e-9, 0.01), 10))
LOWER_ALPHA_GRID = tuple(np.round(np.arange(0.0, 8.0 + 1e-9, 0.01), 10))


class VarianceKind(Enum):
    IDENTITY = "identity"
    POWER_LAW = "power-law"
    PIECEWISE_LINEAR = "piecewise-linear"
    CANTOR_STAIRCASE = "cantor-staircase"
    SELF_SIMILAR_CDF = "self-similar-cdf"
    ITERATED_CDF = "iterated-cdf"


@dataclass(frozen=True)
class VarianceFunction:
    """An increasing continuous V on [0, S] together with its metadata.

    Use the constructors below (identity, power_law, ...) rather than
    building instances directly.
    """

    kind: VarianceKind
    domain_end: float = 1.0
    beta: Optional[float] = None
    breakpoints: Optional[Tuple[Tuple[float, float], ...]] = None
    ifs: Optional[IFS] = None
    depth: Optional[int] = None
    grid_size: Optional[int] = None
    iterations: Optional[int] = None
    grid_values: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    convergence: Optional[Tuple[float, ...]] = field(default=None, compare=False, repr=False)
    gamma_override: Optional[float] = None

    def __post_init__(self):
        if not self.domain_end > 0:
            raise ValidationError("domain_end must be positive")

    @property
    def name(self) -> str:
        if self.kind is VarianceKind.POWER_LAW:
            return f"power-law(beta={self.beta:g})"
        if self.kind is VarianceKind.SELF_SIMILAR_CDF:
            return f"self-similar-cdf({self.ifs.name}, depth={self.depth})"
        if self.kind is VarianceKind.ITERATED_CDF:
            return f"iterated-cdf({self.ifs.name}, grid={self.grid_size}, iterations={self.iterations})"
        return self.kind.value

    @property
    def strictly_increasing(self) -> bool:
        if self.kind in (VarianceKind.IDENTITY, VarianceKind.POWER_LAW):
            return True
        if self.kind is VarianceKind.PIECEWISE_LINEAR:
            levels = [v for _, v in self.breakpoints]
            return all(b > a for a, b in zip(levels, levels[1:]))
        if self.kind is VarianceKind.CANTOR_STAIRCASE:
            return False
        return self.ifs.full_support

    @property
    def inverse_holder_gamma(self) -> Optional[float]:
        """A known Hölder exponent of T = V^(-1), when one is available."""
        if self.gamma_override is not None:
            return self.gamma_override
        if self.kind is VarianceKind.IDENTITY:
            return 1.0
        if self.kind is VarianceKind.POWER_LAW:
            return min(1.0, 1.0 / self.beta)
        if self.kind is VarianceKind.PIECEWISE_LINEAR and self.strictly_increasing:
            return 1.0
        return None

    @property
    def is_built(self) -> bool:
        return self.kind is not VarianceKind.ITERATED_CDF or self.grid_values is not None

    def total(self) -> float:
        """V(S)"""
        return float(evaluate(self, self.domain_end))


# ------------------ CONSTRUCTORS ------------------


def identity(domain_end: float = 1.0) -> VarianceFunction:
    return VarianceFunction(VarianceKind.IDENTITY, domain_end=domain_end)


def power_law(beta: float, domain_end: float = 1.0) -> VarianceFunction:
    if not beta > 0:
        raise ValidationError("power-law exponent beta must be positive")
    return VarianceFunction(VarianceKind.POWER_LAW, domain_end=domain_end, beta=float(beta))


def piecewise_linear(breakpoints: Sequence[Sequence[float]]) -> VarianceFunction:
    points = tuple((float(t), float(v)) for t, v in breakpoints)
    if len(points) < 2:
        raise ValidationError("piecewise-linear V needs at least two breakpoints")
    if points[0] != (0.0, 0.0):
        raise ValidationError("piecewise-linear V must start at (0, 0)")
    if any(b[0] <= a[0] for a, b in zip(points, points[1:])):
        raise ValidationError("breakpoint times must be strictly increasing")
    if any(b[1] < a[1] for a, b in zip(points, points[1:])):
        raise ValidationError("breakpoint values must be non-decreasing")
    return VarianceFunction(VarianceKind.PIECEWISE_LINEAR, domain_end=points[-1][0], breakpoints=points)


def cantor_staircase(domain_end: float = 1.0) -> VarianceFunction:
    return VarianceFunction(VarianceKind.CANTOR_STAIRCASE, domain_end=domain_end)


def self_similar_cdf(ifs: IFS, depth: int = DEFAULT_CDF_DEPTH) -> VarianceFunction:
    if not ifs.convex_osc:
        raise PreconditionError(f"self-similar CDF needs the convex open set condition; use iterated-cdf for '{ifs.name}'")
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    return VarianceFunction(VarianceKind.SELF_SIMILAR_CDF, ifs=ifs, depth=int(depth))


def iterated_cdf(ifs: IFS, grid_size: int, iterations: int, gamma: Optional[float] = None) -> VarianceFunction:
    """Unbuilt IteratedCDF entry; evaluate() refuses it until build_iterated_cdf runs."""
    return VarianceFunction(
        VarianceKind.ITERATED_CDF, ifs=ifs, grid_size=int(grid_size), iterations=int(iterations), gamma_override=gamma
    )


def build_iterated_cdf(ifs: IFS, grid_size: int, iterations: int, gamma: Optional[float] = None) -> VarianceFunction:
    """Fixed-point iteration of the CDF equation V(x) = sum_i p_i V(S_i^(-1) x) on a uniform grid.

    Starts from V_0(x) = x and keeps the sup-norm distance between successive
    iterates as a convergence record.
    """
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2")
    if iterations < 1:
        raise ValidationError("iterations must be at least 1")
    if abs(math.fsum(ifs.weights) - 1.0) > 1e-12:
        raise ValidationError("IFS weights must sum to 1")

    grid = np.linspace(0.0, 1.0, grid_size)
    values = grid.copy()
    history = []
    for _ in range(iterations):
        updated = np.zeros_like(values)
        for r, d, p in zip(ifs.ratios, ifs.translations, ifs.weights):
            updated += p * np.interp((grid - d) / r, grid, values, left=0.0, right=1.0)
        updated = np.clip(updated, 0.0, 1.0)
        history.append(float(np.max(np.abs(updated - values))))
        values = updated
    logger.debug("iterated CDF for %s: last sup-norm step %.3e", ifs.name, history[-1])

    values.setflags(write=False)
    return VarianceFunction(
        VarianceKind.ITERATED_CDF,
        ifs=ifs,
        grid_size=int(grid_size),
        iterations=int(iterations),
        grid_values=values,
        convergence=tuple(history),
        gamma_override=gamma,
    )


def golden_bernoulli_gamma() -> float:
    """Hölder exponent of T for the golden-ratio Bernoulli convolution, 1 / s_1 = log(1/rho) / log 2."""
    rho = (math.sqrt(5.0) - 1.0) / 2.0
    return math.log(1.0 / rho) / math.log(2.0)


def _resolve_ifs(ref: Any) -> IFS:
    if isinstance(ref, IFS):
        return ref
    if isinstance(ref, str):
        return preset_ifs(ref)
    if isinstance(ref, Mapping):
        return IFS(ref["ratios"], ref["translations"], ref["weights"], name=ref.get("name", "custom"))
    raise ValidationError(f"Cannot interpret IFS reference {ref!r}")


def variance_from_record(record: Mapping[str, Any]) -> VarianceFunction:
    """Build a catalog entry from {kind, params, domain_end}."""
    kind = record.get("kind")
    params = dict(record.get("params", {}))
    domain_end = float(record.get("domain_end", 1.0))

    if kind == VarianceKind.IDENTITY.value:
        return identity(domain_end)
    if kind == VarianceKind.POWER_LAW.value:
        return power_law(params["beta"], domain_end)
    if kind == VarianceKind.PIECEWISE_LINEAR.value:
        return piecewise_linear(params["breakpoints"])
    if kind == VarianceKind.CANTOR_STAIRCASE.value:
        return cantor_staircase(domain_end)
    if kind == VarianceKind.SELF_SIMILAR_CDF.value:
        return self_similar_cdf(_resolve_ifs(params["ifs"]), int(params.get("depth", DEFAULT_CDF_DEPTH)))
    if kind == VarianceKind.ITERATED_CDF.value:
        ifs = _resolve_ifs(params["ifs"])
        gamma = params.get("gamma")
        if gamma is None and ifs.name == "golden-bernoulli":
            gamma = golden_bernoulli_gamma()
        return build_iterated_cdf(ifs, int(params.get("grid_size", 4097)), int(params.get("iterations", 200)), gamma)
    raise ValidationError(f"Unknown variance kind '{kind}'. Available: {', '.join(k.value for k in VarianceKind)}")


# ------------------ EVALUATION ------------------


def _cantor_digits_uint64(numer: np.ndarray, bits: np.ndarray) -> np.ndarray:
    # x = numer / 2**bits exactly; 3 * numer fits in 64 bits while bits <= 62
    mask = (np.uint64(1) << bits) - np.uint64(1)
    x = numer.copy()
    value = np.zeros(x.shape)
    active = np.ones(x.shape, dtype=bool)
    weight = 0.5
    for _ in range(CANTOR_DIGITS):
        y = x * np.uint64(3)
        digit = y >> bits
        x = y & mask
        value += weight * ((digit >= 1) & active)
        active &= (digit != 1) & (x != 0)
        if not active.any():
            break
        weight /= 2
    return value


def _cantor_digits_int(numer: int, bits: int) -> float:
    mask = (1 << bits) - 1
    value, weight = 0.0, 0.5
    for _ in range(CANTOR_DIGITS):
        numer *= 3
        digit = numer >> bits
        numer &= mask
        if digit:
            value += weight
        if digit == 1 or numer == 0:
            break
        weight /= 2
    return value


def _cantor_exact(x: np.ndarray) -> np.ndarray:
    """Cantor function from the exact ternary digits of each double."""
    out = np.zeros(x.shape)
    out[x >= 1.0] = 1.0
    inner = (x > 0.0) & (x < 1.0)
    if not inner.any():
        return out

    mantissa, exponent = np.frexp(x[inner])
    numer = (mantissa * 2.0**53).astype(np.int64)
    bits = 53 - exponent.astype(np.int64)
    trailing = np.frexp((numer & -numer).astype(float))[1] - 1
    numer >>= trailing
    bits -= trailing

    values = np.empty(numer.shape)
    fast = bits <= 62
    if fast.any():
        values[fast] = _cantor_digits_uint64(numer[fast].astype(np.uint64), bits[fast].astype(np.uint64))
    for k in np.flatnonzero(~fast):
        values[k] = _cantor_digits_int(int(numer[k]), int(bits[k]))
    out[inner] = values
    return out


def _self_similar_cdf(ifs: IFS, depth: int, x: np.ndarray) -> np.ndarray:
    r, d, p = ifs.arrays()
    left_mass = np.concatenate([[0.0], np.cumsum(p)[:-1]])
    through_mass = np.cumsum(p)

    value = np.zeros(x.shape)
    mass = np.ones(x.shape)
    x = x.copy()
    active = np.ones(x.shape, dtype=bool)
    for _ in range(depth):
        k = np.clip(np.searchsorted(d, x, side="right") - 1, 0, ifs.size - 1)
        inside = x <= d[k] + r[k]
        in_gap = active & ~inside
        value[in_gap] += mass[in_gap] * through_mass[k[in_gap]]
        active &= inside
        if not active.any():
            break
        value[active] += mass[active] * left_mass[k[active]]
        x[active] = (x[active] - d[k[active]]) / r[k[active]]
        mass[active] *= p[k[active]]
    # linear within the deepest cylinder keeps V continuous
    value[active] += mass[active] * np.clip(x[active], 0.0, 1.0)
    return value


def evaluate(v: VarianceFunction, t: ArrayLike) -> Union[float, np.ndarray]:
    """V(t) for a scalar or an array of times in [0, S]."""
    scalar = np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~np.isfinite(times)) or np.any(times < 0.0) or np.any(times > v.domain_end):
        raise DomainError(f"times must lie in [0, {v.domain_end}] for {v.name}")
    if not v.is_built:
        raise StateError(f"{v.name} queried before its grid was built")

    S = v.domain_end
    if v.kind is VarianceKind.IDENTITY:
        values = times.copy()
    elif v.kind is VarianceKind.POWER_LAW:
        values = times**v.beta
    elif v.kind is VarianceKind.PIECEWISE_LINEAR:
        knots = np.array(v.breakpoints)
        values = np.interp(times, knots[:, 0], knots[:, 1])
    elif v.kind is VarianceKind.CANTOR_STAIRCASE:
        values = _cantor_exact(times if S == 1.0 else times / S)
    elif v.kind is VarianceKind.SELF_SIMILAR_CDF:
        values = _self_similar_cdf(v.ifs, v.depth, times / S)
    else:
        values = np.interp(times / S, np.linspace(0.0, 1.0, v.grid_size), v.grid_values)

    return float(values[0]) if scalar else values


def generalized_inverse(v: VarianceFunction, s: ArrayLike, tol: float = 1e-12) -> Union[float, np.ndarray]:
    """T(s) = inf{t : V(t) > s}, within tol.

    Plateaus of V resolve to their right endpoint. Levels at the top V(S)
    return S.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    scalar = np.ndim(s) == 0
    levels = np.atleast_1d(np.asarray(s, dtype=float))
    top = v.total()
    if np.any(levels < 0.0) or np.any(~np.isfinite(levels)):
        raise DomainError("levels must be non-negative")
    if np.any(levels > top):
        raise RangeError(f"level above V(S) = {top!r}; T is infinite there")

    if v.kind is VarianceKind.IDENTITY:
        result = levels.copy()
    elif v.kind is VarianceKind.POWER_LAW:
        result = np.minimum(levels ** (1.0 / v.beta), v.domain_end)
    else:
        lo = np.zeros_like(levels)
        hi = np.full_like(levels, v.domain_end)
        steps = min(200, int(math.ceil(math.log2(v.domain_end / tol))) + 2)
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            exceeds = evaluate(v, mid) > levels
            hi = np.where(exceeds, mid, hi)
            lo = np.where(exceeds, lo, mid)
            if np.max(hi - lo) <= tol:
                break
        result = hi

    return float(result[0]) if scalar else result


# ------------------ HÖLDER INDICES ------------------


@dataclass(frozen=True)
class HolderIndexEstimate:
    """Grid-search estimate of the local uniform Hölder indices at one point.

    diagnostics holds log sup ratios, one row per alpha and one column per
    window radius.
    """

    point: float
    alpha_upper: Optional[float]
    alpha_lower: Optional[float]
    deltas_used: Tuple[float, ...]
    alpha_step: float
    diagnostics: Dict[str, pd.DataFrame] = field(default_factory=dict, compare=False, repr=False)
    method: str = "direct"

    def __post_init__(self):
        if self.alpha_upper is not None and self.alpha_lower is not None:
            if self.alpha_upper > self.alpha_lower + self.alpha_step + 1e-12:
                logger.warning(
                    "index ordering violated at t=%g: upper %.3f > lower %.3f", self.point, self.alpha_upper, self.alpha_lower
                )


def _check_scan_inputs(deltas: Sequence[float], alpha_grid: Sequence[float], pairs_per_window: int):
    deltas = np.asarray(deltas, dtype=float)
    alphas = np.asarray(alpha_grid, dtype=float)
    if deltas.size < 2 or np.any(np.diff(deltas) >= 0) or np.any(deltas <= 0):
        raise DomainError("deltas must be positive and strictly decreasing")
    if alphas.size < 2 or np.any(np.diff(alphas) <= 0):
        raise DomainError("alpha_grid must be strictly increasing")
    if pairs_per_window < 2:
        raise DomainError("pairs_per_window must be at least 2")
    return deltas, alphas


def _resolvable(deltas: np.ndarray, t: float) -> np.ndarray:
    """Window radii at least two float spacings wide at t."""
    keep = deltas >= 2.0 * np.spacing(abs(t))
    if keep.sum() < 2:
        raise DomainError(f"fewer than two window radii are resolvable in double precision at t={t!r}")
    if not keep.all():
        logger.debug("dropped %d window radii below the float spacing at t=%g", int((~keep).sum()), t)
    return deltas[keep]


def _window_pairs(func: Callable, domain_end: float, t: float, delta: float, count: int):
    """Increments |du|, |dV| over a stratified pair sample of I(t, delta)."""
    if delta > domain_end or not 0.0 <= t <= domain_end:
        raise DomainError(f"window I({t}, {delta}) escapes the domain [0, {domain_end}]")
    a, b = max(0.0, t - delta), min(domain_end, t + delta)
    if b <= a:
        raise DomainError(f"window I({t}, {delta}) is empty")

    uniform = np.linspace(a, b, count)
    offsets = delta * 2.0 ** -np.arange(1, GEOMETRIC_DEPTH + 1)
    geometric = np.concatenate([t - offsets, t + offsets])
    geometric = geometric[(geometric >= a) & (geometric <= b)]
    points = np.unique(np.concatenate([uniform, geometric, [t]]))
    values = func(points)
    i, j = np.triu_indices(points.size, k=1)
    du = points[j] - points[i]
    dv = np.abs(values[j] - values[i])

    # near-coincident partners expose blow-up of the ratio at fixed delta
    base = np.repeat(uniform[:-1], CLOSE_PAIR_EXPONENTS.size)
    partner = base + np.tile(delta * 2.0 ** -CLOSE_PAIR_EXPONENTS.astype(float), uniform.size - 1)
    inside = partner <= b
    base, partner = base[inside], partner[inside]
    du = np.concatenate([du, partner - base])
    dv = np.concatenate([dv, np.abs(func(partner) - func(base))])

    keep = du > 0
    if not keep.any():
        raise DomainError(f"window I({t}, {delta}) holds no distinct pair of points")
    return du[keep], dv[keep]


def _log_sup_tables(func, domain_end, t, deltas, alphas, count, lower: bool) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Log suprema per (alpha, delta), and how much the pairs closer than delta 2^-REFINE_EXPONENT raise them."""
    full, refined = {}, {}
    for delta in deltas:
        du, dv = _window_pairs(func, domain_end, t, delta, count)
        if lower:
            nonzero = dv > 0
            if not nonzero.all():
                logger.debug("skipped %d pairs with dV = 0 at delta=%g", int((~nonzero).sum()), delta)
            du, dv = du[nonzero], dv[nonzero]
        coarse = du >= delta * 2.0**-REFINE_EXPONENT
        with np.errstate(divide="ignore"):
            log_du, log_dv = np.log(du), np.log(dv)
        best = np.empty(alphas.size)
        best_coarse = np.full(alphas.size, -np.inf)
        for start in range(0, alphas.size, 100):
            block = alphas[start : start + 100, None]
            ratios = block * log_du[None, :] - log_dv[None, :] if lower else log_dv[None, :] - block * log_du[None, :]
            best[start : start + 100] = ratios.max(axis=1)
            if coarse.any():
                best_coarse[start : start + 100] = ratios[:, coarse].max(axis=1)
        full[float(delta)] = best
        with np.errstate(invalid="ignore"):
            refined[float(delta)] = np.where(np.isfinite(best_coarse), best - best_coarse, 0.0)
    index = pd.Index(alphas, name="alpha")
    return pd.DataFrame(full, index=index), pd.DataFrame(refined, index=index)


def _accepted(table: pd.DataFrame, refined: Optional[pd.DataFrame] = None) -> np.ndarray:
    """Decision rule: the last supremum is below half the first and below 1.

    With refined given, the supremum must also stay put (within a factor 2)
    when near-coincident pairs join, in every window; a supremum that keeps
    growing as pairs close in is infinite.
    """
    first = table.iloc[:, 0].to_numpy()
    last = table.iloc[:, -1].to_numpy()
    accepted = (last < first + math.log(0.5)) & (last < 0.0)
    if refined is not None:
        accepted &= refined.max(axis=1).to_numpy() <= math.log(2.0)
    return accepted


def _upper_index(func, domain_end, t, deltas, alphas, count, finite_sup=False):
    table, refined = _log_sup_tables(func, domain_end, t, deltas, alphas, count, lower=False)
    accepted = _accepted(table, refined if finite_sup else None)
    if not accepted.any():
        logger.warning("no alpha accepted for the upper index at t=%g", t)
        return 0.0, table, refined
    return float(alphas[np.flatnonzero(accepted)[-1]]), table, refined


def estimate_upper_index(
    v: VarianceFunction,
    t: float,
    deltas: Sequence[float] = UPPER_DELTAS,
    alpha_grid: Sequence[float] = UPPER_ALPHA_GRID,
    pairs_per_window: int = 64,
) -> HolderIndexEstimate:
    """Largest alpha whose window suprema of |dV| / |du|^alpha shrink toward 0."""
    deltas, alphas = _check_scan_inputs(deltas, alpha_grid, pairs_per_window)
    deltas = _resolvable(deltas, t)
    alpha, table, _ = _upper_index(lambda u: evaluate(v, u), v.domain_end, t, deltas, alphas, pairs_per_window)
    return HolderIndexEstimate(
        point=t,
        alpha_upper=alpha,
        alpha_lower=None,
        deltas_used=tuple(deltas.tolist()),
        alpha_step=float(np.min(np.diff(alphas))),
        diagnostics={"upper": table},
    )


def estimate_lower_index(
    v: VarianceFunction,
    t: float,
    deltas: Optional[Sequence[float]] = None,
    alpha_grid: Sequence[float] = LOWER_ALPHA_GRID,
    pairs_per_window: int = 64,
    method: str = "direct",
) -> HolderIndexEstimate:
    """Smallest alpha whose window suprema of |du|^alpha / |dV| shrink toward 0.

    method="inverse" instead returns 1 / beta*, beta* the upper index of
    T = V^(-1) at V(t), scanned over the reciprocal alpha grid with deltas
    taken relative to V(S). deltas default to LOWER_DELTAS and
    INVERSE_DELTAS. Both routes reject an alpha whose supremum is infinite
    at some window, as for alpha < 1 on any differentiable V. The inverse
    route is exact only where T has a closed form (identity, power law);
    elsewhere bisection noise limits the finest windows.
    """
    if not v.strictly_increasing:
        raise PreconditionError(f"the lower index needs a strictly increasing V; {v.name} has plateaus")
    if deltas is None:
        deltas = INVERSE_DELTAS if method == "inverse" else LOWER_DELTAS
    deltas, alphas = _check_scan_inputs(deltas, alpha_grid, pairs_per_window)
    step = float(np.min(np.diff(alphas)))

    if method == "direct":
        deltas = _resolvable(deltas, t)
        table, refined = _log_sup_tables(
            lambda u: evaluate(v, u), v.domain_end, t, deltas, alphas, pairs_per_window, lower=True
        )
        accepted = _accepted(table, refined)
        alpha = float(alphas[np.flatnonzero(accepted)[0]]) if accepted.any() else math.inf
        diagnostics = {"lower": table, "lower_refined": refined}
    elif method == "inverse":
        positive = alphas[alphas > 0]
        betas = np.sort(1.0 / positive)
        top = v.total()
        s = float(evaluate(v, t))
        deltas = _resolvable(deltas * top, s)
        beta, table, refined = _upper_index(
            lambda level: generalized_inverse(v, np.minimum(level, top), tol=1e-15),
            top,
            s,
            deltas,
            betas,
            pairs_per_window,
            finite_sup=True,
        )
        alpha = 1.0 / beta if beta > 0 else math.inf
        diagnostics = {"inverse_upper": table, "inverse_refined": refined}
    else:
        raise DomainError(f"unknown method '{method}'")

    return HolderIndexEstimate(
        point=t,
        alpha_upper=None,
        alpha_lower=alpha,
        deltas_used=tuple(deltas.tolist()),
        alpha_step=step,
        diagnostics=diagnostics,
        method=method,
    )


def estimate_indices(v: VarianceFunction, t: float, pairs_per_window: int = 64) -> HolderIndexEstimate:
    """Both indices at t with the default grids; lower is omitted on plateau-bearing V."""
    upper = estimate_upper_index(v, t, pairs_per_window=pairs_per_window)
    lower = estimate_lower_index(v, t, pairs_per_window=pairs_per_window) if v.strictly_increasing else None
    return HolderIndexEstimate(
        point=t,
        alpha_upper=upper.alpha_upper,
        alpha_lower=lower.alpha_lower if lower else None,
        deltas_used=upper.deltas_used + (lower.deltas_used if lower else ()),
        alpha_step=max(upper.alpha_step, lower.alpha_step if lower else 0.0),
        diagnostics={**upper.diagnostics, **(lower.diagnostics if lower else {})},
    )


def estimate_interval_indices(v: VarianceFunction, points: Sequence[float], pairs_per_window: int = 64) -> Tuple[float, float]:
    """(alpha*(J), alpha_*(J)) as infima of pointwise estimates over sample points of J."""
    estimates = [estimate_indices(v, float(t), pairs_per_window) for t in points]
    uppers = [e.alpha_upper for e in estimates]
    lowers = [e.alpha_lower for e in estimates if e.alpha_lower is not None]
    return min(uppers), (min(lowers) if lowers else math.inf)


def graph_dimension_bounds(alpha_upper: float, alpha_lower: float) -> Tuple[float, float]:
    """Almost-sure bracket max(2 - alpha_*/2, 1) <= dim_H G(X, J) <= 2 - alpha^*/2."""
    return max(2.0 - alpha_lower / 2.0, 1.0), 2.0 - alpha_upper / 2.0


def fourier_dimension_floor(gamma: float) -> float:
    """Lower bound 2 gamma / (2 + gamma) on dim_F of the graph, gamma a Hölder exponent of T."""
    if not 0.0 < gamma <= 1.0:
        raise DomainError("gamma must lie in (0, 1]")
    return 2.0 * gamma / (2.0 + gamma)
