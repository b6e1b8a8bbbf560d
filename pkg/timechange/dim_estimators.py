"""Dimension and spectrum estimators for sampled graphs G(X) = {(t, X_t)}.

Box counting over dyadic columns, the oscillation L^q spectrum, discretized
s-energies and Fourier decay of the push-forward of a base measure onto the
graph.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from numpy.polynomial.legendre import leggauss
from scipy import special, stats

from timechange.errors import (
    DegeneratePathError,
    DomainError,
    FitError,
    PreconditionError,
    ResolutionError,
    ValidationError,
)
from timechange.process_sim import SamplePath, TimeGrid
from timechange.self_similar import Quadrature

logger = logging.getLogger(__name__)

MIN_SAMPLES_PER_BOX = 4
COUNT_ROUNDING_GUARD = 1e-9
NOISE_FLOOR = 1e-12
FT_CHUNK = 64
ENERGY_CHUNK = 1024
SELF_CELL_WINDOW = 16
SELF_CELL_NODES = 128
SELF_CELL_TABLE = 48
SELF_CELL_ASYMPTOTIC_X = 50.0


# ------------------ BOX COUNTING ------------------


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    slope: float
    intercept: float
    scales_used: Tuple[int, ...]
    r_squared: float
    per_scale_counts: Tuple[int, ...]


def _box_edges(path: SamplePath, level: int) -> np.ndarray:
    """Grid indices bounding the 2^level dyadic columns; neighbouring boxes share their edge sample."""
    if level < 0:
        raise DomainError("level must be non-negative")
    if not path.grid.uniform:
        raise PreconditionError("dyadic box estimators need a uniform grid")
    intervals = path.grid.resolution - 1
    boxes = 2**level
    edges = np.rint(np.arange(boxes + 1) * (intervals / boxes)).astype(np.int64)
    if np.min(np.diff(edges)) + 1 < MIN_SAMPLES_PER_BOX:
        raise ResolutionError(
            f"level {level} leaves fewer than {MIN_SAMPLES_PER_BOX} samples per box on a {path.grid.resolution}-point grid"
        )
    return edges


def oscillation(path: SamplePath, level: int) -> np.ndarray:
    """max - min of the path over each of the 2^level dyadic columns."""
    edges = _box_edges(path, level)
    x = np.asarray(path.values, dtype=float)
    head = x[:-1]
    upper = np.maximum(np.maximum.reduceat(head, edges[:-1]), x[edges[1:]])
    lower = np.minimum(np.minimum.reduceat(head, edges[:-1]), x[edges[1:]])
    return upper - lower


def box_count_graph(path: SamplePath, level: int) -> int:
    """Column box count sum_k (floor(Osc_k / side) + 1) at side = S 2^-level."""
    side = path.grid.domain_end / 2**level
    osc = oscillation(path, level)
    return int(np.sum(np.floor(osc / side + COUNT_ROUNDING_GUARD) + 1))


def default_levels(resolution: int) -> Tuple[int, int]:
    return 4, int(math.floor(math.log2(resolution - 1))) - 5


def box_dim_fit(path: SamplePath, n_min: Optional[int] = None, n_max: Optional[int] = None) -> DimensionEstimate:
    """Least-squares slope of log2 count(n) against n over [n_min, n_max]."""
    default_min, default_max = default_levels(path.grid.resolution)
    n_min = default_min if n_min is None else n_min
    n_max = default_max if n_max is None else n_max
    levels = list(range(n_min, n_max + 1))

    counts = [box_count_graph(path, n) for n in levels]
    if len(levels) < 3:
        raise FitError(f"box dimension fit needs at least 3 levels, got {len(levels)}")

    fit = stats.linregress(levels, np.log2(counts))
    return DimensionEstimate(
        value=float(np.clip(fit.slope, 1.0, 2.0)),
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        scales_used=tuple(levels),
        r_squared=float(fit.rvalue**2),
        per_scale_counts=tuple(counts),
    )


def empirical_lq(path: SamplePath, q: float, levels: Sequence[int]) -> pd.Series:
    """Estimates log(sum Osc^q) / (-n log 2) of tau_X(q), one per level, over nonzero oscillations."""
    if not q > 0:
        raise DomainError("q must be positive")
    estimates = {}
    for n in levels:
        osc = oscillation(path, n)
        osc = osc[osc > 0]
        if osc.size == 0:
            raise DegeneratePathError(f"all oscillations vanish at level {n}")
        estimates[int(n)] = float(np.log(np.sum(osc**q)) / (-n * math.log(2.0)))
    return pd.Series(estimates, name=f"tau({q:g})").rename_axis("level")


# ------------------ BASE MEASURES ------------------


class BaseKind(Enum):
    LEBESGUE_ON_GRID = "lebesgue"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class BaseMeasure:
    kind: BaseKind
    quadrature: Optional[Quadrature] = None

    def weights_on(self, grid: TimeGrid) -> np.ndarray:
        """Weights aligned to the grid points; quadrature nodes must be grid points."""
        if self.kind is BaseKind.LEBESGUE_ON_GRID:
            steps = np.diff(grid.points)
            weights = np.zeros(grid.resolution)
            weights[:-1] += steps / 2
            weights[1:] += steps / 2
            return weights

        nodes = np.asarray(self.quadrature.points, dtype=float)
        slots = np.clip(np.searchsorted(grid.points, nodes), 0, grid.resolution - 1)
        below = np.clip(slots - 1, 0, grid.resolution - 1)
        closer = np.where(np.abs(grid.points[below] - nodes) < np.abs(grid.points[slots] - nodes), below, slots)
        if np.any(np.abs(grid.points[closer] - nodes) > 1e-12):
            raise ValidationError("quadrature nodes are not points of the path grid")
        weights = np.zeros(grid.resolution)
        np.add.at(weights, closer, self.quadrature.weights)
        return weights


LEBESGUE = BaseMeasure(BaseKind.LEBESGUE_ON_GRID)


def quadrature_base(quadrature: Quadrature) -> BaseMeasure:
    weights = np.asarray(quadrature.weights)
    if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValidationError("quadrature weights must be positive and sum to 1")
    return BaseMeasure(BaseKind.QUADRATURE, quadrature)


# ------------------ ENERGY ------------------


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    s: float
    coincident_pairs: int
    self_cell: float = 0.0


def roughness_exponent(values: np.ndarray) -> Optional[float]:
    """0.5 log2 of the lag-2 over lag-1 mean squared increment, in [0, 1]; None when undefined."""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return None
    lag1 = float(np.mean(np.diff(values) ** 2))
    if lag1 <= 0:
        return None
    lag2 = float(np.mean((values[2:] - values[:-2]) ** 2))
    return float(np.clip(0.5 * math.log2(lag2 / lag1), 0.0, 1.0))


def self_cell_factor(kappa: np.ndarray, s: float, eta: float, nodes: int = SELF_CELL_NODES) -> np.ndarray:
    """2 int_0^1 (1 - r) E[(r^2 + kappa^2 r^(2 eta) Z^2)^(-s/2)] dr, Z standard normal.

    Finite only for c = s + eta - 1 < 1. With r = y^m, m = 1 / (1 - c), the
    r^-c singularity cancels against dr and Gauss-Legendre sees a smooth
    integrand.
    """
    c = s + eta - 1.0
    if c >= 1.0:
        raise DomainError(f"the self-cell energy diverges for s + eta >= 2 (s={s:g}, eta={eta:g})")
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    if np.any(kappa <= 0):
        raise DomainError("kappa must be positive")

    m = 1.0 / (1.0 - c)
    z, zw = leggauss(nodes)
    y, yw = (z + 1.0) / 2.0, zw / 2.0
    r = y**m
    x = np.maximum(r[None, :] ** (2.0 - 2.0 * eta) / (2.0 * kappa[:, None] ** 2), np.finfo(float).tiny)
    far = x > SELF_CELL_ASYMPTOTIC_X
    # h = r^c E[...]; exact through U(1/2, 3/2 - s/2, x), asymptotic for large x
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = special.hyperu(0.5, 1.5 - s / 2.0, np.where(far, 1.0, x)) / (math.sqrt(2.0) * kappa[:, None])
        tail = r[None, :] ** (eta - 1.0) * (1.0 - s / (4.0 * x))
    h = np.where(far, tail, exact)
    return 2.0 * m * ((1.0 - r[None, :]) * h) @ yw


def _self_cell_energy(t: np.ndarray, x: np.ndarray, w: np.ndarray, s: float) -> float:
    """Energy of pairs sharing a Lebesgue cell, modelling local increments as Gaussian with power-law scaling."""
    eta = roughness_exponent(x)
    if eta is None or s + eta - 1.0 >= 1.0:
        logger.debug("self-cell energy skipped at s=%g (roughness %s)", s, eta)
        return 0.0

    # local mean squared one-step increment and step, over a window symmetric in time
    increments = np.diff(x) ** 2
    steps = np.diff(t)
    count = increments.size
    node = np.arange(t.size)
    lo = np.clip(node - SELF_CELL_WINDOW, 0, count)
    hi = np.clip(node + SELF_CELL_WINDOW, 0, count)
    inc_sum = np.concatenate([[0.0], np.cumsum(increments)])
    step_sum = np.concatenate([[0.0], np.cumsum(steps)])
    span = hi - lo
    delta = np.sqrt((inc_sum[hi] - inc_sum[lo]) / span)
    step = (step_sum[hi] - step_sum[lo]) / span

    rough = (delta > 0) & (w > 0)
    if not rough.any():
        return 0.0
    kappa = delta[rough] / step[rough]
    lo_k, hi_k = float(kappa.min()), float(kappa.max())
    if hi_k > lo_k * (1.0 + 1e-9):
        table = np.geomspace(lo_k, hi_k, SELF_CELL_TABLE)
        factor = np.exp(np.interp(np.log(kappa), np.log(table), np.log(self_cell_factor(table, s, eta))))
    else:
        factor = self_cell_factor(np.array([lo_k]), s, eta)[0]
    cells = w[rough]
    return float(np.sum(cells ** (2.0 - s) * factor))


def energy_estimate(path: SamplePath, base: BaseMeasure, s: float) -> EnergyEstimate:
    """Discretized s-energy sum_(i != j) w_i w_j |P_i - P_j|^-s over graph points P_i.

    Coincident graph points are kept at a floor distance of one median grid
    spacing. Under the Lebesgue base the pairs inside each cell are added in
    closed form (self_cell) while s + eta < 2, eta the roughness exponent of
    the path.
    """
    if not 1.0 < s < 2.0:
        raise DomainError("s must lie in (1, 2)")
    weights = base.weights_on(path.grid)
    support = weights > 0
    t = path.grid.points[support]
    x = np.asarray(path.values)[support]
    w = weights[support]
    floor_sq = float(np.median(np.diff(path.grid.points))) ** 2

    total = 0.0
    coincident = 0
    for start in range(0, t.size, ENERGY_CHUNK):
        rows = slice(start, start + ENERGY_CHUNK)
        dist_sq = (t[rows, None] - t[None, :]) ** 2 + (x[rows, None] - x[None, :]) ** 2
        own = np.arange(start, min(start + ENERGY_CHUNK, t.size))
        dist_sq[own - start, own] = np.inf
        zero = dist_sq == 0.0
        if zero.any():
            coincident += int(zero.sum())
            dist_sq[zero] = floor_sq
        total += float(w[rows] @ (dist_sq ** (-s / 2)) @ w)

    if coincident:
        logger.warning("%d coincident graph point pairs floored to one grid spacing", coincident)
    self_cell = _self_cell_energy(t, x, w, s) if base.kind is BaseKind.LEBESGUE_ON_GRID else 0.0
    return EnergyEstimate(value=total + self_cell, s=float(s), coincident_pairs=coincident, self_cell=self_cell)


def energy_integral(path: SamplePath, base: BaseMeasure, s: float) -> float:
    return energy_estimate(path, base, s).value


def energy_profile(path: SamplePath, base: BaseMeasure, s_values: Sequence[float]) -> pd.Series:
    return pd.Series({float(s): energy_integral(path, base, s) for s in s_values}, name="energy").rename_axis("s")


# ------------------ FOURIER ------------------


class Cone(Enum):
    HORIZONTAL = "Horizontal"
    VERTICAL = "Vertical"


@dataclass(frozen=True)
class FourierScanSample:
    xi: Tuple[float, float]
    u: float
    cone: Cone
    rho: float
    ft_abs: float


def _transform(t: np.ndarray, x: np.ndarray, w: np.ndarray, xis: np.ndarray) -> np.ndarray:
    phase = 2.0 * np.pi * (xis[:, 0:1] * t[None, :] + xis[:, 1:2] * x[None, :])
    return np.cos(phase) @ w - 1j * (np.sin(phase) @ w)


def empirical_ft(path: SamplePath, base: BaseMeasure, xi: Tuple[float, float]) -> complex:
    """sum_i w_i exp(-2 pi i (xi_1 t_i + xi_2 X_i))"""
    weights = base.weights_on(path.grid)
    xis = np.array([xi], dtype=float)
    return complex(_transform(path.grid.points, np.asarray(path.values, dtype=float), weights, xis)[0])


def cone_classify(xi: Tuple[float, float], rho: float) -> Cone:
    """Horizontal iff the angle of xi lies within theta_u = min(u^-rho, pi/4) of 0 or pi (closed)."""
    if not 0.5 <= rho < 1.0:
        raise DomainError("rho must lie in [1/2, 1)")
    u = math.hypot(xi[0], xi[1])
    if not u > 1.0:
        raise DomainError("cone decomposition covers |xi| > 1 only")
    theta_u = min(u**-rho, math.pi / 4)
    theta = math.atan2(xi[1], xi[0]) % (2 * math.pi)
    horizontal = theta <= theta_u or abs(theta - math.pi) <= theta_u or theta >= 2 * math.pi - theta_u
    return Cone.HORIZONTAL if horizontal else Cone.VERTICAL


@dataclass(frozen=True)
class FourierDecayFit:
    alpha_hat: float
    clamped: bool
    per_cone_slopes: Dict[str, float]
    worst_direction_alpha: float
    direction_alphas: pd.Series = field(repr=False)
    envelope: pd.Series = field(repr=False)
    samples: List[FourierScanSample] = field(repr=False)


def _scan_magnitudes(path: SamplePath, base: BaseMeasure, xis: np.ndarray, n_jobs: Optional[int]) -> np.ndarray:
    weights = base.weights_on(path.grid)
    support = weights > 0
    t = path.grid.points[support]
    x = np.asarray(path.values, dtype=float)[support]
    w = weights[support]
    chunks = [xis[i : i + FT_CHUNK] for i in range(0, len(xis), FT_CHUNK)]
    if n_jobs == 1:
        parts = [_transform(t, x, w, chunk) for chunk in chunks]
    else:
        parts = Parallel(n_jobs=n_jobs)(delayed(_transform)(t, x, w, chunk) for chunk in chunks)
    return np.abs(np.concatenate(parts))


def fourier_decay_fit(
    path: SamplePath,
    base: BaseMeasure,
    u_levels: Sequence[float],
    angles_per_level: int = 64,
    rho: float = 0.5,
    n_jobs: Optional[int] = 1,
) -> FourierDecayFit:
    """Decay exponent of |mu_G^(xi)| over a (u, theta) lattice.

    alpha_hat comes from the max-over-angles envelope per magnitude level;
    worst_direction_alpha is the smallest exponent fitted along a single
    direction whose magnitudes stay above the noise floor.
    """
    u = np.asarray(u_levels, dtype=float)
    if u.size < 2 or np.any(u <= 1.0) or np.any(np.diff(u) <= 0):
        raise DomainError("u_levels must be increasing, above 1, and at least two")
    if angles_per_level < 64:
        raise DomainError("angles_per_level must be at least 64")
    if not 0.5 <= rho < 1.0:
        raise DomainError("rho must lie in [1/2, 1)")

    angles = 2.0 * np.pi * np.arange(angles_per_level) / angles_per_level
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    directions[0] = (1.0, 0.0)
    xis = (u[:, None, None] * directions[None, :, :]).reshape(-1, 2)
    magnitudes = _scan_magnitudes(path, base, xis, n_jobs).reshape(u.size, angles_per_level)

    envelope = magnitudes.max(axis=1)
    if np.any(envelope == 0):
        raise DegeneratePathError("a frequency level has all-zero transform magnitudes")
    log_u = np.log(u)
    alpha_hat = -2.0 * stats.linregress(log_u, np.log(envelope)).slope
    clamped = alpha_hat < 0
    if clamped:
        logger.warning("negative Fourier decay exponent %.3f clamped to 0", alpha_hat)
        alpha_hat = 0.0

    cones = np.array([[cone_classify(tuple(xi), rho) for xi in row] for row in xis.reshape(u.size, -1, 2)])
    per_cone = {}
    for cone in Cone:
        inside = cones == cone
        if inside.any(axis=1).all():
            level_max = np.where(inside, magnitudes, -np.inf).max(axis=1)
            if np.all(level_max > 0):
                per_cone[cone.value] = float(stats.linregress(log_u, np.log(level_max)).slope)

    mass = float(np.sum(base.weights_on(path.grid)))
    usable = np.all(magnitudes > NOISE_FLOOR * mass, axis=0)
    direction_alphas = pd.Series(
        {
            float(angles[k]): -2.0 * float(stats.linregress(log_u, np.log(magnitudes[:, k])).slope)
            for k in np.flatnonzero(usable)
        },
        name="alpha",
        dtype=float,
    ).rename_axis("theta")
    worst = float(direction_alphas.min()) if len(direction_alphas) else float(alpha_hat)

    samples = [
        FourierScanSample((float(xis[i, 0]), float(xis[i, 1])), float(u[i // angles_per_level]), cone, float(rho), float(m))
        for i, (cone, m) in enumerate(zip(cones.ravel(), magnitudes.ravel()))
    ]
    return FourierDecayFit(
        alpha_hat=float(alpha_hat),
        clamped=bool(clamped),
        per_cone_slopes=per_cone,
        worst_direction_alpha=worst,
        direction_alphas=direction_alphas,
        envelope=pd.Series(envelope, index=pd.Index(u, name="u"), name="max_abs"),
        samples=samples,
    )


def scan_frame(samples: Sequence[FourierScanSample]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "xi1": [s.xi[0] for s in samples],
            "xi2": [s.xi[1] for s in samples],
            "u": [s.u for s in samples],
            "cone": [s.cone.value for s in samples],
            "ft_abs": [s.ft_abs for s in samples],
        }
    )
