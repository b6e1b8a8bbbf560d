"""Sample paths of X_t = B^H_(V(t)) on a time grid.

Both samplers are exact in distribution at the grid points: Brownian motion
through independent Gaussian increments with variances V(t_(i+1)) - V(t_i),
fractional Brownian motion through a Cholesky factor of its covariance at the
levels V(t_i).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import linalg

from timechange.errors import DomainError, InternalError, NumericalError, ResourceError, ValidationError
from timechange.variance_catalog import VarianceFunction, evaluate

logger = logging.getLogger(__name__)

MAX_FBM_POINTS = 4096
NEGATIVE_VARIANCE_SLACK = 1e-12
JITTER_LADDER = (0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10)
RNG_ALGORITHMS = ("philox",)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times 0 = t_0 < ... < t_(N-1) = S."""

    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 1 or points.size < 2:
            raise ValidationError("a time grid needs at least two points")
        if points[0] != 0.0:
            raise ValidationError("a time grid must start at 0")
        if np.any(np.diff(points) <= 0):
            raise ValidationError("grid points must be strictly increasing")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def resolution(self) -> int:
        return int(self.points.size)

    @property
    def domain_end(self) -> float:
        return float(self.points[-1])

    @property
    def uniform(self) -> bool:
        steps = np.diff(self.points)
        return bool(np.max(np.abs(steps - steps.mean())) <= 1e-9 * steps.mean())


def uniform_grid(n_points: int, domain_end: float = 1.0) -> TimeGrid:
    if n_points < 2:
        raise ValidationError("n_points must be at least 2")
    return TimeGrid(np.linspace(0.0, domain_end, int(n_points)))


@dataclass(frozen=True)
class RngStream:
    """One reproducible Philox stream per (root_seed, stream_index)."""

    root_seed: int
    stream_index: int = 0
    algorithm: str = "philox"

    def __post_init__(self):
        if self.algorithm not in RNG_ALGORITHMS:
            raise ValidationError(f"Unknown RNG algorithm '{self.algorithm}'")
        if not 0 <= self.root_seed < 2**64:
            raise ValidationError("root_seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise ValidationError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        seed_seq = np.random.SeedSequence(self.root_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(seed_seq))


@dataclass(frozen=True)
class SamplePath:
    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    hurst: float
    v_name: str
    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if len(self.values) != self.grid.resolution:
            raise ValidationError("path values and grid differ in length")

    @property
    def times(self) -> np.ndarray:
        return self.grid.points


def path_frame(path: SamplePath) -> pd.DataFrame:
    return pd.DataFrame({"t": path.grid.points, "x": path.values})


def _variance_levels(v: VarianceFunction, grid: TimeGrid) -> np.ndarray:
    if grid.domain_end > v.domain_end:
        raise DomainError(f"grid ends at {grid.domain_end}, beyond the domain [0, {v.domain_end}] of {v.name}")
    return evaluate(v, grid.points)


def sample_additive_bm(v: VarianceFunction, grid: TimeGrid, rng: RngStream) -> SamplePath:
    """Partial sums of independent N(0, V(t_(i+1)) - V(t_i)) increments."""
    levels = _variance_levels(v, grid)
    increments = np.diff(levels)
    if np.any(increments < -NEGATIVE_VARIANCE_SLACK):
        raise InternalError(f"{v.name} produced a negative increment variance {increments.min()!r}")
    increments = np.maximum(increments, 0.0)

    z = rng.generator().standard_normal(increments.size)
    values = np.concatenate([[0.0], np.cumsum(np.sqrt(increments) * z)])
    return SamplePath(grid, values, 0.5, v.name, rng.root_seed, rng.stream_index)


def fbm_covariance(levels: np.ndarray, hurst: float) -> np.ndarray:
    """Cov(B^H_a, B^H_b) = (a^2H + b^2H - |a - b|^2H) / 2 for all pairs of levels."""
    if not 0.0 < hurst < 1.0:
        raise DomainError("hurst must lie in (0, 1)")
    a = np.asarray(levels, dtype=float)
    power = 2.0 * hurst
    return 0.5 * (a[:, None] ** power + a[None, :] ** power - np.abs(a[:, None] - a[None, :]) ** power)


def _cholesky_with_jitter(cov: np.ndarray) -> np.ndarray:
    for jitter in JITTER_LADDER:
        try:
            factor = linalg.cholesky(cov + jitter * np.eye(cov.shape[0]), lower=True)
        except linalg.LinAlgError:
            continue
        if jitter:
            logger.debug("Cholesky needed diagonal jitter %.0e", jitter)
        return factor
    raise NumericalError(f"Cholesky factorization failed with jitter up to {JITTER_LADDER[-1]:.0e}")


def sample_additive_fbm(v: VarianceFunction, hurst: float, grid: TimeGrid, rng: RngStream) -> SamplePath:
    """Exact joint law of B^H at the levels V(t_i), one Gaussian per distinct level."""
    if not 0.0 < hurst < 1.0:
        raise DomainError("hurst must lie in (0, 1)")
    if grid.resolution > MAX_FBM_POINTS:
        raise ResourceError(f"dense Cholesky sampling is limited to {MAX_FBM_POINTS} grid points")

    levels = _variance_levels(v, grid)
    positive = levels > 0.0
    distinct, inverse = np.unique(levels[positive], return_inverse=True)

    values = np.zeros(grid.resolution)
    if distinct.size:
        factor = _cholesky_with_jitter(fbm_covariance(distinct, hurst))
        z = rng.generator().standard_normal(distinct.size)
        values[positive] = (factor @ z)[inverse]
    return SamplePath(grid, values, float(hurst), v.name, rng.root_seed, rng.stream_index)


def sample_path(v: VarianceFunction, grid: TimeGrid, hurst: float, rng: RngStream) -> SamplePath:
    if hurst == 0.5:
        return sample_additive_bm(v, grid, rng)
    return sample_additive_fbm(v, hurst, grid, rng)


def sample_ensemble(
    v: VarianceFunction,
    grid: TimeGrid,
    hurst: float,
    root_seed: int,
    count: int,
    n_jobs: Optional[int] = 1,
    first_index: int = 0,
) -> List[SamplePath]:
    """count paths on streams first_index, first_index + 1, ...; returned in stream order."""
    if count < 1:
        raise ValidationError("ensemble size must be at least 1")
    streams = [RngStream(root_seed, first_index + i) for i in range(count)]
    logger.debug("sampling %d paths of %s (H=%g, N=%d)", count, v.name, hurst, grid.resolution)
    if n_jobs == 1 or count == 1:
        return [sample_path(v, grid, hurst, stream) for stream in streams]
    return Parallel(n_jobs=n_jobs)(delayed(sample_path)(v, grid, hurst, stream) for stream in streams)


def subsample(path: SamplePath, step: int) -> SamplePath:
    """Every step-th grid point of path, endpoints kept."""
    if step < 1 or (path.grid.resolution - 1) % step:
        raise ValidationError("step must divide the number of grid intervals")
    return SamplePath(
        TimeGrid(path.grid.points[::step]),
        path.values[::step],
        path.hurst,
        path.v_name,
        path.seed,
        path.stream_index,
    )

