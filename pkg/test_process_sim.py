import numpy as np
import pytest
from scipy import stats

from timechange import process_sim
from timechange.errors import DomainError, InternalError, ResourceError, ValidationError
from timechange.process_sim import (
    RngStream,
    TimeGrid,
    fbm_covariance,
    path_frame,
    sample_additive_bm,
    sample_additive_fbm,
    sample_ensemble,
    sample_path,
    subsample,
    uniform_grid,
)
from timechange.self_similar import preset_ifs
from timechange.variance_catalog import (
    build_iterated_cdf,
    cantor_staircase,
    evaluate,
    identity,
    piecewise_linear,
    power_law,
    self_similar_cdf,
)


@pytest.fixture(scope="module")
def bm_endpoints():
    """10^5 Brownian paths sampled at t = 0, 1/2, 1"""
    paths = sample_ensemble(identity(), uniform_grid(3), 0.5, root_seed=2024, count=100_000)
    return np.stack([p.values for p in paths])


# ------------------ GRID AND STREAMS ------------------


def test_time_grid_validation():
    with pytest.raises(ValidationError):
        TimeGrid(np.array([0.1, 0.5, 1.0]))
    with pytest.raises(ValidationError):
        TimeGrid(np.array([0.0, 0.5, 0.5, 1.0]))
    with pytest.raises(ValidationError):
        TimeGrid(np.array([0.0]))
    grid = uniform_grid(5, 2.0)
    assert grid.resolution == 5 and grid.domain_end == 2.0 and grid.uniform
    with pytest.raises(ValueError):
        grid.points[1] = 0.3


def test_streams_are_reproducible_and_distinct():
    a = RngStream(7, 0).generator().standard_normal(4)
    b = RngStream(7, 0).generator().standard_normal(4)
    c = RngStream(7, 1).generator().standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ValidationError):
        RngStream(-1)


# ------------------ BROWNIAN SAMPLER ------------------


def test_same_seed_same_path():
    grid = uniform_grid(1025)
    first = sample_additive_bm(cantor_staircase(), grid, RngStream(11, 3))
    second = sample_additive_bm(cantor_staircase(), grid, RngStream(11, 3))
    assert np.array_equal(first.values, second.values)
    assert first.values[0] == 0.0


def test_plateau_freezes_the_path():
    grid = uniform_grid(11)
    path = sample_additive_bm(cantor_staircase(), grid, RngStream(5))
    # t = 0.4 and t = 0.5 both sit on the middle-third plateau
    assert path.values[4] == path.values[5]


def test_time_change_matches_brownian_motion_at_the_levels():
    v = power_law(2.0)
    grid = uniform_grid(65)
    changed = sample_additive_bm(v, grid, RngStream(3))
    direct = sample_additive_bm(identity(), TimeGrid(evaluate(v, grid.points)), RngStream(3))
    assert np.array_equal(changed.values, direct.values)


def test_endpoint_moments(bm_endpoints):
    x = bm_endpoints[:, 2]
    assert abs(x.mean()) <= 0.02
    assert abs(x.var() - 1.0) <= 0.02
    assert abs(stats.skew(x)) <= 0.03
    assert abs(stats.kurtosis(x)) <= 0.06


def test_increments_are_uncorrelated(bm_endpoints):
    first = bm_endpoints[:, 1]
    second = bm_endpoints[:, 2] - bm_endpoints[:, 1]
    assert abs(np.corrcoef(first, second)[0, 1]) <= 0.01


def test_negative_increment_variance_is_an_internal_error(monkeypatch):
    monkeypatch.setattr(process_sim, "evaluate", lambda v, t: np.array([0.0, 0.5, 0.4]))
    with pytest.raises(InternalError):
        sample_additive_bm(identity(), uniform_grid(3), RngStream(0))


def test_rounding_noise_is_clamped(monkeypatch):
    monkeypatch.setattr(process_sim, "evaluate", lambda v, t: np.array([0.0, 0.5, 0.5 - 1e-13]))
    path = sample_additive_bm(identity(), uniform_grid(3), RngStream(0))
    assert path.values[2] == path.values[1]


def test_grid_beyond_domain():
    with pytest.raises(DomainError):
        sample_additive_bm(identity(), uniform_grid(5, 2.0), RngStream(0))


# ------------------ FRACTIONAL SAMPLER ------------------


def test_fbm_covariance_matches_brownian_for_half():
    levels = np.array([0.25, 0.5, 1.0])
    assert np.allclose(fbm_covariance(levels, 0.5), np.minimum.outer(levels, levels))


@pytest.mark.parametrize(
    "v",
    [identity(), power_law(6.0), cantor_staircase(), piecewise_linear([(0, 0), (0.5, 0.2), (0.7, 0.2), (1, 1)])],
    ids=["identity", "power6", "cantor", "piecewise"],
)
@pytest.mark.parametrize("hurst", [0.2, 0.5, 0.8])
def test_covariance_at_levels_is_psd(v, hurst, rng):
    times = np.sort(rng.uniform(0, 1, 64))
    cov = fbm_covariance(evaluate(v, times), hurst)
    assert np.linalg.eigvalsh(cov).min() >= -1e-9


def test_fbm_half_matches_brownian_covariance():
    grid = uniform_grid(5)
    paths = sample_ensemble(identity(), grid, 0.5 + 1e-12, root_seed=9, count=5000)
    values = np.stack([p.values[1:] for p in paths])
    products = values[:, :, None] * values[:, None, :]
    stderr = products.std(axis=0, ddof=1) / np.sqrt(len(paths))
    exact = np.minimum.outer(grid.points[1:], grid.points[1:])
    assert np.all(np.abs(products.mean(axis=0) - exact) <= 4 * stderr)


def test_fbm_terminal_variance():
    paths = sample_ensemble(identity(), uniform_grid(9), 0.7, root_seed=4, count=10_000)
    ends = np.array([p.values[-1] for p in paths])
    assert abs(ends.var() - 1.0) <= 0.05


def test_fbm_plateau_shares_one_value():
    path = sample_additive_fbm(cantor_staircase(), 0.7, uniform_grid(11), RngStream(8))
    assert path.values[4] == path.values[5]
    assert path.values[0] == 0.0


def test_fbm_on_overlapping_cdf():
    v = build_iterated_cdf(preset_ifs("golden-bernoulli"), 513, 60)
    path = sample_additive_fbm(v, 0.3, uniform_grid(257), RngStream(1))
    assert np.all(np.isfinite(path.values))


def test_fbm_limits():
    with pytest.raises(ResourceError):
        sample_additive_fbm(identity(), 0.7, uniform_grid(4097), RngStream(0))
    with pytest.raises(DomainError):
        sample_additive_fbm(identity(), 1.0, uniform_grid(5), RngStream(0))


def test_sample_path_dispatch():
    grid = uniform_grid(9)
    assert sample_path(identity(), grid, 0.5, RngStream(2)).hurst == 0.5
    assert sample_path(self_similar_cdf(preset_ifs("cantor3")), grid, 0.7, RngStream(2)).hurst == 0.7


# ------------------ ENSEMBLES ------------------


def test_parallel_ensemble_matches_serial():
    grid = uniform_grid(257)
    serial = sample_ensemble(cantor_staircase(), grid, 0.5, root_seed=1, count=6)
    parallel = sample_ensemble(cantor_staircase(), grid, 0.5, root_seed=1, count=6, n_jobs=2)
    assert [p.stream_index for p in parallel] == list(range(6))
    for a, b in zip(serial, parallel):
        assert np.array_equal(a.values, b.values)


def test_ensemble_offset_reuses_streams():
    grid = uniform_grid(33)
    full = sample_ensemble(identity(), grid, 0.5, root_seed=1, count=4)
    tail = sample_ensemble(identity(), grid, 0.5, root_seed=1, count=2, first_index=2)
    assert np.array_equal(full[3].values, tail[1].values)
    with pytest.raises(ValidationError):
        sample_ensemble(identity(), grid, 0.5, root_seed=1, count=0)


def test_subsample_and_frame():
    path = sample_additive_bm(identity(), uniform_grid(17), RngStream(0))
    coarse = subsample(path, 4)
    assert coarse.grid.resolution == 5
    assert np.array_equal(coarse.values, path.values[::4])
    with pytest.raises(ValidationError):
        subsample(path, 3)
    frame = path_frame(path)
    assert list(frame.columns) == ["t", "x"] and len(frame) == 17
