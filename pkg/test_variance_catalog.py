import math

import numpy as np
import pytest

from timechange.errors import DomainError, PreconditionError, RangeError, StateError, ValidationError
from timechange.self_similar import preset_ifs
from timechange.variance_catalog import (
    VarianceKind,
    build_iterated_cdf,
    cantor_staircase,
    estimate_indices,
    estimate_interval_indices,
    estimate_lower_index,
    estimate_upper_index,
    evaluate,
    fourier_dimension_floor,
    generalized_inverse,
    golden_bernoulli_gamma,
    graph_dimension_bounds,
    identity,
    iterated_cdf,
    piecewise_linear,
    power_law,
    self_similar_cdf,
    variance_from_record,
)

CANTOR_DIM = math.log(2) / math.log(3)


def catalog():
    return {
        "identity": identity(),
        "power-law-2": power_law(2.0),
        "power-law-6": power_law(6.0),
        "piecewise": piecewise_linear([(0, 0), (0.3, 0.1), (0.6, 0.1), (1.0, 1.0)]),
        "cantor": cantor_staircase(),
        "uneven-cdf": self_similar_cdf(preset_ifs("uneven-2-4")),
        "golden-cdf": build_iterated_cdf(preset_ifs("golden-bernoulli"), 1025, 100),
    }


# ------------------ EVALUATION ------------------


def test_cantor_examples():
    c = cantor_staircase()
    assert evaluate(c, 0.0) == 0.0
    assert evaluate(c, 1.0) == 1.0
    assert evaluate(c, 0.5) == 0.5
    assert evaluate(c, 1 / 3) == pytest.approx(0.5, abs=1e-9)
    assert evaluate(c, 0.25) == pytest.approx(1 / 3, abs=1e-15)
    assert evaluate(c, 0.75) == pytest.approx(2 / 3, abs=1e-15)


def test_cantor_plateau_is_exact():
    c = cantor_staircase()
    values = evaluate(c, np.linspace(0.34, 0.66, 101))
    assert np.all(values == 0.5)


def test_power_law_example():
    assert evaluate(power_law(6.0), 0.5) == 1 / 64


def test_scalar_in_scalar_out():
    assert isinstance(evaluate(identity(), 0.3), float)
    assert evaluate(identity(), [0.1, 0.2]).shape == (2,)


@pytest.mark.parametrize("name", list(catalog()))
def test_catalog_starts_at_zero_and_is_monotone(name, rng):
    v = catalog()[name]
    assert evaluate(v, 0.0) == 0.0
    t = rng.uniform(0, v.domain_end, size=(1000, 2))
    t.sort(axis=1)
    assert np.all(evaluate(v, t[:, 0]) <= evaluate(v, t[:, 1]))


def test_cantor_self_similarity(rng):
    c = cantor_staircase()
    t = rng.uniform(0, 1, 1000)
    # the rounding of t / 3 and 1 - t is amplified by the log2/log3 Hölder modulus
    assert np.allclose(evaluate(c, t / 3), evaluate(c, t) / 2, rtol=0, atol=1e-9)
    assert np.allclose(evaluate(c, 1 - t), 1 - evaluate(c, t), rtol=0, atol=1e-9)


def test_cantor_digits_beyond_uint64_path():
    c = cantor_staircase()
    tiny = 3.0**-30
    assert evaluate(c, tiny) == pytest.approx(2.0**-30, rel=1e-9)


def test_self_similar_cdf_matches_cantor(rng):
    t = rng.uniform(0, 1, 500)
    via_tree = evaluate(self_similar_cdf(preset_ifs("cantor3")), t)
    assert np.allclose(via_tree, evaluate(cantor_staircase(), t), atol=1e-9)


def test_self_similar_cdf_gap_is_flat():
    v = self_similar_cdf(preset_ifs("uneven-2-4"))
    assert evaluate(v, 0.55) == pytest.approx(0.5)
    assert evaluate(v, 0.7) == pytest.approx(0.5)
    assert not v.strictly_increasing


def test_domain_errors():
    with pytest.raises(DomainError):
        evaluate(identity(), 1.5)
    with pytest.raises(DomainError):
        evaluate(cantor_staircase(), -0.1)


def test_unbuilt_iterated_cdf_is_a_state_error():
    with pytest.raises(StateError):
        evaluate(iterated_cdf(preset_ifs("golden-bernoulli"), 1025, 10), 0.5)


def test_piecewise_linear_validation():
    with pytest.raises(ValidationError):
        piecewise_linear([(0, 0), (0.5, 0.6), (1.0, 0.4)])
    with pytest.raises(ValidationError):
        piecewise_linear([(0, 0.1), (1.0, 1.0)])


def test_strictly_increasing_flags():
    flags = {name: v.strictly_increasing for name, v in catalog().items()}
    assert flags["identity"] and flags["power-law-6"] and flags["golden-cdf"]
    assert not flags["cantor"]
    assert not flags["piecewise"]


# ------------------ ITERATED CDF ------------------


def test_iterated_cdf_uniform_fixed_point():
    v = build_iterated_cdf(preset_ifs("dyadic-uniform"), 257, 5)
    grid = np.linspace(0, 1, 257)
    assert np.allclose(evaluate(v, grid), grid, atol=1e-12)


def test_iterated_cdf_matches_exact_cantor():
    grid = np.linspace(0, 1, 3**7 + 1)
    v = build_iterated_cdf(preset_ifs("cantor3"), grid.size, 40)
    assert np.allclose(evaluate(v, grid), evaluate(cantor_staircase(), grid), atol=1e-9)


def test_golden_cdf_is_symmetric_and_strictly_increasing():
    v = build_iterated_cdf(preset_ifs("golden-bernoulli"), 1025, 100)
    assert evaluate(v, 0.5) == pytest.approx(0.5, abs=1e-9)
    assert np.all(np.diff(v.grid_values) > 0)
    assert v.grid_values[0] == 0.0 and v.grid_values[-1] == 1.0


@pytest.mark.parametrize("name", ["cantor3", "golden-bernoulli"])
def test_iterated_cdf_convergence_is_monotone(name):
    v = build_iterated_cdf(preset_ifs(name), 2049, 60)
    history = np.array(v.convergence)
    assert np.all(np.diff(history) <= 1e-15)


def test_iterated_cdf_bad_inputs():
    with pytest.raises(ValidationError):
        build_iterated_cdf(preset_ifs("cantor3"), 1, 10)
    with pytest.raises(ValidationError):
        build_iterated_cdf(preset_ifs("cantor3"), 65, 0)


# ------------------ INVERSE ------------------


def test_inverse_examples():
    assert generalized_inverse(power_law(2.0), 0.25) == pytest.approx(0.5)
    assert generalized_inverse(identity(), 0.7) == pytest.approx(0.7)
    assert generalized_inverse(cantor_staircase(), 0.5, tol=1e-13) == pytest.approx(2 / 3, abs=1e-12)


def test_inverse_plateau_takes_right_endpoint():
    v = piecewise_linear([(0, 0), (0.3, 0.1), (0.6, 0.1), (1.0, 1.0)])
    assert generalized_inverse(v, 0.1, tol=1e-13) == pytest.approx(0.6, abs=1e-12)


def test_inverse_range():
    v = power_law(2.0)
    with pytest.raises(RangeError):
        generalized_inverse(v, 1.5)
    assert generalized_inverse(cantor_staircase(), 1.0) == 1.0


@pytest.mark.parametrize("name", list(catalog()))
def test_inverse_round_trip(name, rng):
    v = catalog()[name]
    s = rng.uniform(0, v.total(), 1000)
    t = generalized_inverse(v, s, tol=1e-14)
    assert np.max(np.abs(evaluate(v, t) - s)) <= 1e-8


# ------------------ HÖLDER INDICES ------------------


def test_sqrt_indices_at_origin():
    v = power_law(0.5)
    upper = estimate_upper_index(v, 0.0)
    lower = estimate_lower_index(v, 0.0)
    assert 0.45 <= upper.alpha_upper <= 0.55
    assert lower.alpha_lower == pytest.approx(1.0, abs=0.03)
    assert not upper.diagnostics["upper"].empty


@pytest.mark.parametrize("method", ["direct", "inverse"])
@pytest.mark.parametrize("beta, expected", [(0.5, 1.0), (6.0, 6.0)])
def test_power_law_lower_index_both_methods(beta, expected, method):
    estimate = estimate_lower_index(power_law(beta), 0.0, method=method)
    assert estimate.method == method
    assert abs(estimate.alpha_lower - expected) <= 0.04 * expected + 0.02
    # the lower index is never below 1 on a differentiable V
    assert estimate.alpha_lower >= 0.97


def test_power6_lower_index_direct_is_tight():
    assert estimate_lower_index(power_law(6.0), 0.0).alpha_lower == pytest.approx(6.0, abs=0.05)


def test_identity_indices_interior():
    v = identity()
    upper = estimate_upper_index(v, 0.5).alpha_upper
    lower = estimate_lower_index(v, 0.5).alpha_lower
    assert 0.9 <= upper <= 1.0
    # within two grid steps of 1
    assert lower == pytest.approx(1.0, abs=0.021)
    assert upper <= lower


def test_identity_inverse_lower_index_interior():
    lower = estimate_lower_index(identity(), 0.5, method="inverse").alpha_lower
    assert lower == pytest.approx(1.0, abs=0.05)


def test_lower_scan_rejects_infinite_suprema():
    estimate = estimate_lower_index(power_law(0.5), 0.0)
    refined = estimate.diagnostics["lower_refined"]
    # alpha = 0.9 blows up as pairs close in; alpha = 1.1 does not
    rows = refined.index.get_indexer([0.9, 1.1], method="nearest")
    assert refined.iloc[rows[0]].max() > math.log(2.0)
    assert refined.iloc[rows[1]].max() <= math.log(2.0)


def test_cantor_upper_index_at_origin():
    assert estimate_upper_index(cantor_staircase(), 0.0).alpha_upper == pytest.approx(CANTOR_DIM, abs=0.06)


def test_inverse_method_for_power_law():
    estimate = estimate_lower_index(power_law(2.0), 0.0, method="inverse")
    assert estimate.alpha_lower == pytest.approx(2.0, abs=0.1)
    assert "inverse_upper" in estimate.diagnostics


def test_interval_indices_of_identity():
    upper, lower = estimate_interval_indices(identity(), [0.25, 0.5, 0.75])
    assert 0.9 <= upper <= 1.0
    assert lower == pytest.approx(1.0, abs=0.05)


def test_interval_indices_skip_lower_on_plateaus():
    upper, lower = estimate_interval_indices(cantor_staircase(), [0.0])
    assert upper == pytest.approx(CANTOR_DIM, abs=0.06)
    assert lower == math.inf


def test_estimate_indices_merges_both_scans():
    estimate = estimate_indices(power_law(0.5), 0.0)
    assert 0.45 <= estimate.alpha_upper <= 0.55
    assert estimate.alpha_lower == pytest.approx(1.0, abs=0.03)
    assert {"upper", "lower"} <= set(estimate.diagnostics)


def test_lower_index_needs_strict_increase():
    with pytest.raises(PreconditionError):
        estimate_lower_index(cantor_staircase(), 0.2)


def test_index_scan_input_validation():
    with pytest.raises(DomainError):
        estimate_upper_index(identity(), 0.5, deltas=[0.01, 0.1])
    with pytest.raises(DomainError):
        estimate_upper_index(identity(), 0.5, deltas=[2.0, 1.0])
    with pytest.raises(DomainError):
        estimate_lower_index(identity(), 0.5, method="bisect")
    # only one radius survives the float spacing at t = 0.5
    with pytest.raises(DomainError):
        estimate_upper_index(identity(), 0.5, deltas=[0.25, 1e-17, 1e-18])


# ------------------ BOUNDS AND RECORDS ------------------


def test_graph_dimension_bounds():
    assert graph_dimension_bounds(0.5, 1.0) == (1.5, 1.75)
    assert graph_dimension_bounds(1.0, math.inf) == (1.0, 1.5)


def test_fourier_dimension_floor():
    assert fourier_dimension_floor(1.0) == pytest.approx(2 / 3)
    gamma = golden_bernoulli_gamma()
    assert gamma == pytest.approx(0.694, abs=1e-3)
    assert fourier_dimension_floor(gamma) == pytest.approx(0.5154, abs=1e-3)
    with pytest.raises(DomainError):
        fourier_dimension_floor(1.5)


def test_variance_from_record():
    assert variance_from_record({"kind": "power-law", "params": {"beta": 6}}).beta == 6.0
    assert variance_from_record({"kind": "cantor-staircase"}).kind is VarianceKind.CANTOR_STAIRCASE
    golden = variance_from_record(
        {"kind": "iterated-cdf", "params": {"ifs": "golden-bernoulli", "grid_size": 257, "iterations": 20}}
    )
    assert golden.is_built
    assert golden.inverse_holder_gamma == pytest.approx(golden_bernoulli_gamma())
    inline = variance_from_record(
        {
            "kind": "self-similar-cdf",
            "params": {"ifs": {"ratios": [0.5, 0.25], "translations": [0, 0.75], "weights": [0.5, 0.5]}},
        }
    )
    assert inline.ifs.ratios == (0.5, 0.25)
    with pytest.raises(ValidationError):
        variance_from_record({"kind": "hata"})


def test_self_similar_cdf_needs_convex_osc():
    with pytest.raises(PreconditionError):
        self_similar_cdf(preset_ifs("golden-bernoulli"))
