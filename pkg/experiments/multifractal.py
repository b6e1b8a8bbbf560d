"""Graph dimension of B^H_(V(t)) for V the CDF of a self-similar measure, against 1 - tau(H).

For convex-OSC measures tau comes from lq_spectrum; for overlapping ones
(the golden Bernoulli convolution) it is estimated from the oscillations
of the grid CDF itself, and the run is exploratory.
"""

import logging

import numpy as np

from experiments.common import ExperimentOutcome, flatten_stats, sample_paths
from timechange.dim_estimators import box_dim_fit, empirical_lq
from timechange.errors import PreconditionError
from timechange.process_sim import SamplePath, uniform_grid
from timechange.self_similar import legendre_transform, lq_spectrum, preset_ifs, tau_curve, tau_derivative
from timechange.variance_catalog import VarianceKind, evaluate, fourier_dimension_floor

logger = logging.getLogger(__name__)

LEGENDRE_Q_GRID = np.round(np.arange(-10.0, 10.0 + 1e-9, 0.01), 10)
DERIVATIVE_STEP = 0.05


def measure_ifs(v):
    if v.kind is VarianceKind.CANTOR_STAIRCASE:
        return preset_ifs("cantor3")
    if v.kind in (VarianceKind.SELF_SIMILAR_CDF, VarianceKind.ITERATED_CDF):
        return v.ifs
    raise PreconditionError(f"{v.name} is not the CDF of a self-similar measure")


def exact_spectrum(ifs, hurst):
    alpha = tau_derivative(ifs, hurst)
    tau_h = lq_spectrum(ifs, hurst)
    legendre = legendre_transform(tau_curve(ifs, LEGENDRE_Q_GRID), alpha)
    conjectured = hurst * alpha - tau_h
    return {
        "tau_at_hurst": tau_h,
        "alpha_at_hurst": alpha,
        "legendre_value": legendre.value,
        "legendre_q_star": legendre.q_star,
        "legendre_at_boundary": legendre.at_boundary,
        "legendre_identity_error": abs(legendre.value - conjectured),
    }


def estimated_spectrum(v, hurst, grid_size, level):
    """tau_V near H from the oscillations of V on its own grid"""
    grid = uniform_grid(grid_size, v.domain_end)
    cdf_path = SamplePath(grid, evaluate(v, grid.points), hurst, v.name, seed=0)

    def tau_hat(q):
        return float(empirical_lq(cdf_path, q, [level]).iloc[0])

    tau_h = tau_hat(hurst)
    alpha = (tau_hat(hurst + DERIVATIVE_STEP) - tau_hat(hurst - DERIVATIVE_STEP)) / (2 * DERIVATIVE_STEP)
    return {
        "tau_at_hurst": tau_h,
        "alpha_at_hurst": alpha,
        "conjectured_legendre_value": hurst * alpha - tau_h,
    }


def run(config):
    params = config.estimator
    v = config.build_variance()
    ifs = measure_ifs(v)
    levels = params.get("levels", [None, None])
    q_list = [float(q) for q in params.get("q_list", [])]

    if ifs.convex_osc:
        spectrum = exact_spectrum(ifs, config.hurst)
    else:
        spectrum = estimated_spectrum(v, config.hurst, int(params.get("cdf_grid_size", config.grid_size)), int(params.get("cdf_level", 12)))
        logger.info("%s overlaps; tau(H) estimated from the grid CDF", ifs.name)
    predicted = 1.0 - spectrum["tau_at_hurst"]

    per_path = []
    for path in sample_paths(config, v):
        estimate = box_dim_fit(path, levels[0], levels[1])
        row = {"stream_index": path.stream_index, "dimension": estimate.value, "r_squared": estimate.r_squared}
        for q in q_list:
            row[f"path_tau_q{q:g}"] = float(empirical_lq(path, q, [estimate.scales_used[-1]]).iloc[0])
        per_path.append(row)

    summary = {**flatten_stats("dimension", [row["dimension"] for row in per_path]), **spectrum}
    summary["dimension_gap"] = abs(summary["mean_dimension"] - predicted)
    if ifs.convex_osc:
        for q in q_list:
            # tau_X(q) >= tau_V(Hq)
            summary[f"tau_lower_bound_q{q:g}"] = lq_spectrum(ifs, config.hurst * q)

    gamma = v.inverse_holder_gamma
    prediction = {
        "graph_dimension": predicted,
        "exact": bool(ifs.convex_osc),
        "fourier_dimension_floor": fourier_dimension_floor(gamma) if gamma is not None else None,
        "anchor": config.anchor,
    }
    return ExperimentOutcome(summary=summary, per_path=per_path, prediction=prediction)
