"""Fourier decay of the graph measure over a (|xi|, angle) lattice."""

import logging

import numpy as np
import pandas as pd

from experiments.common import ExperimentOutcome, flatten_stats, sample_paths
from timechange.dim_estimators import LEBESGUE, fourier_decay_fit, quadrature_base, scan_frame
from timechange.process_sim import TimeGrid
from timechange.self_similar import fourier_product, measure_quadrature, preset_ifs
from timechange.variance_catalog import fourier_dimension_floor

logger = logging.getLogger(__name__)


def base_and_grid(params):
    """Base measure plus the grid it lives on; quadrature nodes become the grid itself"""
    if params.get("base", "lebesgue") == "lebesgue":
        return LEBESGUE, None, None
    ifs = preset_ifs(params.get("quadrature_ifs", "cantor3"))
    quadrature = measure_quadrature(ifs, int(params.get("quadrature_level", 12)))
    grid = TimeGrid(np.unique(np.concatenate([[0.0], quadrature.points, [1.0]])))
    return quadrature_base(quadrature), grid, ifs


def run(config):
    params = config.estimator
    v = config.build_variance()
    base, grid, ifs = base_and_grid(params)
    u_levels = [float(u) for u in params.get("u_levels", [2.0**k for k in range(4, 11)])]
    angles = int(params.get("angles_per_level", 64))
    rho = float(params.get("rho", 0.5))

    paths = sample_paths(config, v, grid)
    per_path, scans = [], []
    horizontal = []
    for path in paths:
        fit = fourier_decay_fit(path, base, u_levels, angles, rho, n_jobs=config.n_jobs)
        axis = [s.ft_abs for s in fit.samples if s.xi[1] == 0.0 and s.xi[0] > 0]
        horizontal.append(axis)
        per_path.append(
            {
                "stream_index": path.stream_index,
                "alpha_hat": fit.alpha_hat,
                "clamped": fit.clamped,
                "worst_direction_alpha": fit.worst_direction_alpha,
                "per_cone_slopes": fit.per_cone_slopes,
                "horizontal_axis_abs": axis,
            }
        )
        scans.append(scan_frame(fit.samples).assign(stream_index=path.stream_index))

    summary = {
        **flatten_stats("alpha_hat", [row["alpha_hat"] for row in per_path]),
        **flatten_stats("worst_direction_alpha", [row["worst_direction_alpha"] for row in per_path]),
        "min_horizontal_axis_abs": float(np.min(horizontal)),
    }

    if params.get("product_oracle", False):
        oracle = np.array([abs(fourier_product(ifs, u, terms=int(params.get("oracle_terms", 60)))) for u in u_levels])
        summary["oracle_max_error"] = float(np.max(np.abs(np.array(horizontal) - oracle[None, :])))
        logger.debug("product oracle |mu^(u)|: %s", np.round(oracle, 6).tolist())

    gamma = v.inverse_holder_gamma
    prediction = {
        "fourier_dimension_floor": fourier_dimension_floor(gamma) if gamma is not None else None,
        "anchor": config.anchor,
    }
    return ExperimentOutcome(
        summary=summary,
        per_path=per_path,
        prediction=prediction,
        frames={"scan": pd.concat(scans, ignore_index=True)},
    )
