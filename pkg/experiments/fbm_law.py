"""Monte Carlo check of the fBM sampler's covariance at a handful of grid times."""

import numpy as np
import pandas as pd

from experiments.common import ExperimentOutcome
from timechange.process_sim import fbm_covariance, sample_ensemble, uniform_grid


def hurst_key(prefix, hurst):
    return f"{prefix}_h{int(round(hurst * 100)):02d}"


def covariance_z_scores(values, times, hurst):
    """|empirical - exact| / standard error, entrywise over the upper triangle"""
    count = values.shape[0]
    products = values[:, :, None] * values[:, None, :]
    empirical = products.mean(axis=0)
    stderr = products.std(axis=0, ddof=1) / np.sqrt(count)
    exact = fbm_covariance(times, hurst)
    i, j = np.triu_indices(times.size)
    return np.abs(empirical - exact)[i, j] / stderr[i, j], empirical, exact


def run(config):
    params = config.estimator
    hurst_list = [float(h) for h in params.get("hurst_list", [0.3, 0.7])]
    v = config.build_variance()
    grid = uniform_grid(int(params.get("time_points", 8)) + 1, v.domain_end)
    times = grid.points[1:]

    summary, per_path, tables = {}, [], []
    for hurst in hurst_list:
        paths = sample_ensemble(v, grid, hurst, config.root_seed, config.ensemble, n_jobs=config.n_jobs)
        values = np.stack([path.values[1:] for path in paths])
        z, empirical, exact = covariance_z_scores(values, times, hurst)
        summary[hurst_key("max_z", hurst)] = float(z.max())
        summary[hurst_key("variance_at_end", hurst)] = float(empirical[-1, -1])
        per_path.append({"hurst": hurst, "max_z": float(z.max()), "mean_z": float(z.mean()), "paths": len(paths)})
        i, j = np.triu_indices(times.size)
        tables.append(
            pd.DataFrame(
                {"hurst": hurst, "s": times[i], "t": times[j], "empirical": empirical[i, j], "exact": exact[i, j]}
            )
        )

    return ExperimentOutcome(
        summary=summary,
        per_path=per_path,
        prediction={"anchor": config.anchor},
        frames={"covariance": pd.concat(tables, ignore_index=True)},
    )
