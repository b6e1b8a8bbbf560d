"""Box-counting dimension of sampled graphs against the predicted Hausdorff dimension."""

import logging

import pandas as pd

from experiments.common import ExperimentOutcome, flatten_stats, sample_paths
from timechange.dim_estimators import box_dim_fit
from timechange.self_similar import predicted_graph_dim, preset_ifs
from timechange.variance_catalog import VarianceFunction, VarianceKind

logger = logging.getLogger(__name__)


def predicted_dimension(v: VarianceFunction, hurst: float):
    """Theoretical dim_H of the graph of B^H_(V(t)) when one is known, else None"""
    if v.kind is VarianceKind.CANTOR_STAIRCASE:
        return predicted_graph_dim(preset_ifs("cantor3"), hurst)
    if v.kind is VarianceKind.SELF_SIMILAR_CDF:
        return predicted_graph_dim(v.ifs, hurst)
    if v.kind in (VarianceKind.IDENTITY, VarianceKind.POWER_LAW) or (
        v.kind is VarianceKind.PIECEWISE_LINEAR and v.strictly_increasing
    ):
        # bi-Lipschitz away from isolated points: the fBM graph value 2 - H
        return 2.0 - hurst
    return None


def run(config):
    v = config.build_variance()
    levels = config.estimator.get("levels", [None, None])
    n_min, n_max = levels[0], levels[1]

    paths = sample_paths(config, v)
    per_path = []
    for path in paths:
        estimate = box_dim_fit(path, n_min, n_max)
        logger.debug("path %d: box dimension %.4f (r^2 %.4f)", path.stream_index, estimate.slope, estimate.r_squared)
        per_path.append(
            {
                "stream_index": path.stream_index,
                "dimension": estimate.value,
                "slope": estimate.slope,
                "r_squared": estimate.r_squared,
                "levels": list(estimate.scales_used),
                "counts": list(estimate.per_scale_counts),
            }
        )

    summary = flatten_stats("dimension", [row["dimension"] for row in per_path])
    prediction = {"graph_dimension": predicted_dimension(v, config.hurst), "anchor": config.anchor}
    counts = pd.DataFrame(
        [
            {"stream_index": row["stream_index"], **{f"level_{n}": c for n, c in zip(row["levels"], row["counts"])}}
            for row in per_path
        ]
    )
    return ExperimentOutcome(summary=summary, per_path=per_path, prediction=prediction, frames={"box_counts": counts})
