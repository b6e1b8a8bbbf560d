"""Local uniform Hölder indices of catalog entries at chosen points and over intervals."""

import logging

from experiments.common import ExperimentOutcome
from timechange.variance_catalog import (
    estimate_interval_indices,
    estimate_lower_index,
    estimate_upper_index,
    graph_dimension_bounds,
    variance_from_record,
)
from utils.config_loader import ConfigError

logger = logging.getLogger(__name__)

LOWER_METHODS = ("direct", "inverse")


def lower_key(label, method):
    return f"{label}_lower" if method == "direct" else f"{label}_lower_{method}"


def run(config):
    params = config.estimator
    cases = params.get("cases")
    if not cases:
        raise ConfigError(f"preset '{config.preset}' lists no [[estimator.cases]]")
    pairs = int(params.get("pairs_per_window", 64))
    methods = params.get("lower_methods", ["direct"])
    unknown = sorted(set(methods) - set(LOWER_METHODS))
    if unknown:
        raise ConfigError(f"unknown lower_methods {unknown}; choose from {list(LOWER_METHODS)}")

    summary, per_path = {}, []
    for case in cases:
        label = case["label"]
        v = variance_from_record(case["variance"])
        t = float(case.get("point", 0.0))

        upper = estimate_upper_index(v, t, pairs_per_window=pairs).alpha_upper
        row = {"label": label, "variance": v.name, "point": t, "alpha_upper": upper}
        summary[f"{label}_upper"] = upper
        if v.strictly_increasing:
            for method in methods:
                lower = estimate_lower_index(v, t, pairs_per_window=pairs, method=method).alpha_lower
                row[f"alpha_lower_{method}"] = lower
                summary[lower_key(label, method)] = lower
            if "direct" in methods:
                row["graph_dimension_bracket"] = list(graph_dimension_bounds(upper, row["alpha_lower_direct"]))
        logger.info("%s at t=%g: %s", v.name, t, {k: v for k, v in row.items() if k.startswith("alpha")})
        per_path.append(row)

    for interval in params.get("intervals", []):
        label = interval["label"]
        v = variance_from_record(interval["variance"])
        points = [float(p) for p in interval["points"]]
        upper, lower = estimate_interval_indices(v, points, pairs_per_window=pairs)
        summary[f"{label}_interval_upper"] = upper
        summary[f"{label}_interval_lower"] = lower
        per_path.append(
            {
                "label": label,
                "variance": v.name,
                "points": points,
                "alpha_upper": upper,
                "alpha_lower_direct": lower,
                "graph_dimension_bracket": list(graph_dimension_bounds(upper, lower)),
            }
        )

    return ExperimentOutcome(summary=summary, per_path=per_path, prediction={"anchor": config.anchor})
