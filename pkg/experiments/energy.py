"""Energy dichotomy: I_s of one graph at two resolutions, for s on both sides of the dimension."""

from experiments.common import ExperimentOutcome
from timechange.dim_estimators import LEBESGUE, energy_estimate
from timechange.process_sim import RngStream, sample_path, subsample, uniform_grid


def change_key(s):
    return "relative_change_s" + f"{s:g}".replace(".", "_")


def run(config):
    params = config.estimator
    s_values = [float(s) for s in params.get("s_values", [1.4, 1.6])]
    step = int(params.get("coarse_step", 4))

    v = config.build_variance()
    fine = sample_path(v, uniform_grid(config.grid_size, v.domain_end), config.hurst, RngStream(config.root_seed))
    coarse = subsample(fine, step)

    summary, per_path = {}, []
    for s in s_values:
        fine_energy = energy_estimate(fine, LEBESGUE, s)
        coarse_energy = energy_estimate(coarse, LEBESGUE, s)
        change = abs(fine_energy.value - coarse_energy.value) / coarse_energy.value
        summary[change_key(s)] = change
        per_path.append(
            {
                "s": s,
                "coarse_points": coarse.grid.resolution,
                "fine_points": fine.grid.resolution,
                "coarse_energy": coarse_energy.value,
                "fine_energy": fine_energy.value,
                "relative_change": change,
                "coincident_pairs": fine_energy.coincident_pairs + coarse_energy.coincident_pairs,
                "fine_self_cell": fine_energy.self_cell,
                "coarse_self_cell": coarse_energy.self_cell,
            }
        )

    if len(s_values) >= 2:
        low, high = min(s_values), max(s_values)
        summary["change_gap"] = summary[change_key(high)] - summary[change_key(low)]
    return ExperimentOutcome(summary=summary, per_path=per_path, prediction={"anchor": config.anchor})
