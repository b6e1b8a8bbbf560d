"""L^q spectrum table of a self-similar measure, with word-set bookkeeping."""

import math

import pandas as pd

from experiments.common import ExperimentOutcome
from timechange.self_similar import (
    box_dimension,
    children_counts,
    enumerate_lambda_n,
    lambda_n_moment_exponent,
    lq_spectrum,
    preset_ifs,
)

DEFAULT_Q_LIST = [0.5, 1.0, 2.0, 3.0]


def closed_form_tau(ifs, q):
    """log(sum p_i^q) / log r, valid when every ratio equals r"""
    if not ifs.equicontractive:
        return None
    return math.log(math.fsum(p**q for p in ifs.weights)) / math.log(ifs.ratios[0])


def run(config):
    params = config.estimator
    ifs = preset_ifs(params.get("ifs", "cantor3"))
    q_list = [float(q) for q in params.get("q_list", DEFAULT_Q_LIST)]
    base_scale = float(params.get("base_scale", max(ifs.ratios)))
    mass_levels = int(params.get("mass_levels", 12))
    children_levels = int(params.get("children_levels", 8))
    words_level = int(params.get("words_level", 4))

    rows = []
    for q in q_list:
        tau = lq_spectrum(ifs, q)
        reference = closed_form_tau(ifs, q)
        rows.append(
            {
                "q": q,
                "tau": tau,
                "closed_form": reference,
                "abs_error": None if reference is None else abs(tau - reference),
                "word_exponent_n6": lambda_n_moment_exponent(ifs, q, base_scale, 6),
                "word_exponent_n12": lambda_n_moment_exponent(ifs, q, base_scale, 12),
            }
        )

    mass_errors = [abs(enumerate_lambda_n(ifs, base_scale, n).masses.sum() - 1.0) for n in range(1, mass_levels + 1)]
    children_max = [int(children_counts(ifs, base_scale, n).max()) for n in range(1, children_levels + 1)]

    errors = [row["abs_error"] for row in rows if row["abs_error"] is not None]
    summary = {
        "max_abs_error": max(errors) if errors else None,
        "tau_at_0": lq_spectrum(ifs, 0.0),
        "box_dimension": box_dimension(ifs),
        "lambda_mass_error": float(max(mass_errors)),
        "max_children_count": max(children_max),
        "children_count_spread": max(children_max) - min(children_max),
    }
    for row in rows:
        summary[f"tau_q{row['q']:g}"] = row["tau"]

    prediction = {
        "closed_form": "log(sum p_i^q) / log r" if ifs.equicontractive else None,
        "anchor": config.anchor,
        "ifs": ifs.name,
    }
    words = enumerate_lambda_n(ifs, base_scale, words_level).frame()
    words["children"] = children_counts(ifs, base_scale, words_level)
    frames = {"lq_table": pd.DataFrame(rows), "lambda_words": words}
    return ExperimentOutcome(summary=summary, per_path=rows, prediction=prediction, frames=frames)
