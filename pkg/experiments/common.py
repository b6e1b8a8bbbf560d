"""Pieces shared by the experiment modules."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import pandas as pd

from timechange.process_sim import sample_ensemble, uniform_grid
from utils.config_loader import ExperimentConfig


@dataclass
class ExperimentOutcome:
    """What an experiment module hands back to the runner."""

    summary: Dict[str, Any]
    per_path: List[Dict[str, Any]] = field(default_factory=list)
    prediction: Dict[str, Any] = field(default_factory=dict)
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)


def ensemble_stats(values: Sequence[float]) -> Dict[str, float]:
    """mean, median and standard error of an ensemble of estimates"""
    series = pd.Series(values, dtype=float)
    stderr = float(series.std(ddof=1) / math.sqrt(len(series))) if len(series) > 1 else 0.0
    return {"mean": float(series.mean()), "median": float(series.median()), "stderr": stderr, "count": len(series)}


def flatten_stats(prefix: str, values: Sequence[float]) -> Dict[str, float]:
    """ensemble_stats keyed as '<stat>_<prefix>' for the report summary"""
    return {f"{stat}_{prefix}": value for stat, value in ensemble_stats(values).items()}


def sample_paths(config: ExperimentConfig, v=None, grid=None):
    """The preset's ensemble on its uniform grid (or the given one), in stream order"""
    v = config.build_variance() if v is None else v
    grid = uniform_grid(config.grid_size, v.domain_end) if grid is None else grid
    return sample_ensemble(v, grid, config.hurst, config.root_seed, config.ensemble, n_jobs=config.n_jobs)
