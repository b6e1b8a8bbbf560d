"""Experiment registry and the preset runner.

Every experiment module exposes `run(config) -> ExperimentOutcome`. The
runner resolves a preset, routes it to its module by kind, compares the
summary against the preset's checks and writes the report.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from experiments import energy, fbm_law, fourier_scan, graph_dimension, holder_indices, lq_table, multifractal
from experiments.common import ExperimentOutcome, sample_paths
from timechange.errors import TimeChangeError
from utils import report_writer
from utils.config_loader import SCHEMA_VERSION, ExperimentConfig, resolve_preset

logger = logging.getLogger(__name__)

EXPERIMENTS = {
    "graph_dimension": graph_dimension.run,
    "lq_table": lq_table.run,
    "fourier_scan": fourier_scan.run,
    "multifractal": multifractal.run,
    "holder_indices": holder_indices.run,
    "energy": energy.run,
    "fbm_law": fbm_law.run,
}


@dataclass(frozen=True)
class Check:
    name: str
    value: Optional[float]
    lower: Optional[float] = None
    upper: Optional[float] = None
    asserted: bool = True

    @property
    def passed(self) -> bool:
        if self.value is None or (isinstance(self.value, float) and math.isnan(self.value)):
            return False
        if self.lower is not None and self.value < self.lower:
            return False
        if self.upper is not None and self.value > self.upper:
            return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "passed": self.passed,
            "asserted": self.asserted,
        }


@dataclass
class ExperimentReport:
    preset: str
    config: Dict[str, Any]
    outcome: Optional[ExperimentOutcome]
    checks: List[Check]
    wall_clock_seconds: float
    error: Optional[str] = None
    files: List[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks if c.asserted)

    def to_dict(self) -> Dict[str, Any]:
        """Serialized form; wall-clock time is kept out so reruns stay byte-identical"""
        document = {
            "schema": SCHEMA_VERSION,
            "preset": self.preset,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
        if self.outcome is not None:
            document.update(
                summary=self.outcome.summary,
                per_path=self.outcome.per_path,
                prediction=self.outcome.prediction,
            )
        if self.error is not None:
            document["error"] = self.error
        return document


def evaluate_checks(config: ExperimentConfig, summary: Dict[str, Any]) -> List[Check]:
    checks = []
    for name, bounds in sorted(config.checks.items()):
        value = summary.get(name)
        if value is None:
            logger.warning("check '%s' has no matching summary value", name)
        checks.append(
            Check(
                name=name,
                value=None if value is None else float(value),
                lower=bounds.get("lower"),
                upper=bounds.get("upper"),
                asserted=bounds.get("asserted", True),
            )
        )
    return checks


def run_config(config: ExperimentConfig, output_dir=None) -> ExperimentReport:
    """Run a resolved config; the report is written even when the run fails."""
    started = time.perf_counter()
    outcome, error = None, None
    try:
        outcome = EXPERIMENTS[config.kind](config)
    except TimeChangeError as e:
        logger.error("%s failed: %s", config.preset, e)
        error = f"{type(e).__name__}: {e}"

    checks = evaluate_checks(config, outcome.summary) if outcome is not None else []
    report = ExperimentReport(
        preset=config.preset,
        config=config.raw,
        outcome=outcome,
        checks=checks,
        wall_clock_seconds=time.perf_counter() - started,
        error=error,
    )

    if output_dir is not None:
        target = Path(output_dir) / config.preset
        report.files.append(report_writer.write_report(report.to_dict(), target))
        report.files.append(report_writer.write_timing(report.wall_clock_seconds, target))
        if outcome is not None:
            for name, frame in sorted(outcome.frames.items()):
                report.files.append(report_writer.write_frame(frame, target / f"{name}.csv"))
    return report


def run_preset(name: str, overrides: Iterable[str] = (), output_dir=None) -> ExperimentReport:
    return run_config(resolve_preset(name, overrides), output_dir)


def dump_path(config: ExperimentConfig, output_dir) -> List[Path]:
    """Write the preset's ensemble as t,x CSVs plus a manifest."""
    paths = sample_paths(config)
    return report_writer.write_paths(paths, Path(output_dir))
