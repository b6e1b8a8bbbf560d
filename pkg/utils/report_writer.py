import json
import math
from pathlib import Path

import numpy as np
import pandas as pd

from timechange.errors import OutputError, ValidationError
from timechange.process_sim import path_frame

REPORT_FILE = "report.json"
TIMING_FILE = "timing.json"
MANIFEST_FILE = "manifest.json"
CSV_FLOAT_FORMAT = "%.17g"


def to_plain(value):
    """Convert numpy/pandas scalars and containers into JSON-ready builtins"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, pd.Series):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def ensure_dir(path):
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory {path}: {e}") from e
    return path


def write_json(document, path):
    """Sorted keys and fixed indentation so reruns are byte-identical"""
    path = Path(path)
    try:
        path.write_text(json.dumps(to_plain(document), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e}") from e
    return path


def write_report(report, out_dir):
    return write_json(report, ensure_dir(out_dir) / REPORT_FILE)


def write_timing(seconds, out_dir):
    return write_json({"wall_clock_seconds": round(seconds, 3)}, ensure_dir(out_dir) / TIMING_FILE)


def write_frame(frame, path):
    try:
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e}") from e
    return Path(path)


def write_paths(paths, out_dir):
    """One t,x CSV per path plus a manifest of seeds and stream indices"""
    out_dir = ensure_dir(out_dir)
    files = []
    entries = []
    for path in paths:
        name = f"path_{path.stream_index:04d}.csv"
        files.append(write_frame(path_frame(path), out_dir / name))
        entries.append(
            {
                "file": name,
                "root_seed": path.seed,
                "stream_index": path.stream_index,
                "hurst": path.hurst,
                "variance": path.v_name,
                "grid_size": path.grid.resolution,
            }
        )
    manifest = write_json({"schema": "1", "paths": entries}, out_dir / MANIFEST_FILE)
    return files + [manifest]


def read_path_csv(path):
    """Load a t,x dump back into (times, values) arrays"""
    frame = pd.read_csv(path)
    missing = {"t", "x"} - set(frame.columns)
    if missing:
        raise ValidationError(f"{path} lacks columns {', '.join(sorted(missing))}")
    return frame["t"].to_numpy(dtype=float), frame["x"].to_numpy(dtype=float)
