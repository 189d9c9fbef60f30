"""Result files: ``report.json`` and ``series.csv``."""

import json
from pathlib import Path
from typing import Dict, Union

import numpy as np

from roughflow.avg_cli.experiments import ExperimentResult
from roughflow.tensor_core.io import FLOAT_FORMAT

REPORT_FILE = "report.json"
SERIES_FILE = "series.csv"


def write_report(report_data: Dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report_data, f, indent=2, sort_keys=True, allow_nan=True)
        f.write("\n")
    return path


def write_series(header, rows: np.ndarray, path: Union[str, Path]) -> Path:
    """CSV with a header row; floats round-trip exactly."""
    path = Path(path)
    rows = np.asarray(rows, dtype=float).reshape(-1, len(header))
    np.savetxt(path, rows, delimiter=",", header=",".join(header), comments="", fmt=FLOAT_FORMAT)
    return path


def write_outputs(result: ExperimentResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write both files into ``out_dir``, creating it if needed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = result.report.model_dump(mode="json")
    if result.fits:
        data["summary"]["fits"] = {name: fit.model_dump() for name, fit in result.fits.items()}
    return {
        "report": write_report(data, out_dir / REPORT_FILE),
        "series": write_series(result.header, result.series, out_dir / SERIES_FILE),
    }


def load_report(path: Union[str, Path]) -> Dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
