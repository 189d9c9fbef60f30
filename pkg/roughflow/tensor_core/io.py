"""
CSV formats for rough paths and solution paths.

Path files have the header ``t,u_1..u_d,m_11..m_dd``. Row 0 holds t_0 with
zero increments; row k holds the cell increments over [t_{k-1}, t_k]. The
second level is flattened row-major. Floats are written with 17 significant
digits so a read-back is bit-identical.
"""

from pathlib import Path
from typing import List, Union

import numpy as np

from roughflow.errors import DimensionMismatchError
from roughflow.tensor_core.path import CadlagRoughPath

FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def path_header(dim: int) -> List[str]:
    return (["t"] + [f"u_{i}" for i in range(1, dim + 1)]
            + [f"m_{i}{j}" for i in range(1, dim + 1) for j in range(1, dim + 1)])


def path_to_rows(path: CadlagRoughPath) -> np.ndarray:
    d = path.dim
    rows = np.zeros((path.cells + 1, 1 + d + d * d))
    rows[:, 0] = path.grid
    rows[1:, 1:1 + d] = path.level1
    rows[1:, 1 + d:] = path.level2.reshape(path.cells, d * d)
    return rows


def write_path_csv(path: CadlagRoughPath, file_path: PathLike) -> Path:
    """Write a rough path in the cell-increment CSV format."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(file_path, path_to_rows(path), fmt=FLOAT_FORMAT, delimiter=",",
               header=",".join(path_header(path.dim)), comments="")
    return file_path


def read_path_csv(file_path: PathLike) -> CadlagRoughPath:
    """Read a rough path written by ``write_path_csv``."""
    file_path = Path(file_path)
    with open(file_path, "r") as f:
        header = f.readline().strip().split(",")
    d = sum(1 for name in header if name.startswith("u_"))
    if header != path_header(d):
        raise DimensionMismatchError(f"{file_path}: unexpected path header {header[:4]}...")
    rows = np.loadtxt(file_path, delimiter=",", skiprows=1, ndmin=2)
    if rows.shape[1] != 1 + d + d * d:
        raise DimensionMismatchError(f"{file_path}: expected {1 + d + d * d} columns, got {rows.shape[1]}")
    n = rows.shape[0] - 1
    return CadlagRoughPath(rows[:, 0], rows[1:, 1:1 + d], rows[1:, 1 + d:].reshape(n, d, d))


def write_solution_csv(times: np.ndarray, states: np.ndarray, file_path: PathLike) -> Path:
    """Write ``t,y_1..y_e`` rows."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    states = np.asarray(states, dtype=float).reshape(len(times), -1)
    header = ",".join(["t"] + [f"y_{i}" for i in range(1, states.shape[1] + 1)])
    np.savetxt(file_path, np.column_stack([times, states]), fmt=FLOAT_FORMAT, delimiter=",",
               header=header, comments="")
    return file_path
