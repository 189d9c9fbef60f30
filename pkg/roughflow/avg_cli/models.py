"""
Report models.

Reports hold no timestamps, so identical runs produce identical bytes.
"""

import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

import roughflow


def jsonable(value: Any) -> Any:
    """numpy arrays and scalars as plain lists and floats."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


class CheckResult(BaseModel):
    """
    One asserted comparison.

    A check with ``expect_failure`` is a control: the run is healthy when
    it fails.
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    expected: Any = None
    actual: Any = None
    se: Any = None
    tolerance: Any = None
    passed: bool
    expect_failure: bool = False
    detail: Optional[str] = None

    @field_validator("expected", "actual", "se", "tolerance", mode="before")
    @classmethod
    def _plain(cls, value):
        return jsonable(value)

    @property
    def ok(self) -> bool:
        return self.passed != self.expect_failure


class ExperimentReport(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    kind: str
    config: Dict[str, Any]
    version: str
    seed: int
    streams: List[str]
    targets: Dict[str, Any] = Field(default_factory=dict)
    summary: Dict[str, Any] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)
    passed: bool = False

    @field_validator("config", "targets", "summary", mode="before")
    @classmethod
    def _plain(cls, value):
        return jsonable(value)

    def add_check(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def add_error(self, message: str):
        self.errors.append(message)

    def finalize(self) -> "ExperimentReport":
        self.passed = not self.errors and all(check.ok for check in self.checks)
        return self


@lru_cache(maxsize=1)
def version_string() -> str:
    """``git describe --always --dirty`` of the source tree, else the package version."""
    root = Path(roughflow.__file__).resolve().parent.parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=root, capture_output=True, text=True, timeout=5, check=True,
        )
        described = out.stdout.strip()
        if described:
            return described
    except (OSError, subprocess.SubprocessError):
        pass
    return roughflow.__version__
