"""
Experiment configuration.

A config is a JSON document validated by ``ExperimentConfig``. Chains,
suspensions and field families may be given inline or by preset name; the
``resolve_*`` helpers turn either form into validated objects. Command-line
values for seed, replicas and threads override the file.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from roughflow.brownian.params import BrownianRoughPathParams
from roughflow.cm_opt.optimizer import MAX_LEVEL, ContractionTensor, LilConfig
from roughflow.errors import ConfigError
from roughflow.mixing_gen.presets import chain_preset, suspension_preset
from roughflow.mixing_gen.spec import MarkovMixingSpec, SuspensionSpec
from roughflow.rde.fields import FieldSpec, build_field
from roughflow.rng import MAX_SEED

Kind = Literal[
    "invariance",
    "diffusion-discrete",
    "diffusion-continuous",
    "em-rate",
    "lil",
    "lil-constant",
]

KINDS: Tuple[str, ...] = Kind.__args__

DEFAULT_CHAINS = {
    "invariance": "two-state-0.3",
    "diffusion-discrete": "two-state-0.3",
    "lil": "iid-rademacher",
}

LIL_MAX_LEVEL = 3


class FieldRef(BaseModel):
    """A registered field family and its parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: str = "sine-scalar"
    params: Dict[str, Any] = Field(default_factory=dict)


class ExperimentConfig(BaseModel):
    """
    Everything an experiment run needs.

    Only the fields used by ``kind`` matter; the rest keep their defaults.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Optional[Kind] = None
    seed: int = Field(0, ge=0, le=MAX_SEED)
    replicas: int = Field(1000, ge=2)
    threads: Optional[int] = Field(None, ge=1)

    # sources
    chain: Union[str, MarkovMixingSpec, None] = None
    suspension: Union[str, SuspensionSpec, None] = None
    field: FieldRef = Field(default_factory=FieldRef)
    y0: List[float] = Field(default_factory=lambda: [0.0])

    # discretisation
    T: float = Field(1.0, gt=0)
    N: int = Field(1024, ge=1)
    N_list: Optional[List[int]] = None
    eps: float = Field(2.0 ** -5, gt=0)
    eps_list: Optional[List[float]] = None
    sde_steps: int = Field(512, ge=1)

    # law comparison
    se_factor: float = Field(4.0, gt=0)
    bootstrap: int = Field(1000, ge=10)
    ks_quantile: float = Field(0.99, gt=0, lt=1)

    # rough path norms and Brownian samples
    p: float = 2.5
    p_list: List[float] = Field(default_factory=list)
    sigma: Optional[List[List[float]]] = None
    gamma: Optional[List[List[float]]] = None
    fine_cells: int = Field(8192, ge=1)
    substeps: int = Field(4, ge=1)
    seeds: int = Field(32, ge=1)
    min_delta: float = 0.05
    min_r2: float = 0.8

    # LIL
    tensor: Optional[Any] = None
    indices: Optional[List[int]] = None
    n_max: int = Field(1_000_000, ge=16)
    burn_in: int = Field(16, ge=3)
    band: Tuple[float, float] = (0.3, 1.5)
    checkpoints: int = Field(64, ge=2)
    optimizer: LilConfig = Field(default_factory=LilConfig)
    expected_M: Optional[float] = None

    @field_validator("N_list")
    @classmethod
    def _increasing(cls, value):
        if value is not None:
            if not value or any(n < 1 for n in value):
                raise ValueError("N_list entries must be positive integers")
            if any(b <= a for a, b in zip(value, value[1:])):
                raise ValueError("N_list must be strictly increasing")
        return value

    @field_validator("eps_list")
    @classmethod
    def _decreasing(cls, value):
        if value is not None:
            if not value or any(e <= 0 for e in value):
                raise ValueError("eps_list entries must be positive")
            if any(b >= a for a, b in zip(value, value[1:])):
                raise ValueError("eps_list must be strictly decreasing")
        return value

    @field_validator("p")
    @classmethod
    def _rough_p(cls, value: float) -> float:
        if not 2.0 < value < 3.0:
            raise ValueError(f"p must lie in (2, 3), got {value}")
        return value

    @field_validator("p_list")
    @classmethod
    def _rough_p_list(cls, value: List[float]) -> List[float]:
        bad = [p for p in value if not 2.0 < p < 3.0]
        if bad:
            raise ValueError(f"every p must lie in (2, 3), got {bad}")
        return value

    @model_validator(mode="after")
    def _check_band(self):
        lo, hi = self.band
        if not 0 <= lo < hi:
            raise ValueError(f"band must satisfy 0 <= lo < hi, got {self.band}")
        if self.burn_in >= self.n_max:
            raise ValueError("burn_in must be below n_max")
        return self

    # -- resolution ----------------------------------------------------

    @property
    def resolved_N_list(self) -> List[int]:
        return list(self.N_list) if self.N_list else [self.N]

    @property
    def resolved_eps_list(self) -> List[float]:
        return list(self.eps_list) if self.eps_list else [self.eps]

    def resolve_chain(self) -> MarkovMixingSpec:
        chain = self.chain
        if chain is None:
            default = DEFAULT_CHAINS.get(self.kind or "")
            if default is None:
                raise _missing("chain", self.kind)
            chain = default
        return chain_preset(chain) if isinstance(chain, str) else chain

    def resolve_suspension(self) -> SuspensionSpec:
        suspension = self.suspension if self.suspension is not None else "two-state-roof"
        return suspension_preset(suspension) if isinstance(suspension, str) else suspension

    def resolve_field(self) -> FieldSpec:
        return build_field(self.field.family, self.field.params)

    def resolve_y0(self, fields: FieldSpec) -> np.ndarray:
        y0 = np.asarray(self.y0, dtype=float)
        if y0.shape != (fields.e,):
            raise ConfigError(f"y0 must have {fields.e} entries, got {y0.shape[0]}",
                              [{"loc": "y0", "msg": f"expected {fields.e} entries"}])
        return y0

    def resolve_brownian(self, dim: int = 2) -> BrownianRoughPathParams:
        sigma = np.eye(dim) if self.sigma is None else np.asarray(self.sigma, dtype=float)
        try:
            return BrownianRoughPathParams(sigma, self.gamma)
        except ValueError as exc:
            raise ConfigError(f"Invalid Brownian parameters: {exc}", [{"loc": "sigma", "msg": str(exc)}]) from None

    def resolve_tensor(self, dim: int) -> ContractionTensor:
        """Contraction tensor from ``tensor`` or ``indices`` (default e_0)."""
        try:
            if self.tensor is not None:
                tensor = ContractionTensor(np.asarray(self.tensor, dtype=float))
            else:
                tensor = ContractionTensor.coordinate(self.indices or [0], dim)
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"Invalid contraction tensor: {exc}", [{"loc": "tensor", "msg": str(exc)}]) from None
        if tensor.dim != dim:
            raise ConfigError(f"tensor has dimension {tensor.dim}, expected {dim}",
                              [{"loc": "tensor", "msg": f"expected dimension {dim}"}])
        return tensor

    def check_for(self, kind: str):
        """Kind-specific requirements that single-field validation cannot see."""
        if kind == "em-rate":
            bad = [N for N in self.resolved_N_list if self.fine_cells % N]
            if bad:
                raise ConfigError(f"N_list entries {bad} do not divide fine_cells = {self.fine_cells}",
                                  [{"loc": "N_list", "msg": "must divide fine_cells"}])
        if kind == "lil":
            level = np.ndim(self.tensor) if self.tensor is not None else len(self.indices or [0])
            if level > LIL_MAX_LEVEL:
                raise ConfigError(f"lil runs support levels up to {LIL_MAX_LEVEL}, got {level}",
                                  [{"loc": "tensor", "msg": f"level must be <= {LIL_MAX_LEVEL}"}])
        if kind == "lil-constant":
            level = np.ndim(self.tensor) if self.tensor is not None else len(self.indices or [0])
            if level > MAX_LEVEL:
                raise ConfigError(f"levels above {MAX_LEVEL} are not supported",
                                  [{"loc": "tensor", "msg": f"level must be <= {MAX_LEVEL}"}])


def _missing(name: str, kind: Optional[str]) -> ConfigError:
    return ConfigError(f"{kind or 'this experiment'} needs a {name}", [{"loc": name, "msg": "field required"}])


def load_config(
    path: Optional[Union[str, Path]],
    kind: str,
    seed: Optional[int] = None,
    replicas: Optional[int] = None,
    threads: Optional[int] = None,
) -> ExperimentConfig:
    """
    Read and validate a config file, applying command-line overrides.

    Raises:
        ConfigError: unreadable file, invalid JSON, failed validation or a
            ``kind`` in the file that contradicts the requested one
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except OSError as exc:
            raise ConfigError(f"Cannot read config {path}: {exc}", [{"loc": "config", "msg": str(exc)}]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Invalid JSON in {path}: {exc}", [{"loc": "config", "msg": str(exc)}]) from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object", [{"loc": "config", "msg": "not an object"}])
    if data.get("kind") not in (None, kind):
        raise ConfigError(f"config is for {data['kind']!r}, not {kind!r}",
                          [{"loc": "kind", "msg": f"expected {kind!r}"}])
    data["kind"] = kind
    for key, value in (("seed", seed), ("replicas", replicas), ("threads", threads)):
        if value is not None:
            data[key] = value
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError.from_validation(exc, str(path) if path else "config") from None
    config.check_for(kind)
    return config
