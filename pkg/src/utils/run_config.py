"""
Run configuration: pydantic models, flat key/value files and flag overrides

A config file is a flat JSON object whose keys are the field names of the
four sections below (e.g. {"n_params": 8, "engine": "brute"}). Every key is
also a command-line flag of the same name; flags win over the file, the file
wins over the defaults in src.utils.config.
"""

import json
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.backend.circuit import CircuitSpec
from src.backend.optimizer import QuantumConfig
from src.utils.config import (
    CIRCUIT_CONFIG,
    DATASET_CONFIG,
    EVALUATION_CONFIG,
    OPTIMIZER_CONFIG,
    SIMULATION_CONFIG,
    SUPPRESSION_CONFIG,
)
from src.utils.errors import ConfigError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CircuitSection(_Section):
    n_params: int = Field(8, ge=1)
    data_dim: int = Field(1, ge=1)
    encoding_scale: float = CIRCUIT_CONFIG["encoding_scale"]
    angle_zero: float = CIRCUIT_CONFIG["angle_zero"]
    angle_one: float = CIRCUIT_CONFIG["angle_one"]
    entangler: bool = CIRCUIT_CONFIG["entangler"]

    @model_validator(mode="after")
    def _angles_differ(self):
        if self.angle_zero == self.angle_one:
            raise ValueError("angle_zero and angle_one must differ")
        return self

    def to_spec(self) -> CircuitSpec:
        return CircuitSpec(
            n_params=self.n_params,
            data_dim=self.data_dim,
            encoding_scale=self.encoding_scale,
            angle_zero=self.angle_zero,
            angle_one=self.angle_one,
            entangler=self.entangler,
        )


class OptimizerSection(_Section):
    engine: Literal["quantum", "brute"] = OPTIMIZER_CONFIG["engine"]
    degree: int = Field(OPTIMIZER_CONFIG["degree"], ge=2)
    softness: Optional[float] = Field(OPTIMIZER_CONFIG["softness"], gt=0)
    softness_floor: float = Field(OPTIMIZER_CONFIG["softness_floor"], gt=0)
    softness_fraction: float = Field(OPTIMIZER_CONFIG["softness_fraction"], ge=0)
    budget_factor: float = Field(OPTIMIZER_CONFIG["budget_factor"], gt=0)
    seed: int = OPTIMIZER_CONFIG["seed"]
    eps_s: float = Field(SUPPRESSION_CONFIG["success_floor"], gt=0)
    max_residual: float = Field(SUPPRESSION_CONFIG["max_residual"], gt=0)
    convergence_fraction: float = Field(SUPPRESSION_CONFIG["convergence_fraction"], ge=0)
    normalized_amplitudes: bool = OPTIMIZER_CONFIG["normalized_amplitudes"]
    max_amplitudes: int = Field(SIMULATION_CONFIG["max_amplitudes"], ge=2)

    def to_quantum_config(self) -> QuantumConfig:
        return QuantumConfig(
            degree=self.degree,
            softness=self.softness,
            softness_floor=self.softness_floor,
            softness_fraction=self.softness_fraction,
            budget_factor=self.budget_factor,
            seed=self.seed,
            success_floor=self.eps_s,
            normalized_amplitudes=self.normalized_amplitudes,
            max_residual=self.max_residual,
            convergence_fraction=self.convergence_fraction,
        )


class DatasetSection(_Section):
    source: Literal["threshold_1d", "circle_2d", "file"] = DATASET_CONFIG["source"]
    path: Optional[str] = None
    has_header: bool = False
    rescale: bool = False
    k: int = Field(DATASET_CONFIG["k"], ge=1)
    cutoff: float = Field(DATASET_CONFIG["cutoff"], gt=-1, lt=1)
    radius: float = Field(DATASET_CONFIG["radius"], gt=0, lt=2**0.5)
    data_seed: int = 0
    test_k: int = Field(DATASET_CONFIG["test_k"], ge=0)
    test_path: Optional[str] = None

    @model_validator(mode="after")
    def _file_needs_path(self):
        if self.source == "file" and not self.path:
            raise ValueError("source 'file' requires path")
        return self


class EvaluationSection(_Section):
    threshold_mode: Literal["optimized", "fixed"] = EVALUATION_CONFIG["threshold_mode"]
    threshold: float = Field(EVALUATION_CONFIG["threshold"], ge=0, le=1)
    grid_res: int = Field(EVALUATION_CONFIG["grid_res"], ge=1)


GENERATOR_DIMS = {"threshold_1d": 1, "circle_2d": 2}


class RunConfig(_Section):
    """Everything needed to reproduce a run"""

    circuit: CircuitSection = CircuitSection()
    optimizer: OptimizerSection = OptimizerSection()
    dataset: DatasetSection = DatasetSection()
    evaluation: EvaluationSection = EvaluationSection()

    @model_validator(mode="after")
    def _dimensions_match(self):
        expected = GENERATOR_DIMS.get(self.dataset.source)
        if expected is not None and self.circuit.data_dim != expected:
            raise ValueError(
                f"circuit.data_dim: generator {self.dataset.source} produces D={expected}, config has {self.circuit.data_dim}"
            )
        return self

    def to_flat(self) -> Dict[str, Any]:
        flat: Dict[str, Any] = {}
        for section in SECTIONS:
            flat.update(getattr(self, section).model_dump())
        return flat


SECTIONS = {
    "circuit": CircuitSection,
    "optimizer": OptimizerSection,
    "dataset": DatasetSection,
    "evaluation": EvaluationSection,
}

# flat key -> section name
FIELD_SECTIONS = {name: section for section, model in SECTIONS.items() for name in model.model_fields}


def _problems(error: ValidationError) -> list:
    problems = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        problems.append(f"{path}: {message}" if path else message)
    return problems


def build_run_config(values: Mapping[str, Any]) -> RunConfig:
    """Validate a flat key/value mapping into a RunConfig"""
    unknown = sorted(set(values) - set(FIELD_SECTIONS))
    if unknown:
        raise ConfigError([f"{key}: unknown configuration key" for key in unknown])
    nested: Dict[str, Dict[str, Any]] = {section: {} for section in SECTIONS}
    for key, value in values.items():
        nested[FIELD_SECTIONS[key]][key] = value
    try:
        return RunConfig.model_validate(nested)
    except ValidationError as e:
        raise ConfigError(_problems(e)) from e


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            values = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError([f"cannot read config file {path}: {e}"]) from e
    if not isinstance(values, dict):
        raise ConfigError([f"config file {path} must hold a flat JSON object"])
    return values


def load_run_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Defaults, then the file, then non-None overrides"""
    values: Dict[str, Any] = read_config_file(path) if path else {}
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return build_run_config(values)


def write_config_file(config: RunConfig, path: Union[str, Path]):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config.to_flat(), f, indent=2)
