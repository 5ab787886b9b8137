"""
Run-config schema for the command line.

A run config is a YAML document naming one scheme block; a compare config
lists several blocks that share seeds and federation data.
"""
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from veilvote.application.commands.run_commands import (
    FederationSettings,
    RunAeDpflCommand,
    RunDpFedAvgCommand,
    RunFedAvgCommand,
    RunKnnDpflCommand,
)
from veilvote.config.config_loader import get_config
from veilvote.domain.exceptions import ConfigError
from veilvote.infrastructure.parsers.yaml_parser import YamlParser

SchemeName = Literal["AE", "KNN", "DPFedAvg", "FedAvg"]

COMMAND_TYPES = {
    "AE": RunAeDpflCommand,
    "KNN": RunKnnDpflCommand,
    "DPFedAvg": RunDpFedAvgCommand,
    "FedAvg": RunFedAvgCommand,
}

RunCommand = Union[RunAeDpflCommand, RunKnnDpflCommand, RunDpFedAvgCommand, RunFedAvgCommand]


def _default_delta() -> float:
    return float(get_config().get("accounting", {}).get("default_delta", 1e-3))


def _check_delta(value: float) -> float:
    if not (0.0 < value < 1.0):
        raise ValueError(f"delta out of range (0, 1): {value}")
    return value


def _normalize_scheme(value: Any) -> Any:
    if isinstance(value, str):
        for name in COMMAND_TYPES:
            if value.strip().lower().replace("-", "").replace("_", "") == name.lower():
                return name
    return value


RESERVED_PARAMS = ("federation", "seed", "delta")


def _check_params(params: Dict[str, Any]) -> Dict[str, Any]:
    reserved = sorted(key for key in params if key in RESERVED_PARAMS)
    if reserved:
        raise ValueError(f"params may not set {', '.join(reserved)}; use the top-level config keys")
    return params


class SchemeBlock(BaseModel):
    """One scheme with its parameters (sigma, queries, k, FedAvg fields, ...)."""
    model_config = ConfigDict(extra="forbid")

    scheme: SchemeName
    params: Dict[str, Any] = Field(default_factory=dict)
    federation: Optional[FederationSettings] = None

    @field_validator("scheme", mode="before")
    @classmethod
    def _scheme_name(cls, value: Any) -> Any:
        return _normalize_scheme(value)

    @field_validator("params")
    @classmethod
    def _no_reserved_params(cls, value: Dict[str, Any]) -> Dict[str, Any]:
        return _check_params(value)

    def build_command(self, federation: FederationSettings, seed: int, delta: float) -> RunCommand:
        """
        Validated command for one seed.

        Args:
            federation: Federation shared by the config
            seed: Run seed (config seed plus repeat index)
            delta: Target delta

        Returns:
            The scheme's run command
        """
        command_type = COMMAND_TYPES[self.scheme]
        return command_type(federation=self.federation or federation, seed=seed, delta=delta, **self.params)


def _referenced_paths(federation: FederationSettings, blocks: List[SchemeBlock]) -> List[Path]:
    paths = [federation.data_path, federation.labels_path]
    for block in blocks:
        if block.federation is not None:
            paths += [block.federation.data_path, block.federation.labels_path]
        feature_map = block.params.get("feature_map") or {}
        if isinstance(feature_map, dict) and feature_map.get("path"):
            paths.append(Path(feature_map["path"]))
    return [Path(path) for path in paths if path is not None]


def _check_files(paths: List[Path]) -> None:
    for path in paths:
        if not path.exists():
            raise ConfigError(f"referenced file does not exist: {path}")


class RunConfig(BaseModel):
    """A single-scheme run repeated over derived seeds."""
    model_config = ConfigDict(extra="forbid")

    scheme: SchemeName
    params: Dict[str, Any] = Field(default_factory=dict)
    federation: FederationSettings = Field(default_factory=FederationSettings)
    delta: float = Field(default_factory=_default_delta)
    seed: int = 0
    repeats: int = Field(1, ge=1)
    output: Path = Path("results/runs.jsonl")

    @field_validator("scheme", mode="before")
    @classmethod
    def _scheme_name(cls, value: Any) -> Any:
        return _normalize_scheme(value)

    @field_validator("params")
    @classmethod
    def _no_reserved_params(cls, value: Dict[str, Any]) -> Dict[str, Any]:
        return _check_params(value)

    @field_validator("delta")
    @classmethod
    def _delta_in_range(cls, value: float) -> float:
        return _check_delta(value)

    @property
    def block(self) -> SchemeBlock:
        return SchemeBlock(scheme=self.scheme, params=self.params)

    def seeds(self) -> List[int]:
        """Seeds of the repeats: seed + repeat index."""
        return [self.seed + index for index in range(self.repeats)]

    def commands(self) -> List[RunCommand]:
        return [self.block.build_command(self.federation, seed, self.delta) for seed in self.seeds()]


class CompareConfig(BaseModel):
    """Several scheme blocks evaluated on the same seeds and federation."""
    model_config = ConfigDict(extra="forbid")

    schemes: List[SchemeBlock]
    federation: FederationSettings = Field(default_factory=FederationSettings)
    delta: float = Field(default_factory=_default_delta)
    seed: int = 0
    repeats: int = Field(1, ge=1)
    output: Path = Path("results/compare.csv")
    reports_output: Optional[Path] = None

    @field_validator("delta")
    @classmethod
    def _delta_in_range(cls, value: float) -> float:
        return _check_delta(value)

    @model_validator(mode="after")
    def _shared_federation(self) -> 'CompareConfig':
        if len(self.schemes) < 2:
            raise ValueError(f"a comparison needs at least two scheme blocks, got {len(self.schemes)}")
        overrides = [block.federation for block in self.schemes if block.federation is not None]
        if any(federation != overrides[0] for federation in overrides[1:]):
            raise ValueError("scheme blocks use different federation specs; comparisons must share data")
        if overrides and overrides[0] != self.federation and "federation" in self.model_fields_set:
            raise ValueError("scheme blocks override the top-level federation spec; comparisons must share data")
        if overrides and "federation" not in self.model_fields_set:
            self.federation = overrides[0]
        return self

    def seeds(self) -> List[int]:
        return [self.seed + index for index in range(self.repeats)]

    def commands(self) -> List[RunCommand]:
        """Commands in output order: every seed of the first block, then the next block."""
        return [
            block.build_command(self.federation, seed, self.delta)
            for block in self.schemes
            for seed in self.seeds()
        ]


def _load(path: Union[str, Path], model: type) -> BaseModel:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    config = model.model_validate(YamlParser().parse(path))
    blocks = config.schemes if isinstance(config, CompareConfig) else [config.block]
    _check_files(_referenced_paths(config.federation, blocks))
    # Every command must validate before the first run starts.
    for command in config.commands():
        command.federation.to_spec(command.seed)
    return config


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Load and validate a run config; raises ConfigError or pydantic ValidationError."""
    return _load(path, RunConfig)


def load_compare_config(path: Union[str, Path]) -> CompareConfig:
    """Load and validate a compare config; raises ConfigError or pydantic ValidationError."""
    return _load(path, CompareConfig)
