"""
Commands that launch federation runs.
"""
import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from veilvote.config.config_loader import get_config
from veilvote.domain.models.federation import DataSourceKind, FederationSpec, PartitionKind
from veilvote.domain.models.learner import FeatureMap, FeatureMapKind, LearnerConfig, LearnerKind


def _defaults(section: str) -> dict:
    return get_config().get(section, {})


class FederationSettings(BaseModel):
    """Data layout shared by every scheme of a comparison."""
    model_config = ConfigDict(extra="forbid")

    num_agents: int = Field(10, ge=1)
    partition: PartitionKind = PartitionKind.IID
    public_pool_size: int = Field(500, ge=0)
    source: DataSourceKind = DataSourceKind.SYNTHETIC_BLOBS
    num_classes: int = Field(3, ge=2)
    input_dim: int = Field(5, ge=1)
    separation: float = 6.0
    within_class_std: float = Field(1.0, gt=0)
    samples_per_agent: int = Field(default_factory=lambda: int(_defaults("harness").get("samples_per_agent", 100)), ge=1)
    test_size: int = Field(default_factory=lambda: int(_defaults("harness").get("test_size", 1000)), ge=0)
    classes_per_agent: Optional[int] = None
    domain_shift_scale: float = 1.0
    domain_offsets: Optional[List[List[float]]] = None
    data_path: Optional[Path] = None
    labels_path: Optional[Path] = None

    def to_spec(self, seed: int) -> FederationSpec:
        """
        Build the domain spec for one seed.

        Args:
            seed: Run seed

        Returns:
            FederationSpec
        """
        return FederationSpec(seed=seed, **self.model_dump())


class LearnerSettings(BaseModel):
    """Classifier training settings."""
    model_config = ConfigDict(extra="forbid")

    kind: LearnerKind = Field(default_factory=lambda: LearnerKind(_defaults("learner").get("kind", "logistic")))
    epochs: int = Field(default_factory=lambda: int(_defaults("learner").get("epochs", 50)), ge=1)
    learning_rate: float = Field(default_factory=lambda: float(_defaults("learner").get("learning_rate", 0.5)), gt=0)
    batch_size: int = Field(default_factory=lambda: int(_defaults("learner").get("batch_size", 32)), ge=1)

    def to_config(self, seed: int) -> LearnerConfig:
        return LearnerConfig(kind=self.kind, epochs=self.epochs, learning_rate=self.learning_rate,
                             batch_size=self.batch_size, seed=seed)


class FeatureMapSettings(BaseModel):
    """Feature map of the kNN scheme."""
    model_config = ConfigDict(extra="forbid")

    kind: FeatureMapKind = FeatureMapKind.IDENTITY
    output_dim: Optional[int] = Field(None, ge=1)
    seed: int = 0
    path: Optional[Path] = None

    @model_validator(mode="after")
    def _check_kind(self) -> 'FeatureMapSettings':
        if self.kind is FeatureMapKind.RANDOM_PROJECTION and self.output_dim is None:
            raise ValueError("random_projection needs output_dim")
        if self.kind is FeatureMapKind.PRECOMPUTED and self.path is None:
            raise ValueError("precomputed feature map needs path")
        return self

    def to_feature_map(self) -> FeatureMap:
        if self.kind is FeatureMapKind.PRECOMPUTED:
            from veilvote.domain.services.feature_map import load_feature_map
            return load_feature_map(self.path)
        if self.kind is FeatureMapKind.RANDOM_PROJECTION:
            return FeatureMap.random_projection(self.output_dim, self.seed)
        return FeatureMap.identity()


class _RunCommand(BaseModel):
    model_config = ConfigDict(extra="forbid")

    federation: FederationSettings = Field(default_factory=FederationSettings)
    seed: int = 0
    delta: float = Field(default_factory=lambda: float(_defaults("accounting").get("default_delta", 1e-3)))

    @field_validator("delta")
    @classmethod
    def _delta_in_range(cls, value: float) -> float:
        if not (0.0 < value < 1.0):
            raise ValueError(f"delta out of range (0, 1): {value}")
        return value


class _VotingRunCommand(_RunCommand):
    sigma: float = Field(..., gt=0)
    queries: int = Field(..., ge=0)
    learner: LearnerSettings = Field(default_factory=LearnerSettings)
    data_dependent_bound: Optional[Literal["closed_form", "lemma"]] = None


class RunAeDpflCommand(_VotingRunCommand):
    """Command to run AE-DPFL: teacher voting with one-hot or soft votes."""
    granularity: Literal["agent", "instance"] = "agent"
    vote_mode: Literal["hard", "soft"] = Field(
        default_factory=lambda: _defaults("harness").get("vote_mode", "hard")
    )


class RunKnnDpflCommand(_VotingRunCommand):
    """Command to run kNN-DPFL: nearest-neighbor frequency votes."""
    granularity: Literal["agent", "instance"] = "instance"
    k: Optional[int] = Field(None, ge=1)
    k_fraction: float = Field(default_factory=lambda: float(_defaults("harness").get("k_fraction", 0.05)), gt=0)
    feature_map: FeatureMapSettings = Field(default_factory=FeatureMapSettings)


class _GradientRunCommand(_RunCommand):
    q: float = Field(1.0, gt=0, le=1)
    local_steps: int = Field(1, ge=1)
    eta: float = Field(0.1, gt=0)
    rounds: int = Field(10, ge=1)
    lr_decay: bool = False
    local_batch_size: Optional[int] = Field(None, ge=1)


class RunDpFedAvgCommand(_GradientRunCommand):
    """Command to run DP-FedAvg."""
    sigma: float = Field(..., gt=0)
    clip: float = Field(1.0, gt=0)

    @field_validator("clip")
    @classmethod
    def _finite_clip(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("DP-FedAvg needs a finite clip threshold")
        return value


class RunFedAvgCommand(_GradientRunCommand):
    """Command to run non-private FedAvg."""
