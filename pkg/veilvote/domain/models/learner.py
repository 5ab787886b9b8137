"""
Domain models for local learners.
"""
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from veilvote.domain.exceptions import ConsistencyError, ParameterError


class LearnerKind(str, Enum):
    """Classifier families available to teachers and students."""
    LOGISTIC = "logistic"
    NEAREST_CENTROID = "nearest_centroid"


class FeatureMapKind(str, Enum):
    """Feature maps for the kNN scheme."""
    IDENTITY = "identity"
    RANDOM_PROJECTION = "random_projection"
    PRECOMPUTED = "precomputed"


@dataclass
class AgentDataset:
    """One agent's local labeled examples."""
    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    domain_tag: str = "server"

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ConsistencyError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ParameterError(f"labels must lie in [0, {self.num_classes})")

    @property
    def size(self) -> int:
        return int(self.labels.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.features.shape[1])

    def class_set(self) -> set:
        return set(int(c) for c in np.unique(self.labels))

    @classmethod
    def create(cls, features, labels, num_classes: int, domain_tag: str = "server") -> 'AgentDataset':
        """
        Create a dataset from array-likes.

        Args:
            features: n x d_in feature rows
            labels: n class indices
            num_classes: Number of classes C
            domain_tag: Name of the generating distribution

        Returns:
            AgentDataset instance
        """
        return cls(features=features, labels=labels, num_classes=num_classes, domain_tag=domain_tag)


@dataclass
class LearnerConfig:
    """Training settings shared by teachers and the student."""
    kind: LearnerKind = LearnerKind.LOGISTIC
    epochs: int = 50
    learning_rate: float = 0.5
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        self.kind = LearnerKind(self.kind)
        if self.epochs < 1:
            raise ParameterError(f"epochs must be at least 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ParameterError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ParameterError(f"batch_size must be at least 1, got {self.batch_size}")

    def with_seed(self, seed: int) -> 'LearnerConfig':
        return LearnerConfig(self.kind, self.epochs, self.learning_rate, self.batch_size, seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LearnerConfig':
        known = {k: data[k] for k in ("kind", "epochs", "learning_rate", "batch_size", "seed") if k in data}
        return cls(**known)


@dataclass
class FeatureMap:
    """
    Deterministic map phi from d_in to d_phi dimensions.

    A precomputed map carries its d_in x d_phi matrix, loaded from a VVFT file.
    """
    kind: FeatureMapKind = FeatureMapKind.IDENTITY
    output_dim: Optional[int] = None
    seed: int = 0
    path: Optional[Path] = None
    matrix: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.kind = FeatureMapKind(self.kind)
        if self.kind is FeatureMapKind.RANDOM_PROJECTION and (self.output_dim is None or self.output_dim < 1):
            raise ParameterError("random projection needs a positive output_dim")
        if self.kind is FeatureMapKind.PRECOMPUTED and self.matrix is None:
            raise ParameterError("precomputed feature map needs a loaded matrix")

    @classmethod
    def identity(cls) -> 'FeatureMap':
        return cls(kind=FeatureMapKind.IDENTITY)

    @classmethod
    def random_projection(cls, output_dim: int, seed: int = 0) -> 'FeatureMap':
        return cls(kind=FeatureMapKind.RANDOM_PROJECTION, output_dim=output_dim, seed=seed)


@dataclass
class Classifier:
    """
    A fitted local model.

    Logistic weights are C x (d_in + 1) with the bias in the last column;
    nearest-centroid weights are the C x d_in class means.
    """
    kind: LearnerKind
    weights: np.ndarray
    num_classes: int
    input_dim: int
    degenerate: bool = False
    present_classes: tuple = ()

    def __post_init__(self):
        self.weights.setflags(write=False)
