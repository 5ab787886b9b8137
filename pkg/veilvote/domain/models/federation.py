"""
Domain models for a simulated federation.
"""
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from veilvote.domain.exceptions import ConsistencyError, ParameterError
from veilvote.domain.models.learner import AgentDataset


class PartitionKind(str, Enum):
    """How the training pool is split across agents."""
    IID = "iid"
    LABEL_SORTED = "label_sorted"
    DOMAIN_SHIFT = "domain_shift"


class DataSourceKind(str, Enum):
    """Where the federation's data comes from."""
    SYNTHETIC_BLOBS = "synthetic_blobs"
    FILE_BACKED = "file_backed"


@dataclass
class FederationSpec:
    """Data layout of one simulated federation."""
    num_agents: int = 10
    partition: PartitionKind = PartitionKind.IID
    public_pool_size: int = 500
    seed: int = 0
    source: DataSourceKind = DataSourceKind.SYNTHETIC_BLOBS
    num_classes: int = 3
    input_dim: int = 5
    separation: float = 6.0
    within_class_std: float = 1.0
    samples_per_agent: int = 100
    test_size: int = 1000
    classes_per_agent: Optional[int] = None
    domain_shift_scale: float = 1.0
    domain_offsets: Optional[List[List[float]]] = None
    data_path: Optional[Path] = None
    labels_path: Optional[Path] = None

    def __post_init__(self):
        self.partition = PartitionKind(self.partition)
        self.source = DataSourceKind(self.source)
        if self.num_agents < 1:
            raise ParameterError(f"num_agents must be at least 1, got {self.num_agents}")
        if self.public_pool_size < 0:
            raise ParameterError(f"public_pool_size must be non-negative, got {self.public_pool_size}")
        if self.num_classes < 2:
            raise ParameterError(f"num_classes must be at least 2, got {self.num_classes}")
        if self.input_dim < 1:
            raise ParameterError(f"input_dim must be at least 1, got {self.input_dim}")
        if self.samples_per_agent < 1:
            raise ParameterError(f"samples_per_agent must be at least 1, got {self.samples_per_agent}")
        if self.test_size < 0:
            raise ParameterError(f"test_size must be non-negative, got {self.test_size}")
        if not self.within_class_std > 0:
            raise ParameterError("within_class_std must be positive")

        if self.partition is PartitionKind.LABEL_SORTED:
            if self.classes_per_agent is None:
                raise ConsistencyError("label-sorted partition needs classes_per_agent")
            if not (1 <= self.classes_per_agent <= self.num_classes):
                raise ConsistencyError(
                    f"classes_per_agent must lie in [1, {self.num_classes}], got {self.classes_per_agent}"
                )
        if self.domain_offsets is not None:
            offsets = np.asarray(self.domain_offsets, dtype=np.float64)
            if offsets.shape != (self.num_agents, self.input_dim):
                raise ConsistencyError(
                    f"domain_offsets must have shape ({self.num_agents}, {self.input_dim}), got {offsets.shape}"
                )
        if self.source is DataSourceKind.FILE_BACKED and (self.data_path is None or self.labels_path is None):
            raise ConsistencyError("file-backed source needs data_path and labels_path")

    def to_dict(self) -> Dict[str, Any]:
        """
        Echo of the spec for reports.

        Returns:
            JSON-ready dictionary
        """
        return {
            "num_agents": self.num_agents,
            "partition": self.partition.value,
            "public_pool_size": self.public_pool_size,
            "seed": self.seed,
            "source": self.source.value,
            "num_classes": self.num_classes,
            "input_dim": self.input_dim,
            "separation": self.separation,
            "within_class_std": self.within_class_std,
            "samples_per_agent": self.samples_per_agent,
            "test_size": self.test_size,
            "classes_per_agent": self.classes_per_agent,
            "domain_shift_scale": self.domain_shift_scale,
            "domain_offsets": self.domain_offsets,
            "data_path": str(self.data_path) if self.data_path else None,
            "labels_path": str(self.labels_path) if self.labels_path else None,
        }


@dataclass
class FederatedData:
    """
    Everything a run needs.

    ``public_labels`` are the held-out true labels of the public pool; they
    are used for pseudo-label accuracy reporting only.
    """
    agents: List[AgentDataset]
    public_features: np.ndarray
    public_labels: np.ndarray
    test: AgentDataset
    num_classes: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def public_pool_size(self) -> int:
        return int(self.public_features.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.test.features.shape[1])
