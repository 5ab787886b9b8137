"""
Synthetic Gaussian-blob federations and file-backed datasets.
"""
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from veilvote.domain.exceptions import ConfigError, ParameterError
from veilvote.domain.models.federation import DataSourceKind, FederatedData, FederationSpec
from veilvote.domain.models.learner import AgentDataset
from veilvote.domain.services.partitioner import partition
from veilvote.infrastructure.logging import get_logger
from veilvote.infrastructure.parsers.csv_parsers import LabelsCsvParser
from veilvote.infrastructure.parsers.vvft_parser import read_vvft

logger = get_logger(__name__)


def class_means(spec: FederationSpec, rng: np.random.Generator) -> np.ndarray:
    """
    Blob centers with pairwise distance ``separation * within_class_std``.

    Uses scaled coordinate axes when C <= d_in (exact distances), random unit
    directions otherwise.
    """
    radius = spec.separation * spec.within_class_std / np.sqrt(2.0)
    if spec.num_classes <= spec.input_dim:
        return radius * np.eye(spec.num_classes, spec.input_dim)
    directions = rng.normal(size=(spec.num_classes, spec.input_dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return radius * directions


def sample_blobs(means: np.ndarray, count: int, std: float,
                 rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` points with classes cycled evenly and then shuffled."""
    num_classes = means.shape[0]
    labels = rng.permutation(np.arange(count) % num_classes)
    features = means[labels] + std * rng.normal(size=(count, means.shape[1]))
    return features, labels


def generate_synthetic(spec: FederationSpec) -> FederatedData:
    """
    Build agents, the public pool and the test set from Gaussian blobs.

    Public pool and test set come from the unshifted server distribution.

    Args:
        spec: Federation spec with a synthetic source

    Returns:
        FederatedData
    """
    if spec.source is not DataSourceKind.SYNTHETIC_BLOBS:
        raise ParameterError(f"generate_synthetic needs a synthetic source, got {spec.source.value}")
    rng = np.random.default_rng(spec.seed)
    means = class_means(spec, rng)

    train_features, train_labels = sample_blobs(
        means, spec.num_agents * spec.samples_per_agent, spec.within_class_std, rng
    )
    pool_features, pool_labels = sample_blobs(means, spec.public_pool_size, spec.within_class_std, rng)
    test_features, test_labels = sample_blobs(means, spec.test_size, spec.within_class_std, rng)

    pooled = AgentDataset.create(train_features, train_labels, spec.num_classes, "server")
    agents = partition(pooled, spec, rng)

    logger.debug(
        "Synthetic federation generated",
        context={"agents": len(agents), "pool": spec.public_pool_size, "test": spec.test_size},
    )
    return FederatedData(
        agents=agents,
        public_features=pool_features,
        public_labels=pool_labels,
        test=AgentDataset.create(test_features, test_labels, spec.num_classes, "server"),
        num_classes=spec.num_classes,
        metadata={"means": means.tolist()},
    )


def load_file_backed(data_path: Union[str, Path], labels_path: Union[str, Path],
                     spec: Optional[FederationSpec] = None) -> FederatedData:
    """
    Load a VVFT feature matrix plus an `index,label` CSV and split it.

    After a seeded shuffle the first ``test_size`` rows form the test set, the
    next ``public_pool_size`` rows the public pool and the rest is partitioned
    across agents.

    Args:
        data_path: VVFT feature file
        labels_path: Labels CSV
        spec: Federation spec (num_classes, sizes, partition, seed)

    Returns:
        FederatedData
    """
    spec = spec or FederationSpec(source=DataSourceKind.FILE_BACKED, data_path=Path(data_path),
                                  labels_path=Path(labels_path))
    features = read_vvft(data_path)
    labels = LabelsCsvParser().parse(labels_path)
    if features.shape[0] != labels.shape[0]:
        raise ConfigError(f"{data_path} has {features.shape[0]} rows but {labels_path} has {labels.shape[0]} labels")
    if labels.size and labels.max() >= spec.num_classes:
        raise ConfigError(f"{labels_path} contains label {labels.max()} but num_classes is {spec.num_classes}")

    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(labels.size)
    features, labels = features[order], labels[order]

    test_end = spec.test_size
    pool_end = test_end + spec.public_pool_size
    if labels.size - pool_end < spec.num_agents:
        raise ParameterError(
            f"{labels.size} rows leave {labels.size - pool_end} training points for {spec.num_agents} agents"
        )
    pooled = AgentDataset.create(features[pool_end:], labels[pool_end:], spec.num_classes, "server")
    return FederatedData(
        agents=partition(pooled, spec, rng),
        public_features=features[test_end:pool_end],
        public_labels=labels[test_end:pool_end],
        test=AgentDataset.create(features[:test_end], labels[:test_end], spec.num_classes, "server"),
        num_classes=spec.num_classes,
        metadata={"data_path": str(data_path), "labels_path": str(labels_path)},
    )


def build_federation(spec: FederationSpec) -> FederatedData:
    """Dispatch on the spec's data source."""
    if spec.source is DataSourceKind.FILE_BACKED:
        return load_file_backed(spec.data_path, spec.labels_path, spec)
    return generate_synthetic(spec)
