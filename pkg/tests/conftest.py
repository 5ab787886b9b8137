"""
Configuration for pytest.
"""
import os

# Must be set before veilvote loads its configuration singleton.
os.environ.setdefault("VEILVOTE_ENV", "test")

import logging
from pathlib import Path

import numpy as np
import pytest

from veilvote.domain.models.federation import FederationSpec
from veilvote.domain.models.learner import AgentDataset, LearnerConfig, LearnerKind
from veilvote.domain.services.data_generator import build_federation
from veilvote.infrastructure.parsers.vvft_parser import write_vvft


@pytest.fixture(autouse=True)
def restore_root_logging():
    """Keep CLI invocations from leaving handlers on closed streams."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def small_spec():
    """A federation small enough for fast end-to-end runs."""
    return FederationSpec(
        num_agents=5,
        num_classes=3,
        input_dim=5,
        separation=6.0,
        samples_per_agent=20,
        public_pool_size=30,
        test_size=60,
        seed=0,
    )


@pytest.fixture
def small_data(small_spec):
    """Federated data built from small_spec."""
    return build_federation(small_spec)


@pytest.fixture
def centroid_learner():
    """Nearest-centroid teachers and student."""
    return LearnerConfig(kind=LearnerKind.NEAREST_CENTROID)


@pytest.fixture
def logistic_learner():
    """Logistic teachers and student with a short schedule."""
    return LearnerConfig(kind=LearnerKind.LOGISTIC, epochs=10, learning_rate=0.5, batch_size=16)


@pytest.fixture
def two_blob_dataset():
    """Two well-separated 2-D classes, 20 points each."""
    rng = np.random.default_rng(7)
    features = np.vstack([
        rng.normal(loc=(-3.0, 0.0), scale=0.5, size=(20, 2)),
        rng.normal(loc=(3.0, 0.0), scale=0.5, size=(20, 2)),
    ])
    labels = np.array([0] * 20 + [1] * 20)
    return AgentDataset.create(features, labels, 2, "agent-0")


@pytest.fixture
def file_backed_files(tmp_path):
    """A VVFT feature file and matching labels CSV with 60 rows of 2 classes."""
    rng = np.random.default_rng(3)
    labels = np.arange(60) % 2
    features = np.where(labels[:, None] == 0, -2.0, 2.0) + rng.normal(scale=0.3, size=(60, 3))
    data_path = write_vvft(tmp_path / "features.vvft", features)
    labels_path = tmp_path / "labels.csv"
    rows = ["index,label"] + [f"{i},{label}" for i, label in enumerate(labels)]
    labels_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return Path(data_path), labels_path, features, labels
