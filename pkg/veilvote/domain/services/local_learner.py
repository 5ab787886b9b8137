"""
Desk-scale local learners: multinomial logistic regression, nearest-centroid
and k-nearest-neighbor voting over a feature map.
"""
import math
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from veilvote.domain.exceptions import ConsistencyError, DegenerateModelWarning, ParameterError, UsageError
from veilvote.domain.models.learner import (
    AgentDataset,
    Classifier,
    FeatureMap,
    LearnerConfig,
    LearnerKind,
)
from veilvote.domain.models.vote import VoteVector
from veilvote.domain.services.feature_map import apply_feature_map
from veilvote.domain.services.vote_aggregator import knn_frequency, one_hot, soft_vote
from veilvote.infrastructure.logging import get_logger

logger = get_logger(__name__)


def _augment(features: np.ndarray) -> np.ndarray:
    return np.hstack([features, np.ones((features.shape[0], 1))])


def cross_entropy_loss(weights: np.ndarray, features: np.ndarray, labels: np.ndarray) -> float:
    """
    Mean cross-entropy of a logistic model.

    Args:
        weights: C x (d_in + 1) matrix, bias in the last column
        features: n x d_in matrix
        labels: n class indices

    Returns:
        Mean negative log-likelihood
    """
    log_probs = log_softmax(_augment(features) @ weights.T, axis=1)
    return float(-log_probs[np.arange(labels.size), labels].mean())


def cross_entropy_gradient(weights: np.ndarray, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of cross_entropy_loss with respect to the weights."""
    augmented = _augment(features)
    probabilities = softmax(augmented @ weights.T, axis=1)
    probabilities[np.arange(labels.size), labels] -= 1.0
    return probabilities.T @ augmented / labels.size


def _fit_logistic(data: AgentDataset, config: LearnerConfig) -> np.ndarray:
    weights = np.zeros((data.num_classes, data.input_dim + 1))
    rng = np.random.default_rng(config.seed)
    batch_size = min(config.batch_size, data.size)
    for _ in range(config.epochs):
        order = rng.permutation(data.size)
        for start in range(0, data.size, batch_size):
            batch = order[start:start + batch_size]
            weights -= config.learning_rate * cross_entropy_gradient(
                weights, data.features[batch], data.labels[batch]
            )
    return weights


def _fit_centroids(data: AgentDataset) -> np.ndarray:
    centroids = np.full((data.num_classes, data.input_dim), np.nan)
    for label in np.unique(data.labels):
        centroids[label] = data.features[data.labels == label].mean(axis=0)
    return centroids


def train_classifier(data: AgentDataset, config: Optional[LearnerConfig] = None) -> Classifier:
    """
    Fit a local model.

    Args:
        data: Labeled local data
        config: Learner settings (logistic by default)

    Returns:
        Fitted Classifier
    """
    config = config or LearnerConfig()
    if data.size == 0:
        raise UsageError("cannot train on an empty dataset")

    present = tuple(sorted(data.class_set()))
    degenerate = len(present) == 1
    if degenerate:
        warnings.warn(
            f"training data of domain {data.domain_tag!r} contains the single class {present[0]}",
            DegenerateModelWarning,
            stacklevel=2,
        )

    if config.kind is LearnerKind.LOGISTIC:
        weights = _fit_logistic(data, config)
    else:
        weights = _fit_centroids(data)

    return Classifier(
        kind=config.kind,
        weights=weights,
        num_classes=data.num_classes,
        input_dim=data.input_dim,
        degenerate=degenerate,
        present_classes=present,
    )


def train_student(pseudo_labeled: Sequence[Tuple[np.ndarray, int]], num_classes: int,
                  config: Optional[LearnerConfig] = None) -> Classifier:
    """
    Train the global model on privately labeled public points.

    Args:
        pseudo_labeled: (feature vector, released label) pairs
        num_classes: C
        config: Learner settings

    Returns:
        Fitted Classifier
    """
    if len(pseudo_labeled) == 0:
        raise UsageError("no pseudo-labeled points to train the student on")
    features = np.stack([np.asarray(x, dtype=np.float64) for x, _ in pseudo_labeled])
    labels = np.array([label for _, label in pseudo_labeled], dtype=np.int64)
    return train_classifier(AgentDataset.create(features, labels, num_classes, "public"), config)


def class_scores(model: Classifier, features: np.ndarray) -> np.ndarray:
    """
    Per-class scores; larger is better.

    Nearest-centroid scores are negative squared distances, with classes
    absent from training scored -inf.
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if features.shape[1] != model.input_dim:
        raise ConsistencyError(f"model expects {model.input_dim} features, got {features.shape[1]}")
    if model.kind is LearnerKind.LOGISTIC:
        return _augment(features) @ model.weights.T
    scores = np.full((features.shape[0], model.num_classes), -np.inf)
    for label in model.present_classes:
        difference = features - model.weights[label]
        scores[:, label] = -np.einsum("ij,ij->i", difference, difference)
    return scores


def predict_labels(model: Classifier, features: np.ndarray) -> np.ndarray:
    """Argmax class for every row, lowest index on ties."""
    return np.argmax(class_scores(model, features), axis=1)


def predict(model: Classifier, x: np.ndarray) -> VoteVector:
    """
    One-hot vote of the model's predicted class.

    Args:
        model: Fitted classifier
        x: Feature vector of the model's input dimension

    Returns:
        VoteVector of kind ONE_HOT
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ConsistencyError(f"predict takes one feature vector, got shape {x.shape}")
    return one_hot(int(predict_labels(model, x)[0]), model.num_classes)


def predict_proba_matrix(model: Classifier, features: np.ndarray) -> np.ndarray:
    """Softmax probabilities (logistic) or one-hot rows (nearest-centroid)."""
    if model.kind is LearnerKind.LOGISTIC:
        return softmax(class_scores(model, features), axis=1)
    labels = predict_labels(model, features)
    return np.eye(model.num_classes)[labels]


def predict_proba(model: Classifier, x: np.ndarray) -> VoteVector:
    """Probability-vector vote of the model on one point."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ConsistencyError(f"predict_proba takes one feature vector, got shape {x.shape}")
    return soft_vote(predict_proba_matrix(model, x)[0])


def resolve_k(num_points: int, k: Optional[int] = None, k_fraction: Optional[float] = None) -> int:
    """
    Neighbor count of an agent.

    An explicit k wins; otherwise ceil(k_fraction * n) clamped to [1, n].

    Args:
        num_points: n_i
        k: Explicit neighbor count
        k_fraction: Fraction of the local data size

    Returns:
        k for this agent
    """
    if num_points < 1:
        raise ParameterError("an agent without data cannot vote by nearest neighbors")
    if k is not None:
        if k < 1:
            raise ParameterError(f"k must be at least 1, got {k}")
        return k
    if k_fraction is None or not k_fraction > 0:
        raise ParameterError(f"k_fraction must be positive, got {k_fraction}")
    return int(min(num_points, max(1, math.ceil(k_fraction * num_points))))


def nearest_neighbors(mapped_data: np.ndarray, mapped_query: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k closest rows by Euclidean distance, lower index on ties."""
    distances = np.linalg.norm(mapped_data - mapped_query, axis=1)
    return np.argsort(distances, kind="stable")[:k]


def knn_predict(data: AgentDataset, phi: FeatureMap, x: np.ndarray, k: int) -> VoteVector:
    """
    Frequency vote of the k nearest local points in the phi space.

    Args:
        data: Agent's labeled data
        phi: Feature map
        x: Query vector
        k: Neighbor count, at most n_i

    Returns:
        VoteVector of kind FREQUENCY
    """
    if k > data.size:
        raise ParameterError(f"k={k} exceeds the {data.size} local points of {data.domain_tag!r}")
    mapped_data = apply_feature_map(phi, data.features)
    mapped_query = apply_feature_map(phi, np.asarray(x, dtype=np.float64))[0]
    neighbors = nearest_neighbors(mapped_data, mapped_query, k)
    return knn_frequency(data.labels[neighbors], k, data.num_classes)


def knn_vote_matrix(data: AgentDataset, phi: FeatureMap, queries: np.ndarray, k: int) -> np.ndarray:
    """Frequency votes of one agent for every query row, as a Q x C matrix."""
    if k > data.size:
        raise ParameterError(f"k={k} exceeds the {data.size} local points of {data.domain_tag!r}")
    mapped_data = apply_feature_map(phi, data.features)
    mapped_queries = apply_feature_map(phi, queries)
    votes = np.zeros((mapped_queries.shape[0], data.num_classes))
    for row, mapped_query in enumerate(mapped_queries):
        neighbors = nearest_neighbors(mapped_data, mapped_query, k)
        votes[row] = np.bincount(data.labels[neighbors], minlength=data.num_classes) / k
    return votes
