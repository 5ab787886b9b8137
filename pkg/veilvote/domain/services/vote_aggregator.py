"""
Vote construction and per-agent noise injection.

The secure sum and the argmax release live in
``veilvote.infrastructure.trust_boundary``; this module only builds what a
single agent sends.
"""
from typing import Sequence

import numpy as np

from veilvote.domain.exceptions import ConsistencyError, ParameterError
from veilvote.domain.models.vote import VoteKind, VoteVector


def one_hot(label: int, num_classes: int) -> VoteVector:
    """
    One-hot vote for a class.

    Args:
        label: Class index in [0, C)
        num_classes: C

    Returns:
        VoteVector of kind ONE_HOT
    """
    if num_classes < 2:
        raise ParameterError(f"num_classes must be at least 2, got {num_classes}")
    if not (0 <= label < num_classes):
        raise ParameterError(f"label {label} out of range [0, {num_classes})")
    values = np.zeros(num_classes)
    values[label] = 1.0
    return VoteVector(values, VoteKind.ONE_HOT)


def knn_frequency(neighbor_labels: Sequence[int], k: int, num_classes: int) -> VoteVector:
    """
    Label frequencies among the k nearest neighbors.

    Args:
        neighbor_labels: Exactly k class indices
        k: Neighbor count
        num_classes: C

    Returns:
        VoteVector of kind FREQUENCY with coordinates count / k
    """
    labels = np.asarray(neighbor_labels, dtype=np.int64).reshape(-1)
    if labels.size != k:
        raise ConsistencyError(f"expected {k} neighbor labels, got {labels.size}")
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ParameterError(f"neighbor labels must lie in [0, {num_classes})")
    counts = np.bincount(labels, minlength=num_classes).astype(np.float64)
    return VoteVector(counts / k, VoteKind.FREQUENCY)


def soft_vote(probabilities: Sequence[float]) -> VoteVector:
    """Probability-vector vote of a teacher."""
    return VoteVector(np.asarray(probabilities, dtype=np.float64), VoteKind.SOFT)


def noise_generator(run_seed: int, agent_id: int, query_id: int) -> np.random.Generator:
    """Generator keyed by (run_seed, agent_id, query_id), independent of scheduling order."""
    return np.random.default_rng(np.random.SeedSequence([run_seed, agent_id, query_id]))


def noisy_vote(vote: VoteVector, sigma: float, num_agents: int, rng: np.random.Generator) -> VoteVector:
    """
    Add the agent's share of the Gaussian noise.

    Each coordinate receives N(0, sigma^2 / N) so that the sum over N agents
    carries N(0, sigma^2).

    Args:
        vote: The agent's noiseless vote
        sigma: Total noise scale of the sum
        num_agents: N
        rng: Seeded generator

    Returns:
        VoteVector of kind NOISY
    """
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if num_agents < 1:
        raise ParameterError(f"num_agents must be at least 1, got {num_agents}")
    noise = rng.normal(0.0, sigma / np.sqrt(num_agents), size=vote.num_classes)
    return VoteVector(vote.values + noise, VoteKind.NOISY)


def ordered_sum(votes: Sequence[VoteVector]) -> np.ndarray:
    """
    Coordinate-wise sum of votes in ascending agent order.

    The agents axis is made contiguous so numpy's pairwise summation runs over it.
    """
    if not votes:
        raise ConsistencyError("no votes to sum")
    widths = {vote.num_classes for vote in votes}
    if len(widths) != 1:
        raise ConsistencyError(f"votes disagree on the number of classes: {sorted(widths)}")
    stacked = np.stack([vote.values for vote in votes])
    return np.ascontiguousarray(stacked.T).sum(axis=1)


def noiseless_margin(votes: Sequence[VoteVector]) -> float:
    """
    Gap between the two largest coordinates of the mean vote.

    Args:
        votes: Noiseless votes of all agents

    Returns:
        Margin in [0, 1]
    """
    mean = ordered_sum(votes) / len(votes)
    top_two = np.sort(mean)[-2:]
    return float(np.clip(top_two[1] - top_two[0], 0.0, 1.0))
