"""
FedAvg and DP-FedAvg.

Agents expose ``local_delta(theta, steps, eta, rng)``; the server samples
agents, clips and noises their deltas when DP is enabled, and averages in
agent-id order.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Protocol, Sequence

import numpy as np

from veilvote.domain.exceptions import ParameterError, UsageError
from veilvote.domain.models.fedavg import FedAvgConfig, ModelUpdate
from veilvote.domain.models.learner import AgentDataset
from veilvote.domain.services.local_learner import cross_entropy_gradient
from veilvote.infrastructure.logging import get_logger

logger = get_logger(__name__)

_SAMPLING_STREAM = 0
_AGENT_STREAM = 1


class FederatedAgent(Protocol):
    """Anything that can run E local steps from the global parameters."""

    def local_delta(self, theta: np.ndarray, steps: int, eta: float,
                    rng: np.random.Generator) -> np.ndarray:
        ...


class LogisticAgent:
    """
    Multinomial logistic regression over one agent's data.

    Parameters are the flattened C x (d_in + 1) weight matrix. Full-batch
    gradient descent by default, minibatch SGD when ``batch_size`` is set.
    """

    def __init__(self, data: AgentDataset, batch_size: Optional[int] = None):
        self.data = data
        self.batch_size = batch_size
        self.shape = (data.num_classes, data.input_dim + 1)

    @property
    def dim(self) -> int:
        return self.shape[0] * self.shape[1]

    def local_delta(self, theta: np.ndarray, steps: int, eta: float,
                    rng: np.random.Generator) -> np.ndarray:
        weights = theta.reshape(self.shape).copy()
        for _ in range(steps):
            if self.batch_size is None or self.batch_size >= self.data.size:
                features, labels = self.data.features, self.data.labels
            else:
                batch = rng.choice(self.data.size, size=self.batch_size, replace=False)
                features, labels = self.data.features[batch], self.data.labels[batch]
            weights -= eta * cross_entropy_gradient(weights, features, labels)
        return weights.reshape(-1) - theta


class FixedDeltaAgent:
    """Agent whose local update is a constant vector."""

    def __init__(self, delta: Sequence[float]):
        self.delta = np.asarray(delta, dtype=np.float64)

    def local_delta(self, theta: np.ndarray, steps: int, eta: float,
                    rng: np.random.Generator) -> np.ndarray:
        return self.delta.copy()


def clip_update(delta: np.ndarray, clip: float) -> ModelUpdate:
    """
    Project a delta onto the L2 ball of radius ``clip``.

    Args:
        delta: Parameter delta
        clip: Threshold S (may be infinite)

    Returns:
        ModelUpdate; ``clipped`` is True whenever a finite threshold was applied
    """
    if not clip > 0:
        raise ParameterError(f"clip threshold must be positive, got {clip}")
    delta = np.asarray(delta, dtype=np.float64)
    norm = float(np.linalg.norm(delta))
    if math.isinf(clip):
        return ModelUpdate(delta=delta.copy(), clipped=False, pre_clip_norm=norm)
    return ModelUpdate(delta=delta / max(1.0, norm / clip), clipped=True, pre_clip_norm=norm)


def noisy_update(agent: FederatedAgent, theta: np.ndarray, config: FedAvgConfig, sampled: int,
                 rng: np.random.Generator, round_index: int = 0) -> ModelUpdate:
    """
    Local training, clipping and Gaussian noise of one sampled agent.

    Args:
        agent: The agent
        theta: Global parameters
        config: FedAvg settings
        sampled: m_t, number of agents sampled this round
        rng: Generator for local minibatches and noise
        round_index: Round number (for the learning-rate schedule)

    Returns:
        ModelUpdate whose delta carries N(0, sigma^2 S^2 / m_t) per coordinate
    """
    if sampled < 1:
        raise UsageError("at least one agent must be sampled")
    raw = agent.local_delta(theta, config.local_steps, config.learning_rate(round_index), rng)
    update = clip_update(raw, config.clip)
    if config.sigma > 0:
        if math.isinf(config.clip):
            raise ParameterError("noisy updates need a finite clip threshold")
        scale = config.sigma * config.clip / math.sqrt(sampled)
        update.delta = update.delta + rng.normal(0.0, scale, size=update.delta.shape)
    return update


def sample_agents(num_agents: int, q: float, seed: int, round_index: int) -> np.ndarray:
    """
    Poisson-sample agent ids for a round, resampling until one is chosen.

    Returns:
        Sorted array of sampled agent ids
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, round_index, _SAMPLING_STREAM]))
    while True:
        chosen = np.flatnonzero(rng.random(num_agents) < q)
        if chosen.size:
            return chosen


def agent_generator(seed: int, round_index: int, agent_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, round_index, agent_id, _AGENT_STREAM]))


def fedavg_round(theta: np.ndarray, agents: Sequence[FederatedAgent], config: FedAvgConfig,
                 round_index: int, dp_enabled: bool, max_workers: int = 1) -> np.ndarray:
    """
    One outer round of FedAvg or DP-FedAvg.

    Args:
        theta: Global parameters
        agents: All agents, indexed by agent id
        config: FedAvg settings
        round_index: Round number t
        dp_enabled: Clip and noise updates when True
        max_workers: Threads for local training

    Returns:
        theta + (1 / m_t) * sum of the sampled agents' updates
    """
    chosen = sample_agents(len(agents), config.q, config.seed, round_index)
    sampled = int(chosen.size)

    def local(agent_id: int) -> np.ndarray:
        rng = agent_generator(config.seed, round_index, int(agent_id))
        if dp_enabled:
            return noisy_update(agents[agent_id], theta, config, sampled, rng, round_index).delta
        return agents[agent_id].local_delta(theta, config.local_steps, config.learning_rate(round_index), rng)

    if max_workers > 1 and sampled > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            updates: List[np.ndarray] = list(pool.map(local, chosen))
    else:
        updates = [local(agent_id) for agent_id in chosen]

    total = np.ascontiguousarray(np.stack(updates).T).sum(axis=1)
    return theta + total / sampled
