"""
Brute-force sensitivity measurement of the noiseless vote sum.

Enumerates every adjacent dataset of a tiny federation and reports the
largest L2 change of the summed votes on a fixed query set.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, List, Optional

import numpy as np

from veilvote.domain.exceptions import ParameterError
from veilvote.domain.models.learner import AgentDataset, FeatureMap, LearnerConfig, LearnerKind
from veilvote.domain.services.local_learner import knn_vote_matrix, predict_labels, train_classifier

MAX_PROBE_AGENTS = 5
MAX_PROBE_POINTS = 20
MAX_PROBE_CLASSES = 4


class ProbeScheme(str, Enum):
    """Scheme and adjacency notion being probed."""
    AE_AGENT = "AE_agent"
    AE_INSTANCE = "AE_instance"
    KNN_AGENT = "KNN_agent"
    KNN_INSTANCE = "KNN_instance"


@dataclass
class ProbeConfig:
    """
    A tiny federation to enumerate.

    ``candidates`` are the points tried as single-instance additions; each is
    added once with every class label.
    """
    agents: List[AgentDataset]
    queries: np.ndarray
    k: int = 1
    phi: FeatureMap = field(default_factory=FeatureMap.identity)
    learner: LearnerConfig = field(default_factory=lambda: LearnerConfig(kind=LearnerKind.NEAREST_CENTROID))
    candidates: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (1 <= len(self.agents) <= MAX_PROBE_AGENTS):
            raise ParameterError(f"probe supports 1..{MAX_PROBE_AGENTS} agents")
        if any(agent.size > MAX_PROBE_POINTS for agent in self.agents):
            raise ParameterError(f"probe supports at most {MAX_PROBE_POINTS} points per agent")
        if any(agent.num_classes > MAX_PROBE_CLASSES for agent in self.agents):
            raise ParameterError(f"probe supports at most {MAX_PROBE_CLASSES} classes")
        self.queries = np.atleast_2d(np.asarray(self.queries, dtype=np.float64))
        if self.candidates is None:
            self.candidates = self.queries
        self.candidates = np.atleast_2d(np.asarray(self.candidates, dtype=np.float64))

    @property
    def num_classes(self) -> int:
        return self.agents[0].num_classes


def _without(agent: AgentDataset, index: int) -> AgentDataset:
    keep = np.arange(agent.size) != index
    return AgentDataset(agent.features[keep], agent.labels[keep], agent.num_classes, agent.domain_tag)


def _with(agent: AgentDataset, point: np.ndarray, label: int) -> AgentDataset:
    return AgentDataset(
        np.vstack([agent.features, point]),
        np.append(agent.labels, label),
        agent.num_classes,
        agent.domain_tag,
    )


def _neighbors(agent: AgentDataset, config: ProbeConfig) -> Iterator[AgentDataset]:
    for index in range(agent.size):
        if agent.size > 1:
            yield _without(agent, index)
    for point in config.candidates:
        for label in range(agent.num_classes):
            yield _with(agent, point, label)


def _vote_function(scheme: ProbeScheme, config: ProbeConfig) -> Callable[[AgentDataset], Optional[np.ndarray]]:
    if scheme in (ProbeScheme.AE_AGENT, ProbeScheme.AE_INSTANCE):
        def ae_votes(agent: AgentDataset) -> Optional[np.ndarray]:
            model = train_classifier(agent, config.learner)
            return np.eye(agent.num_classes)[predict_labels(model, config.queries)]
        return ae_votes

    def knn_votes(agent: AgentDataset) -> Optional[np.ndarray]:
        if agent.size < config.k:
            return None
        return knn_vote_matrix(agent, config.phi, config.queries, config.k)
    return knn_votes


def l2_sensitivity_probe(scheme: ProbeScheme, config: ProbeConfig) -> float:
    """
    Largest L2 change of the summed votes over all adjacent datasets.

    Agent-level schemes remove each agent in turn. Instance-level schemes
    remove each local point and add each candidate point with each label,
    retraining (or re-querying) only the touched agent.

    Args:
        scheme: Scheme and adjacency notion
        config: Tiny federation

    Returns:
        Maximum over queries and adjacent datasets of the L2 change
    """
    scheme = ProbeScheme(scheme)
    vote_of = _vote_function(scheme, config)
    base_votes = [vote_of(agent) for agent in config.agents]
    if any(votes is None for votes in base_votes):
        raise ParameterError(f"k={config.k} exceeds the local data of some agent")

    worst = 0.0
    if scheme in (ProbeScheme.AE_AGENT, ProbeScheme.KNN_AGENT):
        for votes in base_votes:
            worst = max(worst, float(np.linalg.norm(votes, axis=1).max()))
        return worst

    for agent, votes in zip(config.agents, base_votes):
        for neighbor in _neighbors(agent, config):
            neighbor_votes = vote_of(neighbor)
            if neighbor_votes is None:
                continue
            worst = max(worst, float(np.linalg.norm(neighbor_votes - votes, axis=1).max()))
    return worst
