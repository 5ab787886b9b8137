"""
Splitting a labeled pool across agents.
"""
from typing import List

import numpy as np

from veilvote.domain.exceptions import ParameterError
from veilvote.domain.models.federation import FederationSpec, PartitionKind
from veilvote.domain.models.learner import AgentDataset


def agent_classes(agent_id: int, classes_per_agent: int, num_classes: int) -> List[int]:
    """Classes held by an agent under the label-sorted split: {(i + j) mod C : j < m}."""
    return [(agent_id + j) % num_classes for j in range(classes_per_agent)]


def _shard(data: AgentDataset, indices: np.ndarray, tag: str) -> AgentDataset:
    return AgentDataset(data.features[indices], data.labels[indices], data.num_classes, tag)


def _iid(data: AgentDataset, num_agents: int, rng: np.random.Generator) -> List[np.ndarray]:
    return np.array_split(rng.permutation(data.size), num_agents)


def _label_sorted(data: AgentDataset, spec: FederationSpec, rng: np.random.Generator) -> List[np.ndarray]:
    holders = {c: [] for c in range(data.num_classes)}
    for agent_id in range(spec.num_agents):
        for c in agent_classes(agent_id, spec.classes_per_agent, data.num_classes):
            holders[c].append(agent_id)

    shards: List[List[np.ndarray]] = [[] for _ in range(spec.num_agents)]
    for c, agent_ids in holders.items():
        if not agent_ids:
            continue
        members = rng.permutation(np.flatnonzero(data.labels == c))
        for agent_id, piece in zip(agent_ids, np.array_split(members, len(agent_ids))):
            shards[agent_id].append(piece)
    return [np.sort(np.concatenate(pieces)) if pieces else np.array([], dtype=np.int64) for pieces in shards]


def domain_offsets(spec: FederationSpec, rng: np.random.Generator) -> np.ndarray:
    """Per-agent mean offsets: explicit ones from the spec or N(0, scale^2) draws."""
    if spec.domain_offsets is not None:
        return np.asarray(spec.domain_offsets, dtype=np.float64)
    return spec.domain_shift_scale * rng.normal(size=(spec.num_agents, spec.input_dim))


def partition(data: AgentDataset, spec: FederationSpec, rng: np.random.Generator) -> List[AgentDataset]:
    """
    Split a pooled dataset across ``spec.num_agents`` agents.

    IID shards are a random equal split (sizes differ by at most one).
    Label-sorted agent i holds classes (i + j) mod C for j < classes_per_agent,
    each class's points shared evenly among its holders. Domain shift is the
    IID split with a per-agent mean offset added to the features.

    Args:
        data: Pooled labeled data
        spec: Federation spec
        rng: Seeded generator

    Returns:
        One AgentDataset per agent, in agent-id order
    """
    if spec.num_agents > data.size:
        raise ParameterError(f"{spec.num_agents} agents exceed the {data.size} available points")

    if spec.partition is PartitionKind.LABEL_SORTED:
        index_shards = _label_sorted(data, spec, rng)
    else:
        index_shards = _iid(data, spec.num_agents, rng)

    agents = [_shard(data, indices, f"agent-{i}") for i, indices in enumerate(index_shards)]
    empty = [i for i, agent in enumerate(agents) if agent.size == 0]
    if empty:
        raise ParameterError(f"agents {empty} received no data; add points or lower num_agents")

    if spec.partition is PartitionKind.DOMAIN_SHIFT:
        offsets = domain_offsets(spec, rng)
        if offsets.shape[1] != data.input_dim:
            raise ParameterError(f"domain offsets have {offsets.shape[1]} dimensions, data has {data.input_dim}")
        agents = [
            AgentDataset(agent.features + offsets[i], agent.labels, agent.num_classes, f"shifted-{i}")
            for i, agent in enumerate(agents)
        ]
    return agents
