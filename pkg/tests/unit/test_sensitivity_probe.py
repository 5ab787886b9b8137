"""
Tests for the brute-force sensitivity probe.
"""
import math

import numpy as np
import pytest

from veilvote.domain.exceptions import ParameterError
from veilvote.domain.models.learner import AgentDataset
from veilvote.domain.services.sensitivity_probe import ProbeConfig, ProbeScheme, l2_sensitivity_probe

pytestmark = pytest.mark.filterwarnings("ignore::veilvote.domain.exceptions.DegenerateModelWarning")


@pytest.fixture
def tiny_agents():
    """Two agents with four 1-D points each over two classes."""
    return [
        AgentDataset.create([[0.0], [0.5], [3.0], [3.5]], [0, 0, 1, 1], 2, "agent-0"),
        AgentDataset.create([[0.2], [1.0], [2.5], [4.0]], [0, 0, 1, 1], 2, "agent-1"),
    ]


@pytest.fixture
def tiny_queries():
    return np.array([[0.3], [1.8], [3.2]])


class TestSensitivityProbe:
    """Test cases for l2_sensitivity_probe."""

    def test_ae_agent_level(self, tiny_agents, tiny_queries):
        value = l2_sensitivity_probe(ProbeScheme.AE_AGENT, ProbeConfig(tiny_agents, tiny_queries))
        assert value == pytest.approx(1.0)

    def test_ae_instance_level(self, tiny_agents, tiny_queries):
        value = l2_sensitivity_probe(ProbeScheme.AE_INSTANCE, ProbeConfig(tiny_agents, tiny_queries))
        assert value <= math.sqrt(2.0) + 1e-12

    def test_knn_agent_level(self, tiny_agents, tiny_queries):
        value = l2_sensitivity_probe(ProbeScheme.KNN_AGENT, ProbeConfig(tiny_agents, tiny_queries, k=2))
        assert 0.0 < value <= 1.0 + 1e-12

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_knn_instance_level(self, tiny_agents, tiny_queries, k):
        value = l2_sensitivity_probe(ProbeScheme.KNN_INSTANCE, ProbeConfig(tiny_agents, tiny_queries, k=k))
        assert value <= math.sqrt(2.0) / k + 1e-12

    def test_knn_instance_level_is_attained(self, tiny_agents, tiny_queries):
        """Adding a point with the other label next to a query swaps one neighbor."""
        value = l2_sensitivity_probe(ProbeScheme.KNN_INSTANCE, ProbeConfig(tiny_agents, tiny_queries, k=2))
        assert value == pytest.approx(math.sqrt(2.0) / 2)

    def test_k_exceeds_local_data(self, tiny_agents, tiny_queries):
        with pytest.raises(ParameterError):
            l2_sensitivity_probe(ProbeScheme.KNN_AGENT, ProbeConfig(tiny_agents, tiny_queries, k=5))

    def test_too_many_agents(self, tiny_agents, tiny_queries):
        with pytest.raises(ParameterError):
            ProbeConfig(tiny_agents * 3, tiny_queries)

    def test_too_many_points(self, tiny_queries):
        big = AgentDataset.create(np.zeros((21, 1)), [0] * 21, 2)
        with pytest.raises(ParameterError):
            ProbeConfig([big], tiny_queries)
