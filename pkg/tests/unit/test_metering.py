"""
Tests for upstream communication metering.
"""
import pytest

from veilvote.domain.exceptions import ParameterError
from veilvote.domain.models.privacy import Scheme
from veilvote.domain.services.metering import comm_cost, expected_comm_cost


class TestCommCost:
    """Test cases for comm_cost and expected_comm_cost."""

    def test_voting_schemes(self):
        assert comm_cost(Scheme.AE, num_classes=10, queries=500) == 5000
        assert comm_cost(Scheme.KNN, num_classes=10, queries=500, model_dim=99, rounds=99) == 5000

    def test_gradient_schemes(self):
        assert comm_cost(Scheme.DPFEDAVG, model_dim=100_000, rounds=100) == 10 ** 7
        assert comm_cost(Scheme.FEDAVG, model_dim=100_000, rounds=100, num_classes=10, queries=5) == 10 ** 7

    def test_zero_queries(self):
        assert comm_cost(Scheme.AE, num_classes=10, queries=0) == 0

    def test_accepts_scheme_values(self):
        assert comm_cost("AE", num_classes=3, queries=4) == 12

    def test_expected_cost_scales_with_participation(self):
        assert expected_comm_cost(Scheme.DPFEDAVG, model_dim=1000, rounds=10, q=0.1) == pytest.approx(1000.0)
        assert expected_comm_cost(Scheme.AE, num_classes=10, queries=5, q=0.1) == pytest.approx(50.0)

    def test_rejects_negative_inputs(self):
        with pytest.raises(ParameterError):
            comm_cost(Scheme.AE, num_classes=-1, queries=5)
