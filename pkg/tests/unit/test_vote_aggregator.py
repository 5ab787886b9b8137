"""
Tests for vote construction and the secure aggregation boundary.
"""
import dataclasses
from pathlib import Path

import numpy as np
import pytest

import veilvote
from veilvote.domain.exceptions import ConsistencyError, ParameterError
from veilvote.domain.models.privacy import MechanismParams, Scheme
from veilvote.domain.models.vote import SecureAggregate, VoteKind, VoteVector
from veilvote.domain.services import privacy_accountant
from veilvote.domain.services.vote_aggregator import (
    knn_frequency,
    noise_generator,
    noiseless_margin,
    noisy_vote,
    one_hot,
    ordered_sum,
    soft_vote,
)
from veilvote.infrastructure import trust_boundary
from veilvote.infrastructure.trust_boundary import AccountantHook, MarginLedger, SecureAggregator, mpc_argmax


class TestVoteVector:
    """Test cases for VoteVector invariants."""

    def test_one_hot(self):
        vote = one_hot(2, 3)
        assert vote.kind is VoteKind.ONE_HOT
        assert vote.values.tolist() == [0.0, 0.0, 1.0]
        assert vote.argmax() == 2

    def test_one_hot_out_of_range(self):
        with pytest.raises(ParameterError):
            one_hot(3, 3)

    def test_invalid_one_hot_rejected(self):
        with pytest.raises(ParameterError):
            VoteVector(np.array([1.0, 1.0, 0.0]), VoteKind.ONE_HOT)

    def test_frequency_must_sum_to_one(self):
        with pytest.raises(ParameterError):
            VoteVector(np.array([0.5, 0.2]), VoteKind.FREQUENCY)

    def test_values_are_read_only(self):
        vote = one_hot(0, 2)
        with pytest.raises(ValueError):
            vote.values[0] = 5.0

    def test_knn_frequency(self):
        vote = knn_frequency([0, 0, 1], 3, 3)
        assert vote.kind is VoteKind.FREQUENCY
        assert vote.values == pytest.approx([2 / 3, 1 / 3, 0.0])

    def test_knn_frequency_length_mismatch(self):
        with pytest.raises(ConsistencyError):
            knn_frequency([0, 1], 3, 3)

    def test_soft_vote(self):
        vote = soft_vote([0.2, 0.3, 0.5])
        assert vote.kind is VoteKind.SOFT
        assert vote.argmax() == 2

    def test_argmax_ties_pick_lowest(self):
        assert VoteVector(np.array([0.5, 0.5]), VoteKind.SOFT).argmax() == 0


class TestAggregation:
    """Test cases for sums, margins and noise."""

    def test_ordered_sum(self):
        votes = [one_hot(0, 3), one_hot(2, 3), one_hot(2, 3)]
        assert ordered_sum(votes).tolist() == [1.0, 0.0, 2.0]

    def test_ordered_sum_rejects_mixed_widths(self):
        with pytest.raises(ConsistencyError):
            ordered_sum([one_hot(0, 2), one_hot(0, 3)])

    def test_ordered_sum_rejects_empty(self):
        with pytest.raises(ConsistencyError):
            ordered_sum([])

    def test_noiseless_margin(self):
        votes = [one_hot(2, 3), one_hot(2, 3), one_hot(0, 3)]
        assert noiseless_margin(votes) == pytest.approx(1 / 3)

    def test_unanimous_margin_is_one(self):
        assert noiseless_margin([one_hot(1, 4)] * 5) == pytest.approx(1.0)

    def test_noise_generator_is_keyed(self):
        first = noise_generator(7, 3, 11).normal(size=4)
        again = noise_generator(7, 3, 11).normal(size=4)
        other = noise_generator(7, 4, 11).normal(size=4)
        assert np.array_equal(first, again)
        assert not np.array_equal(first, other)

    def test_noisy_vote_rejects_zero_sigma(self):
        with pytest.raises(ParameterError):
            noisy_vote(one_hot(0, 2), 0.0, 3, noise_generator(0, 0, 0))

    def test_summed_noise_has_sigma(self):
        """N agents each add N(0, sigma^2 / N); the sum carries N(0, sigma^2)."""
        sigma, num_agents = 2.0, 4
        votes = [one_hot(0, 3)] * num_agents
        deviations = []
        for query_id in range(2000):
            noisy = [
                noisy_vote(vote, sigma, num_agents, noise_generator(1, agent_id, query_id))
                for agent_id, vote in enumerate(votes)
            ]
            deviations.append(ordered_sum(noisy) - ordered_sum(votes))
        deviations = np.concatenate(deviations)
        assert abs(deviations.mean()) < 0.1
        assert deviations.std() == pytest.approx(sigma, rel=0.05)


class TestTrustBoundary:
    """Test cases for the secure aggregator, ledger and accountant hook."""

    def test_mpc_argmax_releases_noisy_argmax(self):
        noiseless = [one_hot(0, 2), one_hot(0, 2)]
        noisy = [VoteVector(np.array([0.1, 0.9]), VoteKind.NOISY), VoteVector(np.array([0.2, 0.3]), VoteKind.NOISY)]
        aggregate = mpc_argmax(noisy, noiseless, query_id=4)
        assert aggregate.released_label == 1
        assert aggregate.query_id == 4

    def test_mpc_argmax_rejects_count_mismatch(self):
        with pytest.raises(ConsistencyError):
            mpc_argmax([one_hot(0, 2)], [one_hot(0, 2), one_hot(1, 2)], query_id=0)

    def test_margin_stays_out_of_repr(self):
        aggregate = SecureAggregate(released_label=1, query_id=0, _noiseless_margin=0.75)
        assert "0.75" not in repr(aggregate)

    def test_aggregator_returns_only_the_label(self):
        aggregator = SecureAggregator(sigma=1.0, run_seed=0)
        label = aggregator.aggregate_query([one_hot(1, 3)] * 10, query_id=0)
        assert isinstance(label, int)
        assert aggregator.answered == 1
        assert len(aggregator.ledger) == 1

    def test_deterministic_per_seed(self):
        votes = [one_hot(i % 3, 3) for i in range(6)]
        first = [SecureAggregator(3.0, run_seed=5).aggregate_query(votes, q) for q in range(20)]
        second = [SecureAggregator(3.0, run_seed=5).aggregate_query(votes, q) for q in range(20)]
        assert first == second

    def test_match_rate_meets_bound(self):
        """Unanimous votes with N gamma / sigma = 8 almost always release the consensus label."""
        num_agents, sigma, num_classes = 50, 6.25, 10
        bound = privacy_accountant.match_probability_bound(num_agents, sigma, 1.0, num_classes)
        aggregator = SecureAggregator(sigma=sigma, run_seed=11)
        votes = [one_hot(3, num_classes)] * num_agents
        released = [aggregator.aggregate_query(votes, q) for q in range(200)]
        match_rate = np.mean(np.array(released) == 3)
        assert match_rate >= bound - 0.01

    def test_ledger_records_margins(self):
        ledger = MarginLedger()
        aggregator = SecureAggregator(sigma=1.0, run_seed=0, ledger=ledger)
        aggregator.aggregate_query([one_hot(0, 2), one_hot(0, 2), one_hot(1, 2), one_hot(0, 2)], query_id=0)
        aggregator.aggregate_query([one_hot(1, 2)] * 4, query_id=1)
        records = ledger.records()
        assert [record.query_id for record in records] == [0, 1]
        assert records[0].gamma == pytest.approx(0.5)
        assert records[1].gamma == pytest.approx(1.0)

    def test_accountant_hook_report(self):
        ledger = MarginLedger()
        aggregator = SecureAggregator(sigma=5.0, run_seed=0, ledger=ledger)
        for query_id in range(30):
            aggregator.aggregate_query([one_hot(0, 3)] * 40, query_id)
        hook = AccountantHook(ledger)
        params = MechanismParams(sigma=5.0, queries=30, num_agents=40, num_classes=3)
        report = hook.privacy_report(params, Scheme.AE, 1e-3)
        direct = privacy_accountant.privacy_report(params, Scheme.AE, 1e-3)
        assert report.epsilon == pytest.approx(direct.epsilon)
        assert report.epsilon_data_dependent < report.epsilon

    def test_margins_summary(self):
        ledger = MarginLedger()
        aggregator = SecureAggregator(sigma=1.0, run_seed=0, ledger=ledger)
        aggregator.aggregate_query([one_hot(0, 2)] * 4, query_id=0)
        aggregator.aggregate_query([one_hot(0, 2), one_hot(1, 2)] * 2, query_id=1)
        summary = AccountantHook(ledger).margins_summary(0.5)
        assert summary == {"count": 2, "mean_gamma": pytest.approx(0.5), "fraction_high_consensus": 0.5}

    def test_margins_summary_empty(self):
        assert AccountantHook(MarginLedger()).margins_summary(0.5)["count"] == 0


class TestLeakageBoundary:
    """Only released labels and aggregate margin statistics cross the trust boundary."""

    def test_aggregate_public_fields(self):
        public = {f.name for f in dataclasses.fields(SecureAggregate) if not f.name.startswith("_")}
        assert public == {"released_label", "query_id"}

    def test_accountant_hook_surface(self):
        public = {name for name in dir(AccountantHook) if not name.startswith("_")}
        assert public == {"privacy_report", "margins_summary"}

    def test_package_exports(self):
        assert sorted(trust_boundary.__all__) == ["AccountantHook", "MarginLedger", "SecureAggregator", "mpc_argmax"]

    def test_summary_holds_no_per_query_values(self):
        ledger = MarginLedger()
        aggregator = SecureAggregator(sigma=1.0, run_seed=0, ledger=ledger)
        for query_id in range(5):
            aggregator.aggregate_query([one_hot(query_id % 2, 2)] * 3, query_id)
        summary = AccountantHook(ledger).margins_summary(0.5)
        assert all(value is None or isinstance(value, (int, float)) for value in summary.values())

    @pytest.mark.parametrize("package", ["application", "cli"])
    def test_callers_never_read_margins(self, package):
        root = Path(veilvote.__file__).parent
        source_root = root / package if package == "application" else root.parent / package
        sources = list(source_root.rglob("*.py"))
        assert sources
        for source in sources:
            text = source.read_text(encoding="utf-8")
            for needle in ("_noiseless_margin", ".records(", "_records", "_ledger"):
                assert needle not in text, f"{source.name} reads {needle}"


class TestNoiselessAggregation:
    """Aggregation with the noise switched off."""

    def test_zero_noise_argmax_matches_vote_sum(self):
        """Dyadic votes keep the sums exact, so ties resolve identically."""
        rng = np.random.default_rng(12)
        for query_id in range(1000):
            num_agents, num_classes = int(rng.integers(1, 31)), int(rng.integers(2, 11))
            if rng.uniform() < 0.5:
                votes = [one_hot(int(label), num_classes) for label in rng.integers(0, num_classes, size=num_agents)]
            else:
                k = int(rng.choice([2, 4, 8]))
                votes = [knn_frequency(rng.integers(0, num_classes, size=k), k, num_classes)
                         for _ in range(num_agents)]
            silent = [VoteVector(vote.values, VoteKind.NOISY) for vote in votes]
            expected = int(np.argmax(np.sum([vote.values for vote in votes], axis=0)))
            assert mpc_argmax(silent, votes, query_id).released_label == expected

    def test_noisy_vote_preserves_expectation(self):
        """Per-coordinate noise N(0, sigma^2 / N) averages out to the vote itself."""
        vote = soft_vote([0.2, 0.3, 0.5])
        sigma, num_agents, draws = 3.0, 9, 20000
        rng = np.random.default_rng(5)
        samples = np.array([noisy_vote(vote, sigma, num_agents, rng).values for _ in range(draws)])
        standard_error = sigma / np.sqrt(num_agents) / np.sqrt(draws)
        assert np.all(np.abs(samples.mean(axis=0) - vote.values) < 4 * standard_error)


class TestMatchProbabilityMonteCarlo:
    """Empirical agreement of the noisy and noiseless argmax against the match bound."""

    DRAWS = 100_000

    def test_random_configurations(self):
        rng = np.random.default_rng(2024)
        for config_id in range(20):
            num_agents, num_classes = int(rng.integers(10, 501)), int(rng.integers(2, 21))
            sigma, target_gamma = rng.uniform(1.0, 50.0), rng.uniform(0.1, 1.0)
            top, runner_up = (int(c) for c in rng.choice(num_classes, size=2, replace=False))
            dissenters = max(1, int(num_agents * (1.0 - target_gamma) // 2))
            votes = ([one_hot(top, num_classes)] * (num_agents - dissenters)
                     + [one_hot(runner_up, num_classes)] * dissenters)
            gamma = noiseless_margin(votes)
            assert gamma == pytest.approx((num_agents - 2 * dissenters) / num_agents)

            bound = privacy_accountant.match_probability_bound(num_agents, sigma, gamma, num_classes)
            noise = noise_generator(2024, config_id, 0).normal(0.0, sigma, size=(self.DRAWS, num_classes))
            released = np.argmax(ordered_sum(votes) + noise, axis=1)
            match_rate = float(np.mean(released == top))
            standard_error = np.sqrt(bound * (1.0 - bound) / self.DRAWS)
            assert match_rate >= bound - 3.0 * standard_error, (num_agents, sigma, gamma, num_classes)
