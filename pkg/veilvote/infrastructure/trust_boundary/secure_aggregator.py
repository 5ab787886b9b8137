"""
Secure vote aggregation and the margin ledger.
"""
import threading
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from veilvote.domain.exceptions import ConsistencyError
from veilvote.domain.models.privacy import MarginRecord, MechanismParams, PrivacyReport, Scheme
from veilvote.domain.models.vote import SecureAggregate, VoteVector
from veilvote.domain.services import privacy_accountant
from veilvote.domain.services.vote_aggregator import (
    noise_generator,
    noiseless_margin,
    noisy_vote,
    ordered_sum,
)
from veilvote.infrastructure.logging import get_logger

logger = get_logger(__name__)


def mpc_argmax(noisy_votes: Sequence[VoteVector], noiseless_votes: Sequence[VoteVector],
               query_id: int) -> SecureAggregate:
    """
    Release the argmax of the noisy vote sum.

    Args:
        noisy_votes: One noisy vote per agent, in agent order
        noiseless_votes: The same agents' votes before noise
        query_id: Query identifier

    Returns:
        SecureAggregate carrying the released label
    """
    if len(noisy_votes) != len(noiseless_votes):
        raise ConsistencyError(
            f"{len(noisy_votes)} noisy votes but {len(noiseless_votes)} noiseless votes"
        )
    noisy_sum = ordered_sum(noisy_votes)
    if noiseless_votes[0].num_classes != noisy_sum.size:
        raise ConsistencyError("noisy and noiseless votes disagree on the number of classes")
    return SecureAggregate(
        released_label=int(np.argmax(noisy_sum)),
        query_id=query_id,
        _noiseless_margin=noiseless_margin(noiseless_votes),
    )


class MarginLedger:
    """Append-only log of per-query margins."""

    def __init__(self):
        self._records: List[MarginRecord] = []
        self._lock = threading.Lock()

    def record(self, aggregate: SecureAggregate) -> None:
        with self._lock:
            self._records.append(MarginRecord(aggregate.query_id, aggregate._noiseless_margin))

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> Tuple[MarginRecord, ...]:
        with self._lock:
            return tuple(self._records)


class SecureAggregator:
    """
    Runs noisy voting for one run.

    Args:
        sigma: Total noise scale on the vote sum
        run_seed: Seed of the run; noise is keyed by (run_seed, agent_id, query_id)
        ledger: Margin ledger receiving one record per answered query
    """

    def __init__(self, sigma: float, run_seed: int, ledger: Optional[MarginLedger] = None):
        self.sigma = sigma
        self.run_seed = run_seed
        self.ledger = ledger if ledger is not None else MarginLedger()
        self._answered = 0

    @property
    def answered(self) -> int:
        return self._answered

    def aggregate_query(self, votes: Sequence[VoteVector], query_id: int) -> int:
        """
        Answer one query.

        Args:
            votes: Noiseless votes of all agents in ascending agent id order
            query_id: Query identifier

        Returns:
            Released label
        """
        num_agents = len(votes)
        noisy = [
            noisy_vote(vote, self.sigma, num_agents, noise_generator(self.run_seed, agent_id, query_id))
            for agent_id, vote in enumerate(votes)
        ]
        aggregate = mpc_argmax(noisy, votes, query_id)
        self.ledger.record(aggregate)
        self._answered += 1
        return aggregate.released_label


class AccountantHook:
    """The accountant's only window into the ledger."""

    def __init__(self, ledger: MarginLedger):
        self._ledger = ledger

    def privacy_report(self, params: MechanismParams, scheme: Scheme, delta: float,
                       bound: Optional[str] = None) -> PrivacyReport:
        """
        Privacy report with margin-based accounting over the logged queries.

        Args:
            params: Mechanism parameters; queries must equal the ledger length
            scheme: Scheme.AE or Scheme.KNN
            delta: Target delta
            bound: Data-dependent bound variant

        Returns:
            PrivacyReport
        """
        return privacy_accountant.accumulate_data_dependent(
            self._ledger.records(), params, delta, scheme=scheme, bound=bound
        )

    def margins_summary(self, high_consensus_threshold: float) -> Dict[str, float]:
        """Aggregate statistics only; per-query margins never leave the boundary."""
        gammas = np.array([record.gamma for record in self._ledger.records()])
        if gammas.size == 0:
            return {"count": 0, "mean_gamma": None, "fraction_high_consensus": None}
        return {
            "count": int(gammas.size),
            "mean_gamma": float(gammas.mean()),
            "fraction_high_consensus": float(np.mean(gammas >= high_consensus_threshold)),
        }
