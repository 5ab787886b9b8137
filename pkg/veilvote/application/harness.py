"""
End-to-end federation runs: AE-DPFL, kNN-DPFL, DP-FedAvg and FedAvg.

Every run builds (or receives) its federated data, trains locally, releases
labels or model updates, and assembles a RunReport whose privacy figures come
from the accountant only.
"""
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from veilvote.application.results.run_report import RunReport
from veilvote.config.config_loader import worker_count
from veilvote.domain.events.run_events import (
    PrivacyReportReadyEvent,
    QueryAnsweredEvent,
    RoundCompletedEvent,
    RunCompletedEvent,
    TeachersTrainedEvent,
)
from veilvote.domain.exceptions import ParameterError, UsageError
from veilvote.domain.models.fedavg import FedAvgConfig
from veilvote.domain.models.federation import FederatedData, FederationSpec
from veilvote.domain.models.learner import Classifier, FeatureMap, LearnerConfig, LearnerKind
from veilvote.domain.models.privacy import Granularity, MechanismParams, PrivacyReport, Scheme
from veilvote.domain.models.vote import VoteKind, VoteVector
from veilvote.domain.services import privacy_accountant
from veilvote.domain.services.data_generator import build_federation
from veilvote.domain.services.evaluation import evaluate, label_accuracy
from veilvote.domain.services.fedavg_service import LogisticAgent, fedavg_round, sample_agents
from veilvote.domain.services.local_learner import (
    knn_vote_matrix,
    predict_labels,
    predict_proba_matrix,
    resolve_k,
    train_classifier,
    train_student,
)
from veilvote.domain.services.metering import comm_cost, expected_comm_cost
from veilvote.infrastructure.event_bus import EventBus, event_bus as default_event_bus
from veilvote.infrastructure.logging import ProgressTracker, correlation_scope, get_logger, run_correlation_id
from veilvote.infrastructure.trust_boundary import AccountantHook, MarginLedger, SecureAggregator

logger = get_logger(__name__)

T = TypeVar("T")


def derive_seed(*parts: int) -> int:
    """Stable 32-bit seed from integer parts."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def _parallel_map(function: Callable[[int], T], count: int, max_workers: Optional[int]) -> List[T]:
    workers = max_workers or worker_count()
    if workers <= 1 or count <= 1:
        return [function(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=min(workers, count)) as pool:
        return list(pool.map(function, range(count)))


def _require_queries(data: FederatedData, queries: int) -> None:
    if data.public_pool_size == 0:
        raise UsageError("the public pool is empty; voting schemes have nothing to label")
    if queries <= 0:
        raise UsageError("no queries to answer: the student cannot be trained")
    if queries > data.public_pool_size:
        raise UsageError(f"{queries} queries exceed the public pool of {data.public_pool_size} points")


def _answer_queries(vote_matrices: Sequence[np.ndarray], kind: VoteKind, sigma: float, run_seed: int,
                    run_id: str, bus: EventBus) -> Tuple[np.ndarray, MarginLedger]:
    """Noisy-vote every query in pool order through the trust boundary."""
    queries = vote_matrices[0].shape[0]
    ledger = MarginLedger()
    aggregator = SecureAggregator(sigma=sigma, run_seed=run_seed, ledger=ledger)
    released = np.zeros(queries, dtype=np.int64)
    tracker = ProgressTracker(queries, "answer_queries", logger_name=__name__)
    for query_id in range(queries):
        votes = [VoteVector(matrix[query_id], kind) for matrix in vote_matrices]
        released[query_id] = aggregator.aggregate_query(votes, query_id)
        bus.publish(QueryAnsweredEvent(run_id=run_id, query_id=query_id, released_label=int(released[query_id])))
        tracker.update()
    tracker.complete(answered=aggregator.answered)
    return released, ledger


def _noise_free_labels(vote_matrices: Sequence[np.ndarray]) -> np.ndarray:
    stacked = np.stack(vote_matrices)
    return np.argmax(stacked.sum(axis=0), axis=1)


def _finish_voting_run(scheme: Scheme, spec: FederationSpec, data: FederatedData, queries: int,
                       released: np.ndarray, ledger: MarginLedger, noise_free: np.ndarray,
                       params: MechanismParams, delta: float, learner: LearnerConfig,
                       bound: Optional[str], config_echo: dict, run_id: str, bus: EventBus,
                       started: float) -> RunReport:
    pool = data.public_features[:queries]
    truth = data.public_labels[:queries]
    student = train_student(list(zip(pool, released)), data.num_classes,
                            learner.with_seed(derive_seed(spec.seed, spec.num_agents)))
    test_accuracy = evaluate(student, data.test)

    hook = AccountantHook(ledger)
    privacy = hook.privacy_report(params, scheme, delta, bound=bound)
    bus.publish(PrivacyReportReadyEvent(run_id=run_id, epsilon=privacy.epsilon, delta=delta,
                                        epsilon_data_dependent=privacy.epsilon_data_dependent))
    threshold = privacy_accountant.consensus_margin_threshold(
        params.num_agents, params.sigma, params.num_classes, delta
    )
    upstream = comm_cost(scheme, num_classes=data.num_classes, queries=queries)

    report = RunReport(
        scheme=scheme,
        seed=spec.seed,
        test_accuracy=test_accuracy,
        comm_upstream_floats=upstream,
        comm_expected_floats=expected_comm_cost(scheme, num_classes=data.num_classes, queries=queries),
        privacy=privacy,
        pseudo_label_accuracy=label_accuracy(released, truth),
        noise_free_ensemble_accuracy=label_accuracy(noise_free, truth),
        queries_answered=queries,
        margins_summary=hook.margins_summary(threshold),
        config=config_echo,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )
    bus.publish(RunCompletedEvent(run_id=run_id, scheme=scheme.value, test_accuracy=test_accuracy,
                                  epsilon=privacy.epsilon))
    return report


def run_ae_dpfl(spec: FederationSpec, sigma: float, queries: int, learner: LearnerConfig,
                delta: float = 1e-3, granularity: Granularity = Granularity.AGENT,
                vote_mode: str = "hard", bound: Optional[str] = None,
                data: Optional[FederatedData] = None, max_workers: Optional[int] = None,
                bus: Optional[EventBus] = None) -> RunReport:
    """
    Train one teacher per agent, label Q public points by noisy vote and train the student.

    Args:
        spec: Federation spec (its seed drives data, training and noise)
        sigma: Total noise scale on each vote sum
        queries: Q, number of public points to label
        learner: Teacher and student settings
        delta: Target delta
        granularity: Adjacency notion of the privacy report
        vote_mode: "hard" for one-hot votes, "soft" for probability vectors
        bound: Data-dependent bound variant
        data: Prebuilt federation (built from spec when omitted)
        max_workers: Thread cap for teacher training
        bus: Event bus for run events

    Returns:
        RunReport
    """
    if vote_mode not in ("hard", "soft"):
        raise ParameterError(f"vote_mode must be 'hard' or 'soft', got {vote_mode!r}")
    bus = bus or default_event_bus
    granularity = Granularity(granularity)
    run_id = run_correlation_id(Scheme.AE.value, spec.seed)
    with correlation_scope(run_id):
        started = time.perf_counter()
        data = data or build_federation(spec)
        _require_queries(data, queries)
        logger.log_operation_start("run_ae_dpfl", agents=len(data.agents), queries=queries, sigma=sigma)

        teachers: List[Classifier] = _parallel_map(
            lambda i: train_classifier(data.agents[i], learner.with_seed(derive_seed(spec.seed, i))),
            len(data.agents), max_workers,
        )
        degenerate = sum(teacher.degenerate for teacher in teachers)
        bus.publish(TeachersTrainedEvent(run_id=run_id, scheme=Scheme.AE.value, num_agents=len(teachers)))
        logger.log_business_event("teachers_trained", "run", run_id, teachers=len(teachers), degenerate=degenerate)

        pool = data.public_features[:queries]
        if vote_mode == "soft":
            kind = VoteKind.SOFT
            vote_matrices = _parallel_map(lambda i: predict_proba_matrix(teachers[i], pool), len(teachers), max_workers)
        else:
            kind = VoteKind.ONE_HOT
            vote_matrices = _parallel_map(
                lambda i: np.eye(data.num_classes)[predict_labels(teachers[i], pool)], len(teachers), max_workers
            )

        released, ledger = _answer_queries(vote_matrices, kind, sigma, spec.seed, run_id, bus)
        params = MechanismParams(sigma=sigma, queries=queries, num_agents=len(data.agents),
                                 num_classes=data.num_classes, granularity=granularity)
        config_echo = {
            "federation": spec.to_dict(),
            "sigma": sigma,
            "queries": queries,
            "delta": delta,
            "granularity": granularity.value,
            "vote_mode": vote_mode,
            "learner": learner.to_dict(),
        }
        report = _finish_voting_run(Scheme.AE, spec, data, queries, released, ledger,
                                    _noise_free_labels(vote_matrices), params, delta, learner, bound,
                                    config_echo, run_id, bus, started)
        logger.log_operation_success("run_ae_dpfl", test_accuracy=report.test_accuracy, epsilon=report.epsilon)
        return report


def run_knn_dpfl(spec: FederationSpec, sigma: float, queries: int, learner: LearnerConfig,
                 k: Optional[int] = None, k_fraction: Optional[float] = 0.05,
                 phi: Optional[FeatureMap] = None, delta: float = 1e-3,
                 granularity: Granularity = Granularity.INSTANCE, bound: Optional[str] = None,
                 data: Optional[FederatedData] = None, max_workers: Optional[int] = None,
                 bus: Optional[EventBus] = None) -> RunReport:
    """
    Label Q public points by noisy kNN frequency votes and train the student.

    Each agent uses ``k`` neighbors, or ceil(k_fraction * n_i) when k is not
    given; the privacy report uses the smallest k across agents.

    Args:
        spec: Federation spec
        sigma: Total noise scale on each vote sum
        queries: Q
        learner: Student settings
        k: Explicit neighbor count for every agent
        k_fraction: Fraction of local data size used when k is omitted
        phi: Feature map (identity by default)
        delta: Target delta
        granularity: Adjacency notion of the privacy report
        bound: Data-dependent bound variant
        data: Prebuilt federation
        max_workers: Thread cap for per-agent voting
        bus: Event bus for run events

    Returns:
        RunReport
    """
    bus = bus or default_event_bus
    phi = phi or FeatureMap.identity()
    granularity = Granularity(granularity)
    run_id = run_correlation_id(Scheme.KNN.value, spec.seed)
    with correlation_scope(run_id):
        started = time.perf_counter()
        data = data or build_federation(spec)
        _require_queries(data, queries)

        ks = [resolve_k(agent.size, k, k_fraction) for agent in data.agents]
        too_large = [i for i, (agent, k_i) in enumerate(zip(data.agents, ks)) if k_i > agent.size]
        if too_large:
            raise ParameterError(f"k={k} exceeds the local data of agents {too_large}")
        logger.log_operation_start("run_knn_dpfl", agents=len(data.agents), queries=queries,
                                   sigma=sigma, k_min=min(ks), k_max=max(ks))

        pool = data.public_features[:queries]
        vote_matrices = _parallel_map(lambda i: knn_vote_matrix(data.agents[i], phi, pool, ks[i]),
                                      len(data.agents), max_workers)
        bus.publish(TeachersTrainedEvent(run_id=run_id, scheme=Scheme.KNN.value, num_agents=len(data.agents)))

        released, ledger = _answer_queries(vote_matrices, VoteKind.FREQUENCY, sigma, spec.seed, run_id, bus)
        params = MechanismParams(sigma=sigma, queries=queries, num_agents=len(data.agents), k=min(ks),
                                 num_classes=data.num_classes, granularity=granularity)
        config_echo = {
            "federation": spec.to_dict(),
            "sigma": sigma,
            "queries": queries,
            "delta": delta,
            "granularity": granularity.value,
            "k": k,
            "k_fraction": k_fraction,
            "k_min": min(ks),
            "feature_map": {"kind": phi.kind.value, "output_dim": phi.output_dim, "seed": phi.seed},
            "learner": learner.to_dict(),
        }
        report = _finish_voting_run(Scheme.KNN, spec, data, queries, released, ledger,
                                    _noise_free_labels(vote_matrices), params, delta, learner, bound,
                                    config_echo, run_id, bus, started)
        logger.log_operation_success("run_knn_dpfl", test_accuracy=report.test_accuracy, epsilon=report.epsilon)
        return report


def _run_gradient(scheme: Scheme, spec: FederationSpec, config: FedAvgConfig, delta: Optional[float],
                  dp_enabled: bool, data: Optional[FederatedData], max_workers: Optional[int],
                  bus: Optional[EventBus]) -> RunReport:
    bus = bus or default_event_bus
    run_id = run_correlation_id(scheme.value, spec.seed)
    with correlation_scope(run_id):
        started = time.perf_counter()
        data = data or build_federation(spec)
        agents = [LogisticAgent(agent, config.local_batch_size) for agent in data.agents]
        shape = agents[0].shape
        theta = np.zeros(shape[0] * shape[1])
        workers = max_workers or worker_count()
        logger.log_operation_start(f"run_{scheme.value.lower()}", agents=len(agents), rounds=config.rounds)

        tracker = ProgressTracker(config.rounds, f"{scheme.value}_rounds", logger_name=__name__)
        try:
            for round_index in range(config.rounds):
                theta = fedavg_round(theta, agents, config, round_index, dp_enabled, max_workers=workers)
                sampled = sample_agents(len(agents), config.q, config.seed, round_index).size
                bus.publish(RoundCompletedEvent(run_id=run_id, round_index=round_index,
                                                sampled_agents=int(sampled)))
                tracker.update()
        except Exception as e:
            tracker.error(e, round_index=round_index)
            raise
        tracker.complete()

        model = Classifier(kind=LearnerKind.LOGISTIC, weights=theta.reshape(shape).copy(),
                           num_classes=data.num_classes, input_dim=data.input_dim,
                           present_classes=tuple(range(data.num_classes)))
        test_accuracy = evaluate(model, data.test)

        privacy: Optional[PrivacyReport] = None
        if dp_enabled:
            privacy = privacy_accountant.curve_report(
                privacy_accountant.dp_fedavg_curve(config.rounds, config.sigma), delta
            )
            bus.publish(PrivacyReportReadyEvent(run_id=run_id, epsilon=privacy.epsilon, delta=delta))

        model_dim = int(theta.size)
        report = RunReport(
            scheme=scheme,
            seed=spec.seed,
            test_accuracy=test_accuracy,
            comm_upstream_floats=comm_cost(scheme, model_dim=model_dim, rounds=config.rounds),
            comm_expected_floats=expected_comm_cost(scheme, model_dim=model_dim, rounds=config.rounds, q=config.q),
            privacy=privacy,
            config={"federation": spec.to_dict(), "fedavg": config.to_dict(), "delta": delta},
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
        )
        bus.publish(RunCompletedEvent(run_id=run_id, scheme=scheme.value, test_accuracy=test_accuracy,
                                      epsilon=report.epsilon))
        logger.log_operation_success(f"run_{scheme.value.lower()}", test_accuracy=test_accuracy,
                                     epsilon=report.epsilon)
        return report


def run_dp_fedavg(spec: FederationSpec, config: FedAvgConfig, delta: float = 1e-3,
                  data: Optional[FederatedData] = None, max_workers: Optional[int] = None,
                  bus: Optional[EventBus] = None) -> RunReport:
    """
    DP-FedAvg over logistic-regression agents.

    The privacy report composes T Gaussian releases, T alpha / (2 sigma^2).

    Args:
        spec: Federation spec
        config: FedAvg settings; sigma must be positive and clip finite
        delta: Target delta
        data: Prebuilt federation
        max_workers: Thread cap for local updates
        bus: Event bus for run events

    Returns:
        RunReport
    """
    if not config.sigma > 0:
        raise ParameterError("DP-FedAvg needs a positive noise multiplier")
    return _run_gradient(Scheme.DPFEDAVG, spec, config, delta, True, data, max_workers, bus)


def run_fedavg(spec: FederationSpec, config: FedAvgConfig, data: Optional[FederatedData] = None,
               max_workers: Optional[int] = None, bus: Optional[EventBus] = None) -> RunReport:
    """Non-private FedAvg; the report carries no privacy figures."""
    return _run_gradient(Scheme.FEDAVG, spec, config, None, False, data, max_workers, bus)
