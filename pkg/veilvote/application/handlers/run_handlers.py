"""
Command handlers for federation runs.
"""
from veilvote.application.commands.run_commands import (
    RunAeDpflCommand,
    RunDpFedAvgCommand,
    RunFedAvgCommand,
    RunKnnDpflCommand,
)
from veilvote.application.harness import run_ae_dpfl, run_dp_fedavg, run_fedavg, run_knn_dpfl
from veilvote.application.results.run_report import RunReport
from veilvote.domain.models.fedavg import FedAvgConfig
from veilvote.domain.models.privacy import Granularity
from veilvote.infrastructure.command_bus import CommandHandler
from veilvote.infrastructure.event_bus import EventBus
from veilvote.infrastructure.logging import get_logger, log_errors, log_execution_time


def _fedavg_config(command, sigma: float = 0.0, clip: float = float("inf")) -> FedAvgConfig:
    return FedAvgConfig(
        q=command.q,
        sigma=sigma,
        clip=clip,
        local_steps=command.local_steps,
        eta=command.eta,
        rounds=command.rounds,
        seed=command.seed,
        lr_decay=command.lr_decay,
        local_batch_size=command.local_batch_size,
    )


class RunAeDpflCommandHandler(CommandHandler[RunAeDpflCommand, RunReport]):
    """Handler for RunAeDpflCommand."""

    def __init__(self, event_bus: EventBus):
        self.event_bus = event_bus
        self.logger = get_logger("runs.ae_dpfl")

    @log_execution_time(operation_name="run_ae_dpfl_command")
    @log_errors(reraise=True)
    def handle(self, command: RunAeDpflCommand) -> RunReport:
        self.logger.log_business_event(
            event="run_requested",
            entity_type="run",
            entity_id=f"ae-seed{command.seed}",
            sigma=command.sigma,
            queries=command.queries,
            vote_mode=command.vote_mode,
        )
        return run_ae_dpfl(
            command.federation.to_spec(command.seed),
            sigma=command.sigma,
            queries=command.queries,
            learner=command.learner.to_config(command.seed),
            delta=command.delta,
            granularity=Granularity(command.granularity),
            vote_mode=command.vote_mode,
            bound=command.data_dependent_bound,
            bus=self.event_bus,
        )


class RunKnnDpflCommandHandler(CommandHandler[RunKnnDpflCommand, RunReport]):
    """Handler for RunKnnDpflCommand."""

    def __init__(self, event_bus: EventBus):
        self.event_bus = event_bus
        self.logger = get_logger("runs.knn_dpfl")

    @log_execution_time(operation_name="run_knn_dpfl_command")
    @log_errors(reraise=True)
    def handle(self, command: RunKnnDpflCommand) -> RunReport:
        self.logger.log_business_event(
            event="run_requested",
            entity_type="run",
            entity_id=f"knn-seed{command.seed}",
            sigma=command.sigma,
            queries=command.queries,
            k=command.k,
            k_fraction=command.k_fraction,
        )
        return run_knn_dpfl(
            command.federation.to_spec(command.seed),
            sigma=command.sigma,
            queries=command.queries,
            learner=command.learner.to_config(command.seed),
            k=command.k,
            k_fraction=command.k_fraction,
            phi=command.feature_map.to_feature_map(),
            delta=command.delta,
            granularity=Granularity(command.granularity),
            bound=command.data_dependent_bound,
            bus=self.event_bus,
        )


class RunDpFedAvgCommandHandler(CommandHandler[RunDpFedAvgCommand, RunReport]):
    """Handler for RunDpFedAvgCommand."""

    def __init__(self, event_bus: EventBus):
        self.event_bus = event_bus

    @log_execution_time(operation_name="run_dp_fedavg_command")
    @log_errors(reraise=True)
    def handle(self, command: RunDpFedAvgCommand) -> RunReport:
        return run_dp_fedavg(
            command.federation.to_spec(command.seed),
            _fedavg_config(command, sigma=command.sigma, clip=command.clip),
            delta=command.delta,
            bus=self.event_bus,
        )


class RunFedAvgCommandHandler(CommandHandler[RunFedAvgCommand, RunReport]):
    """Handler for RunFedAvgCommand."""

    def __init__(self, event_bus: EventBus):
        self.event_bus = event_bus

    @log_execution_time(operation_name="run_fedavg_command")
    @log_errors(reraise=True)
    def handle(self, command: RunFedAvgCommand) -> RunReport:
        return run_fedavg(
            command.federation.to_spec(command.seed),
            _fedavg_config(command),
            bus=self.event_bus,
        )
