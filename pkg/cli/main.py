#!/usr/bin/env python
"""
Command-line interface for veilvote.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import click
from pydantic import ValidationError

from veilvote import __version__
from veilvote.application.queries.accounting_queries import AccountPrivacyQuery, CalibrateSigmaQuery
from veilvote.application.results.run_report import RunReport, summarize_repeats
from veilvote.config.config_loader import get_config, worker_count
from veilvote.domain.exceptions import ConfigError, ConsistencyError, ParameterError
from veilvote.infrastructure.logging import get_logger, setup_structured_logging
from veilvote.infrastructure.registry import FederationRuntime, create_federation_runtime
from veilvote.infrastructure.repositories import ReportRepository, write_comparison_csv

from .config import RunCommand, load_compare_config, load_run_config
from .utils import EXIT_CONFIG_ERROR, EXIT_RUNTIME_FAILURE, TableFormatter, fail

CONFIG_ERRORS = (ConfigError, ParameterError, ConsistencyError, ValidationError)

logger = get_logger("cli")


def _execute(runtime: FederationRuntime, commands: Sequence[RunCommand]) -> List[RunReport]:
    """Run commands, possibly in parallel, returning reports in command order."""
    workers = min(worker_count(), len(commands))
    if workers <= 1:
        return [runtime.command_bus.dispatch(command) for command in commands]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(runtime.command_bus.dispatch, commands))


def _run_or_exit(runtime: FederationRuntime, commands: Sequence[RunCommand]) -> List[RunReport]:
    try:
        return _execute(runtime, commands)
    except CONFIG_ERRORS as e:
        logger.log_operation_error("run_commands", e, commands=len(commands))
        fail(str(e), EXIT_CONFIG_ERROR)
    except Exception as e:
        logger.log_operation_error("run_commands", e, commands=len(commands))
        fail(f"{type(e).__name__}: {e}", EXIT_RUNTIME_FAILURE)


@click.group()
@click.version_option(version=__version__)
@click.option("--log-level", default=None, help="Log level (defaults to the configured level)")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also write logs to this file")
def cli(log_level: Optional[str], log_file: Optional[str]):
    """Differentially private federated learning by label voting."""
    logging_config = get_config().get("logging", {})
    setup_structured_logging(
        level=log_level or logging_config.get("level", "INFO"),
        format_type=logging_config.get("format_type", "structured"),
        log_file=log_file or logging_config.get("file"),
        include_correlation_id=logging_config.get("include_correlation_id", True),
    )


@cli.command("run")
@click.argument("config_path", type=click.Path(dir_okay=False))
def run(config_path: str):
    """Run one scheme `repeats` times and write JSON-lines reports."""
    try:
        run_config = load_run_config(config_path)
    except CONFIG_ERRORS as e:
        fail(str(e), EXIT_CONFIG_ERROR)

    runtime = create_federation_runtime()
    reports = _run_or_exit(runtime, run_config.commands())

    repository = ReportRepository(run_config.output)
    repository.clear()
    repository.append_all(reports)

    click.echo(TableFormatter.format_reports(reports))
    click.echo(f"Wrote {len(reports)} reports to {run_config.output}")


@cli.command("account")
@click.option("--scheme", type=click.Choice(["ae", "knn"], case_sensitive=False), default="ae", show_default=True)
@click.option("--granularity", type=click.Choice(["agent", "instance"], case_sensitive=False),
              default="agent", show_default=True)
@click.option("--q", "queries", type=int, required=True, help="Number of answered queries Q")
@click.option("--sigma", type=float, required=True, help="Noise scale on each vote sum")
@click.option("--k", type=int, default=None, help="Neighbors per agent (kNN instance level)")
@click.option("--delta", type=float, default=None, help="Target delta (defaults to the configured delta)")
@click.option("--num-agents", type=int, default=None, help="N, required with --margins")
@click.option("--num-classes", type=int, default=None, help="C, required with --margins")
@click.option("--margins", "margins_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV with header query_id,gamma")
@click.option("--bound", type=click.Choice(["closed_form", "lemma"]), default=None,
              help="Data-dependent bound variant")
@click.option("--table", is_flag=True, help="Print a table instead of JSON")
def account(scheme, granularity, queries, sigma, k, delta, num_agents, num_classes, margins_path, bound, table):
    """Print the privacy report of Q answered queries without running any learning."""
    if margins_path is not None and (num_agents is None or num_classes is None):
        fail("--margins needs both --num-agents and --num-classes", EXIT_CONFIG_ERROR)
    margin_shape = {name: value for name, value in (("num_agents", num_agents), ("num_classes", num_classes))
                    if value is not None}
    try:
        query = AccountPrivacyQuery(
            scheme=scheme.upper(),
            granularity=granularity.lower(),
            queries=queries,
            sigma=sigma,
            delta=delta if delta is not None else get_config()["accounting"]["default_delta"],
            k=k,
            margins_path=margins_path,
            bound=bound,
            **margin_shape,
        )
        report = create_federation_runtime().query_bus.dispatch(query)
    except CONFIG_ERRORS as e:
        fail(str(e), EXIT_CONFIG_ERROR)

    if table:
        click.echo(TableFormatter.format_privacy_report(report))
    else:
        click.echo(report.to_json())


@cli.command("calibrate")
@click.option("--scheme", type=click.Choice(["ae", "knn", "dpfedavg"], case_sensitive=False),
              default="ae", show_default=True)
@click.option("--granularity", type=click.Choice(["agent", "instance"], case_sensitive=False),
              default="agent", show_default=True)
@click.option("--releases", type=int, required=True, help="Q queries, or T rounds for DP-FedAvg")
@click.option("--epsilon", type=float, required=True, help="Target epsilon")
@click.option("--delta", type=float, default=None, help="Target delta (defaults to the configured delta)")
@click.option("--k", type=int, default=None, help="Neighbors per agent (kNN instance level)")
def calibrate(scheme, granularity, releases, epsilon, delta, k):
    """Print the noise scale that spends exactly the target epsilon."""
    scheme_names = {"ae": "AE", "knn": "KNN", "dpfedavg": "DPFedAvg"}
    try:
        query = CalibrateSigmaQuery(
            scheme=scheme_names[scheme.lower()],
            granularity=granularity.lower(),
            releases=releases,
            epsilon=epsilon,
            delta=delta if delta is not None else get_config()["accounting"]["default_delta"],
            k=k,
        )
        sigma = create_federation_runtime().query_bus.dispatch(query)
    except CONFIG_ERRORS as e:
        fail(str(e), EXIT_CONFIG_ERROR)
    click.echo(f"{sigma:.6f}")


@cli.command("compare")
@click.argument("config_path", type=click.Path(dir_okay=False))
def compare(config_path: str):
    """Run several schemes on shared seeds and data and write the comparison CSV."""
    try:
        compare_config = load_compare_config(config_path)
    except CONFIG_ERRORS as e:
        fail(str(e), EXIT_CONFIG_ERROR)

    runtime = create_federation_runtime()
    reports = _run_or_exit(runtime, compare_config.commands())

    write_comparison_csv(reports, compare_config.output)
    if compare_config.reports_output is not None:
        repository = ReportRepository(compare_config.reports_output)
        repository.clear()
        repository.append_all(reports)

    click.echo(TableFormatter.format_summaries(summarize_repeats(reports)))
    click.echo(f"Wrote {len(reports)} rows to {compare_config.output}")


if __name__ == "__main__":
    cli()
