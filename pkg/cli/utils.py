"""
Common utilities for CLI output.
"""
import math
import sys
from typing import Any, List, Optional, Sequence

import click
from tabulate import tabulate

from veilvote.application.results.run_report import RepeatSummary, RunReport
from veilvote.domain.models.privacy import PrivacyReport

EXIT_RUNTIME_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def fail(message: str, code: int) -> None:
    """Print an error to standard error and exit with ``code``."""
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def _number(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{value:.{digits}f}"


class TableFormatter:
    """Utility for consistent table formatting."""

    @staticmethod
    def format_privacy_report(report: PrivacyReport) -> str:
        """Format a privacy report as a key/value table."""
        rows = [
            ["epsilon", _number(report.epsilon)],
            ["epsilon_data_dependent", _number(report.epsilon_data_dependent)],
            ["delta", f"{report.delta:g}"],
            ["alpha_star", _number(report.alpha_star)],
        ]
        for warning in report.warnings:
            rows.append(["warning", warning])
        return tabulate(rows, headers=["Quantity", "Value"], tablefmt="grid")

    @staticmethod
    def format_reports(reports: Sequence[RunReport]) -> str:
        """Format run reports as one row each."""
        if not reports:
            return "No reports."

        headers = ["Scheme", "Seed", "Accuracy", "Epsilon", "Epsilon*", "Comm floats"]
        rows = [
            [
                report.scheme.value,
                report.seed,
                _number(report.test_accuracy),
                _number(report.epsilon),
                _number(report.epsilon_data_dependent),
                report.comm_upstream_floats,
            ]
            for report in reports
        ]
        return tabulate(rows, headers=headers, tablefmt="grid")

    @staticmethod
    def format_summaries(summaries: List[RepeatSummary]) -> str:
        """Format mean and std per scheme."""
        if not summaries:
            return "No summaries."

        headers = ["Scheme", "Repeats", "Accuracy", "Epsilon", "Epsilon*"]
        rows: List[List[Any]] = []
        for summary in summaries:
            rows.append([
                summary.scheme.value,
                summary.repeats,
                f"{_number(summary.accuracy_mean)} ± {_number(summary.accuracy_std)}",
                f"{_number(summary.epsilon_mean)} ± {_number(summary.epsilon_std)}",
                f"{_number(summary.epsilon_star_mean)} ± {_number(summary.epsilon_star_std)}",
            ])
        return tabulate(rows, headers=headers, tablefmt="grid")
