"""
Report storage: JSON-lines run reports and the plot-ready comparison CSV.
"""
import json
import threading
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import pandas as pd

from veilvote.application.results.run_report import RepeatSummary, RunReport
from veilvote.domain.exceptions import ConfigError
from veilvote.infrastructure.logging import get_logger

PathLike = Union[str, Path]

COMPARISON_COLUMNS = ["scheme", "seed", "accuracy", "epsilon", "epsilon_star", "comm_floats"]

logger = get_logger(__name__)


class ReportRepository:
    """Append-only JSON-lines store of run reports."""

    def __init__(self, path: PathLike, include_timing: bool = False):
        self.path = Path(path)
        self.include_timing = include_timing
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, report: RunReport) -> None:
        """Append one report as a single JSON line."""
        line = report.to_json(include_timing=self.include_timing)
        with self._lock, open(self.path, "a", encoding="utf-8") as f:
            f.write(line + "\n")
        logger.debug("Report appended", context={"path": str(self.path), "scheme": report.scheme.value,
                                                 "seed": report.seed})

    def append_all(self, reports: Iterable[RunReport]) -> int:
        count = 0
        for report in reports:
            self.append(report)
            count += 1
        return count

    def load_all(self) -> List[RunReport]:
        """Read every report back, in file order."""
        if not self.path.exists():
            return []
        reports = []
        with open(self.path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    reports.append(RunReport.from_dict(json.loads(line)))
                except (ValueError, KeyError) as e:
                    raise ConfigError(f"{self.path}:{number}: not a run report ({e})") from e
        return reports

    def clear(self) -> None:
        if self.path.exists():
            self.path.unlink()


def comparison_frame(reports: Sequence[RunReport]) -> pd.DataFrame:
    """One row per report with the comparison columns."""
    return pd.DataFrame([report.comparison_row() for report in reports], columns=COMPARISON_COLUMNS)


def write_comparison_csv(reports: Sequence[RunReport], path: PathLike) -> Path:
    """
    Write the comparison CSV: scheme, seed, accuracy, epsilon, epsilon_star, comm_floats.

    Missing or infinite epsilons are written as empty cells.

    Args:
        reports: Reports in output order
        path: Destination file

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    comparison_frame(reports).to_csv(path, index=False)
    logger.info("Comparison written", context={"path": str(path), "rows": len(reports)})
    return path


def summary_frame(summaries: Sequence[RepeatSummary]) -> pd.DataFrame:
    return pd.DataFrame([summary.to_dict() for summary in summaries])
