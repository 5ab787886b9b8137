"""
Run reports and their aggregation over repeats.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from veilvote.domain.exceptions import UsageError
from veilvote.domain.models.privacy import PrivacyReport, Scheme


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


@dataclass
class RunReport:
    """Result of one run of one scheme."""
    scheme: Scheme
    seed: int
    test_accuracy: float
    comm_upstream_floats: int
    comm_expected_floats: float
    privacy: Optional[PrivacyReport] = None
    pseudo_label_accuracy: Optional[float] = None
    noise_free_ensemble_accuracy: Optional[float] = None
    queries_answered: int = 0
    margins_summary: Optional[Dict[str, Any]] = None
    config: Dict[str, Any] = field(default_factory=dict)
    wall_time_ms: float = 0.0

    @property
    def epsilon(self) -> Optional[float]:
        return self.privacy.epsilon if self.privacy else None

    @property
    def epsilon_data_dependent(self) -> Optional[float]:
        return self.privacy.epsilon_data_dependent if self.privacy else None

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        """
        Convert report to a JSON-ready dictionary.

        Args:
            include_timing: Whether to include wall_time_ms

        Returns:
            Dictionary representation of the report
        """
        result = {
            "scheme": self.scheme.value,
            "seed": self.seed,
            "test_accuracy": self.test_accuracy,
            "pseudo_label_accuracy": self.pseudo_label_accuracy,
            "noise_free_ensemble_accuracy": self.noise_free_ensemble_accuracy,
            "queries_answered": self.queries_answered,
            "privacy": self.privacy.to_dict() if self.privacy else None,
            "comm_upstream_floats": self.comm_upstream_floats,
            "comm_expected_floats": self.comm_expected_floats,
            "margins_summary": self.margins_summary,
            "config": self.config,
        }
        if include_timing:
            result["wall_time_ms"] = self.wall_time_ms
        return result

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunReport':
        """
        Create report from dictionary.

        Args:
            data: Dictionary produced by to_dict

        Returns:
            RunReport instance
        """
        privacy = data.get("privacy")
        return cls(
            scheme=Scheme(data["scheme"]),
            seed=int(data["seed"]),
            test_accuracy=float(data["test_accuracy"]),
            comm_upstream_floats=int(data["comm_upstream_floats"]),
            comm_expected_floats=float(data["comm_expected_floats"]),
            privacy=PrivacyReport.from_dict(privacy) if privacy else None,
            pseudo_label_accuracy=data.get("pseudo_label_accuracy"),
            noise_free_ensemble_accuracy=data.get("noise_free_ensemble_accuracy"),
            queries_answered=int(data.get("queries_answered", 0)),
            margins_summary=data.get("margins_summary"),
            config=data.get("config", {}),
            wall_time_ms=float(data.get("wall_time_ms", 0.0)),
        )

    def comparison_row(self) -> Dict[str, Any]:
        """Row of the comparison CSV."""
        return {
            "scheme": self.scheme.value,
            "seed": self.seed,
            "accuracy": self.test_accuracy,
            "epsilon": _finite_or_none(self.epsilon),
            "epsilon_star": _finite_or_none(self.epsilon_data_dependent),
            "comm_floats": self.comm_upstream_floats,
        }


@dataclass
class RepeatSummary:
    """Mean and standard deviation of a scheme over repeated seeds."""
    scheme: Scheme
    repeats: int
    accuracy_mean: float
    accuracy_std: float
    epsilon_mean: Optional[float] = None
    epsilon_std: Optional[float] = None
    epsilon_star_mean: Optional[float] = None
    epsilon_star_std: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "repeats": self.repeats,
            "accuracy_mean": self.accuracy_mean,
            "accuracy_std": self.accuracy_std,
            "epsilon_mean": self.epsilon_mean,
            "epsilon_std": self.epsilon_std,
            "epsilon_star_mean": self.epsilon_star_mean,
            "epsilon_star_std": self.epsilon_star_std,
        }


def _mean_std(values: List[Optional[float]]):
    present = [v for v in values if v is not None]
    if not present:
        return None, None
    return float(np.mean(present)), float(np.std(present))


def summarize_repeats(reports: Sequence[RunReport]) -> List[RepeatSummary]:
    """
    Mean and population standard deviation per scheme.

    Args:
        reports: Reports of one or more schemes

    Returns:
        One summary per scheme, in first-seen order
    """
    if not reports:
        raise UsageError("no reports to summarize")
    by_scheme: Dict[Scheme, List[RunReport]] = {}
    for report in reports:
        by_scheme.setdefault(report.scheme, []).append(report)

    summaries = []
    for scheme, group in by_scheme.items():
        accuracy_mean, accuracy_std = _mean_std([r.test_accuracy for r in group])
        epsilon_mean, epsilon_std = _mean_std([r.epsilon for r in group])
        star_mean, star_std = _mean_std([r.epsilon_data_dependent for r in group])
        summaries.append(RepeatSummary(
            scheme=scheme,
            repeats=len(group),
            accuracy_mean=accuracy_mean,
            accuracy_std=accuracy_std,
            epsilon_mean=epsilon_mean,
            epsilon_std=epsilon_std,
            epsilon_star_mean=star_mean,
            epsilon_star_std=star_std,
        ))
    return summaries
