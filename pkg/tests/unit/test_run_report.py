"""
Tests for run reports, repeat summaries and report storage.
"""
import math

import pandas as pd
import pytest

from veilvote.application.results.run_report import RunReport, summarize_repeats
from veilvote.domain.exceptions import ConfigError, UsageError
from veilvote.domain.models.privacy import PrivacyReport, Scheme
from veilvote.infrastructure.repositories import COMPARISON_COLUMNS, ReportRepository, write_comparison_csv


def _report(scheme=Scheme.AE, seed=0, accuracy=0.9, epsilon=3.7, epsilon_star=3.5, timing=12.0):
    privacy = None
    if epsilon is not None:
        privacy = PrivacyReport(epsilon=epsilon, delta=1e-3, alpha_star=5.0, epsilon_data_dependent=epsilon_star,
                                rdp_at_orders=[(2.0, 0.8)])
    return RunReport(
        scheme=scheme,
        seed=seed,
        test_accuracy=accuracy,
        comm_upstream_floats=300,
        comm_expected_floats=300.0,
        privacy=privacy,
        queries_answered=100,
        config={"sigma": 11.2},
        wall_time_ms=timing,
    )


class TestRunReport:
    """Test cases for RunReport."""

    def test_dict_round_trip(self):
        report = _report()
        restored = RunReport.from_dict(report.to_dict())
        assert restored.to_dict() == report.to_dict()
        assert restored.privacy.rdp_at_orders == [(2.0, 0.8)]

    def test_timing_can_be_dropped(self):
        assert "wall_time_ms" not in _report().to_dict(include_timing=False)
        assert _report(timing=1.0).to_json(include_timing=False) == _report(timing=2.0).to_json(include_timing=False)

    def test_non_private_report(self):
        report = _report(scheme=Scheme.FEDAVG, epsilon=None)
        assert report.epsilon is None
        assert report.epsilon_data_dependent is None
        assert report.comparison_row()["epsilon"] is None

    def test_comparison_row_drops_infinite_epsilon(self):
        row = _report(epsilon=math.inf, epsilon_star=None).comparison_row()
        assert row["epsilon"] is None
        assert list(row) == COMPARISON_COLUMNS


class TestSummaries:
    """Test cases for summarize_repeats."""

    def test_mean_and_population_std(self):
        reports = [_report(seed=0, accuracy=0.8, epsilon=3.0), _report(seed=1, accuracy=1.0, epsilon=5.0),
                   _report(scheme=Scheme.FEDAVG, accuracy=0.7, epsilon=None)]
        ae, fedavg = summarize_repeats(reports)
        assert ae.scheme is Scheme.AE
        assert ae.repeats == 2
        assert ae.accuracy_mean == pytest.approx(0.9)
        assert ae.accuracy_std == pytest.approx(0.1)
        assert ae.epsilon_mean == pytest.approx(4.0)
        assert fedavg.epsilon_mean is None

    def test_empty(self):
        with pytest.raises(UsageError):
            summarize_repeats([])


class TestReportRepository:
    """Test cases for ReportRepository and the comparison CSV."""

    def test_append_and_load(self, tmp_path):
        repository = ReportRepository(tmp_path / "out" / "runs.jsonl")
        repository.append_all([_report(seed=0), _report(seed=1)])
        loaded = repository.load_all()
        assert [report.seed for report in loaded] == [0, 1]
        assert "wall_time_ms" not in repository.path.read_text(encoding="utf-8")

    def test_clear(self, tmp_path):
        repository = ReportRepository(tmp_path / "runs.jsonl")
        repository.append(_report())
        repository.clear()
        assert repository.load_all() == []

    def test_corrupt_line(self, tmp_path):
        path = tmp_path / "runs.jsonl"
        path.write_text("{not json}\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            ReportRepository(path).load_all()

    def test_comparison_csv(self, tmp_path):
        reports = [_report(seed=0), _report(scheme=Scheme.FEDAVG, seed=0, epsilon=None)]
        path = write_comparison_csv(reports, tmp_path / "compare.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == COMPARISON_COLUMNS
        assert frame["scheme"].tolist() == ["AE", "FedAvg"]
        assert frame["epsilon"].isna().tolist() == [False, True]
