"""
Repositories for run reports.
"""
from veilvote.infrastructure.repositories.report_repository import (
    COMPARISON_COLUMNS,
    ReportRepository,
    comparison_frame,
    summary_frame,
    write_comparison_csv
)

__all__ = ['COMPARISON_COLUMNS', 'ReportRepository', 'comparison_frame', 'summary_frame', 'write_comparison_csv']
