"""
Results of veilvote commands.
"""
from veilvote.application.results.run_report import RunReport, RepeatSummary, summarize_repeats

__all__ = ['RunReport', 'RepeatSummary', 'summarize_repeats']
