"""
Command and query handlers for veilvote.
"""
from veilvote.application.handlers.run_handlers import (
    RunAeDpflCommandHandler,
    RunKnnDpflCommandHandler,
    RunDpFedAvgCommandHandler,
    RunFedAvgCommandHandler
)
from veilvote.application.handlers.query_handlers import AccountPrivacyQueryHandler, CalibrateSigmaQueryHandler
from veilvote.application.handlers.event_logger import RunEventLogger

__all__ = [
    'RunAeDpflCommandHandler',
    'RunKnnDpflCommandHandler',
    'RunDpFedAvgCommandHandler',
    'RunFedAvgCommandHandler',
    'AccountPrivacyQueryHandler',
    'CalibrateSigmaQueryHandler',
    'RunEventLogger'
]
