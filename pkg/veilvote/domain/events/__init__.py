"""
Domain events for veilvote.
"""
from veilvote.domain.events.run_events import (
    TeachersTrainedEvent,
    QueryAnsweredEvent,
    RoundCompletedEvent,
    PrivacyReportReadyEvent,
    RunCompletedEvent
)

ALL_RUN_EVENTS = (
    TeachersTrainedEvent,
    QueryAnsweredEvent,
    RoundCompletedEvent,
    PrivacyReportReadyEvent,
    RunCompletedEvent,
)

__all__ = [
    'TeachersTrainedEvent',
    'QueryAnsweredEvent',
    'RoundCompletedEvent',
    'PrivacyReportReadyEvent',
    'RunCompletedEvent',
    'ALL_RUN_EVENTS'
]
