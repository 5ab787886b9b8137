"""
Event subscriber that turns run events into business-event log lines.
"""
from pydantic import BaseModel

from veilvote.infrastructure.event_bus import EventSubscriber
from veilvote.infrastructure.logging import get_logger


class RunEventLogger(EventSubscriber[BaseModel]):
    """Log every run event it receives."""

    def __init__(self, logger_name: str = "runs.events"):
        self.logger = get_logger(logger_name)
        self.received = 0

    def handle(self, event: BaseModel) -> None:
        self.received += 1
        payload = event.model_dump()
        run_id = payload.pop("run_id", "unknown")
        self.logger.debug(
            type(event).__name__,
            context={"run_id": run_id, **payload},
        )
