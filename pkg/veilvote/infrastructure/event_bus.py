"""
Event bus for run lifecycle events.

Harness runs publish from worker threads, so subscription and the
subscriber snapshot taken by publish share one lock.
"""
import threading
from typing import Dict, Generic, Iterable, List, Type, TypeVar

from pydantic import BaseModel

E = TypeVar('E', bound=BaseModel)


class EventSubscriber(Generic[E]):
    """Receives run events."""

    def handle(self, event: E) -> None:
        raise NotImplementedError("Subclasses must implement handle method")


class EventBus:
    """Delivers each event to the subscribers of its exact type, in subscription order."""

    def __init__(self):
        self._subscribers: Dict[Type[BaseModel], List[EventSubscriber]] = {}
        self._lock = threading.Lock()

    def subscribe(self, event_type: Type[E], subscriber: EventSubscriber[E]) -> None:
        with self._lock:
            self._subscribers.setdefault(event_type, []).append(subscriber)

    def subscribe_all(self, event_types: Iterable[Type[BaseModel]], subscriber: EventSubscriber) -> None:
        """Subscribe one subscriber to several event types."""
        for event_type in event_types:
            self.subscribe(event_type, subscriber)

    def subscriber_count(self, event_type: Type[BaseModel]) -> int:
        with self._lock:
            return len(self._subscribers.get(event_type, []))

    def publish(self, event: E) -> None:
        with self._lock:
            subscribers = list(self._subscribers.get(type(event), []))
        for subscriber in subscribers:
            subscriber.handle(event)


event_bus = EventBus()
