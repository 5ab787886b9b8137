"""
Query bus for accountant-only requests (privacy reports, sigma calibration).
"""
from typing import Any, Dict, Generic, List, Type, TypeVar

from pydantic import BaseModel

from veilvote.domain.exceptions import ConsistencyError, UsageError
from veilvote.infrastructure.logging import get_logger

logger = get_logger(__name__)

Q = TypeVar('Q', bound=BaseModel)
R = TypeVar('R')


class QueryHandler(Generic[Q, R]):
    """Answers one kind of query without running any learning."""

    def handle(self, query: Q) -> R:
        raise NotImplementedError("Subclasses must implement handle method")


class QueryBus:
    """One handler per query type."""

    def __init__(self):
        self._handlers: Dict[Type[BaseModel], QueryHandler] = {}

    def register(self, query_type: Type[Q], handler: QueryHandler[Q, Any]) -> None:
        """Bind a handler; a second handler for the same query type is an error."""
        if not (isinstance(query_type, type) and issubclass(query_type, BaseModel)):
            raise UsageError(f"queries must be pydantic models, got {query_type!r}")
        if query_type in self._handlers:
            raise ConsistencyError(f"{query_type.__name__} already has a handler: "
                                   f"{type(self._handlers[query_type]).__name__}")
        self._handlers[query_type] = handler

    def registered_types(self) -> List[str]:
        return sorted(query_type.__name__ for query_type in self._handlers)

    def dispatch(self, query: Q) -> Any:
        handler = self._handlers.get(type(query))
        if not handler:
            raise UsageError(f"No handler registered for query type {type(query).__name__}")
        logger.debug("Answering query", context={"query": type(query).__name__})
        return handler.handle(query)
