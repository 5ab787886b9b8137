"""
Command bus routing run commands to the handlers that execute them.
"""
from typing import Any, Dict, Generic, List, Type, TypeVar

from pydantic import BaseModel

from veilvote.domain.exceptions import ConsistencyError, UsageError
from veilvote.infrastructure.logging import get_logger

logger = get_logger(__name__)

C = TypeVar('C', bound=BaseModel)
R = TypeVar('R')


class CommandHandler(Generic[C, R]):
    """Executes one kind of run command."""

    def handle(self, command: C) -> R:
        raise NotImplementedError("Subclasses must implement handle method")


class CommandBus:
    """
    One handler per command type.

    Commands are pydantic models; a run command carries its seed, which is
    logged with every dispatch.
    """

    def __init__(self):
        self._handlers: Dict[Type[BaseModel], CommandHandler] = {}

    def register(self, command_type: Type[C], handler: CommandHandler[C, Any]) -> None:
        """Bind a handler; a second handler for the same command type is an error."""
        if not (isinstance(command_type, type) and issubclass(command_type, BaseModel)):
            raise UsageError(f"commands must be pydantic models, got {command_type!r}")
        if command_type in self._handlers:
            raise ConsistencyError(f"{command_type.__name__} already has a handler: "
                                   f"{type(self._handlers[command_type]).__name__}")
        self._handlers[command_type] = handler

    def registered_types(self) -> List[str]:
        return sorted(command_type.__name__ for command_type in self._handlers)

    def dispatch(self, command: C) -> Any:
        """Run the handler registered for the command's exact type."""
        handler = self._handlers.get(type(command))
        if not handler:
            raise UsageError(f"No handler registered for command type {type(command).__name__}")
        logger.debug("Dispatching command", context={"command": type(command).__name__,
                                                     "seed": getattr(command, "seed", None)})
        return handler.handle(command)
