"""
Handler registry for automatic discovery and registration.
"""
import importlib
import inspect
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Type

from veilvote.infrastructure.command_bus import CommandBus, CommandHandler
from veilvote.infrastructure.event_bus import EventBus, EventSubscriber
from veilvote.infrastructure.logging import get_logger
from veilvote.infrastructure.parsers.csv_parsers import MarginsCsvParser
from veilvote.infrastructure.query_bus import QueryBus, QueryHandler

logger = get_logger(__name__)

HANDLER_MODULES = (
    "run_handlers",
    "query_handlers",
    "event_logger",
)


class HandlerRegistry:
    """Registry for automatic handler discovery and registration."""

    def __init__(self, command_bus: CommandBus, query_bus: QueryBus, event_bus: EventBus):
        self.command_bus = command_bus
        self.query_bus = query_bus
        self.event_bus = event_bus
        self.subscribers: List[EventSubscriber] = []

    def discover_handlers(self, base_path: str = "veilvote.application.handlers") -> Dict[str, List[Type]]:
        """
        Discover all handler classes in the handlers package.

        Returns:
            Dictionary mapping handler kinds to lists of handler classes
        """
        handlers = {
            'command_handlers': [],
            'query_handlers': [],
            'event_handlers': []
        }

        for short_name in HANDLER_MODULES:
            module_name = f"{base_path}.{short_name}"
            module = importlib.import_module(module_name)
            for _, obj in inspect.getmembers(module, inspect.isclass):
                if obj.__module__ != module_name:
                    continue
                if issubclass(obj, CommandHandler) and obj is not CommandHandler:
                    handlers['command_handlers'].append(obj)
                elif issubclass(obj, QueryHandler) and obj is not QueryHandler:
                    handlers['query_handlers'].append(obj)
                elif issubclass(obj, EventSubscriber) and obj is not EventSubscriber:
                    handlers['event_handlers'].append(obj)

        return handlers

    def _extract_generic_types(self, handler_class: Type) -> Tuple[Optional[Type], Optional[Type]]:
        """
        Extract command/query and result types from a generic handler class.

        Returns:
            Tuple of (request_type, response_type)
        """
        for base in getattr(handler_class, '__orig_bases__', ()):
            args = getattr(base, '__args__', ())
            if len(args) >= 2:
                return args[0], args[1]

        sig = inspect.signature(handler_class.handle)
        params = list(sig.parameters.values())
        if len(params) >= 2:
            return params[1].annotation, sig.return_annotation
        return None, None

    def auto_register_handlers(self, dependencies: Dict[str, Any],
                               event_types: Optional[List[Type]] = None) -> None:
        """
        Discover handlers and register them with their dependencies.

        Args:
            dependencies: Available dependencies for injection
            event_types: Event types every discovered subscriber listens to
        """
        handlers = self.discover_handlers()

        for handler_class in handlers['command_handlers']:
            request_type, _ = self._extract_generic_types(handler_class)
            self.command_bus.register(request_type, self._create_handler_instance(handler_class, dependencies))
            logger.debug("Registered command handler",
                         context={"handler": handler_class.__name__, "command": request_type.__name__})

        for handler_class in handlers['query_handlers']:
            request_type, _ = self._extract_generic_types(handler_class)
            self.query_bus.register(request_type, self._create_handler_instance(handler_class, dependencies))
            logger.debug("Registered query handler",
                         context={"handler": handler_class.__name__, "query": request_type.__name__})

        for handler_class in handlers['event_handlers']:
            subscriber = self._create_handler_instance(handler_class, dependencies)
            self.subscribers.append(subscriber)
            self.event_bus.subscribe_all(event_types or [], subscriber)

    def _create_handler_instance(self, handler_class: Type, dependencies: Dict[str, Any]) -> Any:
        """
        Create a handler instance with dependency injection.

        Dependencies match by name first, then by type annotation.

        Args:
            handler_class: Handler class to instantiate
            dependencies: Available dependencies

        Returns:
            Handler instance
        """
        sig = inspect.signature(handler_class.__init__)
        kwargs = {}
        for param_name, param in sig.parameters.items():
            if param_name == 'self' or param.kind in (param.VAR_POSITIONAL, param.VAR_KEYWORD):
                continue
            if param_name in dependencies:
                kwargs[param_name] = dependencies[param_name]
                continue
            if param.annotation is not inspect.Parameter.empty and inspect.isclass(param.annotation):
                match = next((dep for dep in dependencies.values() if isinstance(dep, param.annotation)), None)
                if match is not None:
                    kwargs[param_name] = match
                    continue
            if param.default is inspect.Parameter.empty:
                raise ValueError(f"Cannot resolve dependency '{param_name}' for {handler_class.__name__}")

        return handler_class(**kwargs)

    def get_registered_handlers(self) -> Dict[str, Any]:
        """Get summary of registered handlers."""
        return {
            'command_handlers': list(self.command_bus._handlers.keys()),
            'query_handlers': list(self.query_bus._handlers.keys()),
            'event_subscribers': [type(subscriber).__name__ for subscriber in self.subscribers],
            'total_handlers': len(self.command_bus._handlers) + len(self.query_bus._handlers)
        }


def create_handler_registry(command_bus: CommandBus, query_bus: QueryBus, event_bus: EventBus) -> HandlerRegistry:
    """Factory function to create handler registry."""
    return HandlerRegistry(command_bus, query_bus, event_bus)


@dataclass
class FederationRuntime:
    """Buses wired with every handler."""
    command_bus: CommandBus
    query_bus: QueryBus
    event_bus: EventBus
    registry: HandlerRegistry
    dependencies: Dict[str, Any] = field(default_factory=dict)


def create_federation_runtime() -> FederationRuntime:
    """
    Build fresh buses and register all discovered handlers on them.

    Returns:
        FederationRuntime
    """
    from veilvote.domain.events import ALL_RUN_EVENTS

    command_bus, query_bus, event_bus = CommandBus(), QueryBus(), EventBus()
    registry = create_handler_registry(command_bus, query_bus, event_bus)
    dependencies = {
        "event_bus": event_bus,
        "margins_parser": MarginsCsvParser(),
    }
    registry.auto_register_handlers(dependencies, event_types=list(ALL_RUN_EVENTS))
    return FederationRuntime(command_bus, query_bus, event_bus, registry, dependencies)
