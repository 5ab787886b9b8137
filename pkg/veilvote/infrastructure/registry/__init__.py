"""
Handler registry.
"""
from veilvote.infrastructure.registry.handler_registry import (
    HandlerRegistry,
    FederationRuntime,
    create_handler_registry,
    create_federation_runtime
)

__all__ = ['HandlerRegistry', 'FederationRuntime', 'create_handler_registry', 'create_federation_runtime']
