"""
Run correlation ids for separating logs of concurrent runs.
"""
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

# Context variable to store correlation ID
_correlation_id: ContextVar[Optional[str]] = ContextVar('correlation_id', default=None)


def get_correlation_id() -> Optional[str]:
    """Get current correlation ID from context."""
    return _correlation_id.get()


def run_correlation_id(scheme: str, seed: int) -> str:
    """Deterministic correlation id for one harness run."""
    return f"{scheme.lower()}-seed{seed}"


@contextmanager
def correlation_scope(correlation_id: str) -> Iterator[str]:
    """Bind a correlation id for the duration of a block, restoring the previous one."""
    token = _correlation_id.set(correlation_id)
    try:
        yield correlation_id
    finally:
        _correlation_id.reset(token)
