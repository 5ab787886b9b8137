"""
Logging infrastructure for veilvote.
"""
from veilvote.infrastructure.logging.structured_logger import (
    StructuredFormatter,
    StructuredLogger,
    get_logger,
    setup_structured_logging
)
from veilvote.infrastructure.logging.decorators import (
    log_execution_time,
    log_errors
)
from veilvote.infrastructure.logging.correlation import (
    get_correlation_id,
    run_correlation_id,
    correlation_scope
)
from veilvote.infrastructure.logging.progress import ProgressTracker

__all__ = [
    'StructuredFormatter',
    'StructuredLogger',
    'get_logger',
    'setup_structured_logging',
    'log_execution_time',
    'log_errors',
    'get_correlation_id',
    'run_correlation_id',
    'correlation_scope',
    'ProgressTracker'
]
