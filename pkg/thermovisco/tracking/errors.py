import traceback
from typing import Any, Dict, Optional

import structlog

__all__ = [
    "log_exception",
]

log = structlog.stdlib.get_logger("exceptions")


def log_exception(ex: Exception, extra: Optional[Dict] = None, **kwargs: Any) -> None:
    """Log the exception together with its structured details.

    Args:
    ex (``Exception``):
        Raised exception during a run.
    extra (``dict``, `optional`):
        Additional metadata for the exception.
    """
    exception_class = type(ex).__name__
    details = getattr(ex, "details", None)

    if extra is None:
        extra = {}

    log.error(
        str(ex),
        exception_class=exception_class,
        details=details,
        backtrace=traceback.format_exc(),
        extra=extra,
        **kwargs,
    )
