import logging
import sys
from pathlib import Path

import numpy as np
import structlog
from structlog.types import EventDict, Processor

from thermovisco.config import ConfigLogging

__all__ = ["setup_logging"]

# arrays longer than this are logged as a summary
MAX_LOGGED_ARRAY = 16


# https://github.com/hynek/structlog/issues/35#issuecomment-591321744
def rename_event_key(_, __, event_dict: EventDict) -> EventDict:
    """Move the text of the entry from `event` to `message`, the field log shippers read."""
    event_dict["message"] = event_dict.pop("event")

    return event_dict


def add_custom_keys(_, __, event_dict: EventDict) -> EventDict:
    event_dict["type"] = "simulation"
    return event_dict


def numpy_to_plain(_, __, event_dict: EventDict) -> EventDict:
    """
    Solver code logs numpy scalars and small arrays directly. `np.int64` and `np.bool_` are not
    JSON serializable, so every numpy value is converted to its Python counterpart.
    """
    for key, value in event_dict.items():
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
        elif isinstance(value, np.ndarray):
            if value.size <= MAX_LOGGED_ARRAY:
                event_dict[key] = value.tolist()
            else:
                event_dict[key] = {
                    "shape": list(value.shape),
                    "min": float(value.min()),
                    "max": float(value.max()),
                }
        elif isinstance(value, Path):
            event_dict[key] = str(value)

    return event_dict


def _shared_processors(format_json: bool) -> list[Processor]:
    processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.stdlib.ExtraAdder(),
        add_custom_keys,
        numpy_to_plain,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
    ]

    # ConsoleRenderer reads `event` and pretty-prints tracebacks itself
    if format_json:
        processors += [rename_event_key, structlog.processors.format_exc_info]

    return processors


def _build_handler(logging_config: ConfigLogging) -> logging.Handler:
    if logging_config.to_file:
        return logging.FileHandler(filename=str(Path(logging_config.to_file).resolve()), mode="a")

    # stdout is reserved for command output (reports, tables)
    return logging.StreamHandler(sys.stderr)


def log_uncaught_exception(exc_type, exc_value, exc_traceback):
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return

    logging.getLogger().error("Uncaught exception", exc_info=(exc_type, exc_value, exc_traceback))


def setup_logging(logging_config: ConfigLogging):
    shared_processors = _shared_processors(logging_config.format_json)

    structlog.configure(
        processors=shared_processors + [structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    renderer: Processor = (
        structlog.processors.JSONRenderer() if logging_config.format_json else structlog.dev.ConsoleRenderer()
    )

    # foreign_pre_chain only runs on stdlib `logging` entries, e.g. from scipy or multiprocessing
    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
    )

    handler = _build_handler(logging_config)
    handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.addHandler(handler)
    root_logger.setLevel(logging_config.level.upper())

    sys.excepthook = log_uncaught_exception
