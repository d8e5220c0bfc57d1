"""Logging utilities for MMWaveMC.

Every module logs through ``hlogging.get_logger(__name__)``. Where the
records go is decided once per process, either by the ``logger`` section of
the experiment configuration (a :func:`logging.config.dictConfig` mapping) or,
when any of the variables below is set, by the environment.

Environment Variables:
    MMWAVEMC_LOG_FORMAT: "json" for one JSON object per line, "text" otherwise (default: text)
    MMWAVEMC_LOG_LEVEL: DEBUG, INFO, WARNING or ERROR (default: INFO)
    MMWAVEMC_LOG_FILE: Also write records to this file
    MMWAVEMC_LOG_INCLUDE_LOCATION: Add file, line and function to JSON records (default: false)

Example:
    >>> from MMWaveMC.helpers import hlogging
    >>> _log = hlogging.get_logger(__name__)
    >>> _log.info('nmse: %d axis points', 10)
"""

import json
import logging
import logging.config
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, NamedTuple, Optional

__all__ = [
    "get_logger",
    "configure_logging",
    "configure_from_env",
    "get_context_logger",
    "ContextLogger",
    "StructuredFormatter",
    "rich_stderr_handler",
]

ENV_PREFIX = "MMWAVEMC_LOG_"

_LEVEL_NAMES = ("DEBUG", "INFO", "WARNING", "WARN", "ERROR", "CRITICAL")

_TEXT_FORMAT = "%(asctime)s [%(processName)s] %(levelname)s %(name)s: %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Attributes every LogRecord has; anything else arrived through ``extra``
_RECORD_ATTRIBUTES = frozenset(
    vars(logging.LogRecord("", logging.INFO, "", 0, "", (), None))
) | {"message", "asctime"}


class LogEnv(NamedTuple):
    """Logging settings read from ``MMWAVEMC_LOG_*`` variables."""

    log_format: str
    level: str
    file: str
    include_location: bool

    @classmethod
    def read(cls) -> "LogEnv":
        env = os.environ
        return cls(
            log_format=env.get(ENV_PREFIX + "FORMAT", "text").lower(),
            level=env.get(ENV_PREFIX + "LEVEL", "INFO").upper(),
            file=env.get(ENV_PREFIX + "FILE", ""),
            include_location=env.get(ENV_PREFIX + "INCLUDE_LOCATION", "false").lower() == "true",
        )

    @staticmethod
    def is_set() -> bool:
        return any(ENV_PREFIX + key in os.environ for key in ("FORMAT", "LEVEL", "FILE"))


class StructuredFormatter(logging.Formatter):
    """Format records as single-line JSON objects.

    Fields passed through ``extra`` (or stamped by a :class:`ContextLogger`)
    become top-level keys, so a sweep can be filtered by study, axis value or
    trial. Numpy scalars are unwrapped to plain numbers.

    Example output:
        {"timestamp": "2026-01-15T10:30:00.123Z", "level": "INFO",
         "logger": "MMWaveMC.studies", "message": "nmse: PNR=25 dB ...",
         "service": "mmwavemc", "process": "MainProcess", "study": "nmse"}

    Arguments:
        include_location: Add file, line and function (default: from the environment).
        service_name: Value of the ``service`` key.
    """

    def __init__(self, include_location: Optional[bool] = None, service_name: str = "mmwavemc"):
        super().__init__()
        if include_location is None:
            include_location = LogEnv.read().include_location
        self.include_location = include_location
        self.service_name = service_name

    def format(self, record: logging.LogRecord) -> str:
        stamp = datetime.fromtimestamp(record.created, timezone.utc)
        data: Dict[str, Any] = {
            "timestamp": stamp.isoformat(timespec="milliseconds").replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "service": self.service_name,
            "process": record.processName,
        }
        if self.include_location:
            data["location"] = {
                "file": record.pathname,
                "line": record.lineno,
                "function": record.funcName,
            }
        if record.exc_info and record.exc_info[0] is not None:
            data["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": self.formatException(record.exc_info),
            }
        for key, value in vars(record).items():
            if key not in _RECORD_ATTRIBUTES and not key.startswith("_"):
                data[key] = _plain(value)
        return json.dumps(data, default=str, ensure_ascii=False)


def _plain(value: Any) -> Any:
    # numpy scalars expose item()
    if hasattr(value, "item") and getattr(value, "ndim", 1) == 0:
        return value.item()
    return value


def get_logger(name: str) -> logging.Logger:
    """Return the logger for ``name``, typically ``__name__``."""
    return logging.getLogger(name)


def rich_stderr_handler() -> logging.Handler:
    """Rich console handler on stderr; stdout is reserved for CSV output.

    Referenced from dictConfig mappings as
    ``"()": MMWaveMC.helpers.hlogging.rich_stderr_handler``.
    """
    from rich.console import Console
    from rich.logging import RichHandler

    return RichHandler(console=Console(stderr=True), show_path=False)


def configure_logging(config: Optional[Dict[str, Any]] = None) -> None:
    """Configure logging from a dictConfig mapping.

    Arguments:
        config: A :func:`logging.config.dictConfig` mapping, usually the
            ``logger`` section of the experiment configuration. Without one,
            INFO records go to stderr in plain text.
    """
    if config:
        logging.config.dictConfig(config)
    else:
        logging.basicConfig(level=logging.INFO, format=_TEXT_FORMAT, datefmt=_DATE_FORMAT)


def configure_from_env() -> bool:
    """Configure logging from ``MMWAVEMC_LOG_*`` variables.

    Does nothing unless the format, level or file variable is set, so the
    configuration file stays in charge by default.

    Returns:
        True if the environment configured logging.
    """
    if not LogEnv.is_set():
        return False

    env = LogEnv.read()
    level = env.level if env.level in _LEVEL_NAMES else "INFO"
    formatter = "json" if env.log_format == "json" else "text"

    handlers: Dict[str, Dict[str, Any]] = {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": formatter,
        }
    }
    if env.file:
        Path(env.file).parent.mkdir(parents=True, exist_ok=True)
        handlers["file"] = {
            "class": "logging.FileHandler",
            "filename": env.file,
            "formatter": formatter,
            "encoding": "utf-8",
        }

    configure_logging(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "json": {"()": StructuredFormatter, "include_location": env.include_location},
                "text": {"format": _TEXT_FORMAT, "datefmt": _DATE_FORMAT},
            },
            "handlers": handlers,
            "root": {"level": level, "handlers": list(handlers)},
        }
    )
    get_logger(__name__).debug(
        "hlogging: configured from environment; format=%s level=%s file=%s",
        formatter,
        level,
        env.file or "(none)",
    )
    return True


class ContextLogger(logging.LoggerAdapter):
    """Logger adapter that stamps fixed fields (study name, axis values) on every record.

    Example:
        >>> log = get_context_logger(__name__, study="stopping")
        >>> log.info("stopping: PNR=%g dB done", 10.0)
    """

    def process(self, msg: str, kwargs: Dict[str, Any]) -> tuple:
        kwargs["extra"] = {**kwargs.get("extra", {}), **self.extra}
        return msg, kwargs


def get_context_logger(name: str, **context: Any) -> ContextLogger:
    """Return a :class:`ContextLogger` for ``name`` carrying ``context``."""
    return ContextLogger(get_logger(name), context)
