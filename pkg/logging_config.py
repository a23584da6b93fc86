"""
Logging configuration for the LQ Stackelberg Solver.

Console records go to stderr; stdout is reserved for result tables.
"""

from datetime import datetime, timezone
from typing import Any, Dict, Optional
import json
import logging
import logging.config
import os
import time

LOGGER_NAMESPACE = "lq_stackelberg"
MAX_LOG_BYTES = 10 * 1024 * 1024
LOG_BACKUPS = 5

# Attributes every LogRecord carries; anything else was passed through ``extra``.
_RECORD_ATTRS = frozenset(logging.LogRecord("", 0, "", 0, "", (), None).__dict__) | {"message", "asctime"}

# Copied to top-level JSON keys.
_CONTEXT_KEYS = ("run_id", "command")


class JSONFormatter(logging.Formatter):
    """One JSON object per record, with ``extra`` fields kept under ``extra``."""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "location": f"{record.module}.{record.funcName}:{record.lineno}"
        }

        extra_fields = {k: v for k, v in record.__dict__.items() if k not in _RECORD_ATTRS}
        for key in _CONTEXT_KEYS:
            if key in extra_fields:
                log_entry[key] = extra_fields[key]
        if extra_fields:
            log_entry["extra"] = extra_fields
        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)


class ColoredFormatter(logging.Formatter):
    """Level-colored console lines; plain when ``NO_COLOR`` is set."""

    LEVEL_COLORS = {
        logging.DEBUG: "\033[36m",
        logging.INFO: "\033[32m",
        logging.WARNING: "\033[33m",
        logging.ERROR: "\033[31m",
        logging.CRITICAL: "\033[35m"
    }
    RESET = "\033[0m"

    def __init__(self, use_color: Optional[bool] = None):
        super().__init__(datefmt="%H:%M:%S")
        self.use_color = "NO_COLOR" not in os.environ if use_color is None else use_color

    def format(self, record: logging.LogRecord) -> str:
        line = f"{self.formatTime(record, self.datefmt)} {record.levelname:<8} {record.name} - {record.getMessage()}"
        if record.exc_info:
            line += "\n" + self.formatException(record.exc_info)
        if not self.use_color:
            return line
        return f"{self.LEVEL_COLORS.get(record.levelno, '')}{line}{self.RESET}"


def _file_handler(filename: str, level: str, formatter: str) -> Dict[str, Any]:
    return {
        "class": "logging.handlers.RotatingFileHandler",
        "level": level,
        "formatter": formatter,
        "filename": filename,
        "maxBytes": MAX_LOG_BYTES,
        "backupCount": LOG_BACKUPS,
        "encoding": "utf8"
    }


def get_logging_config(
    log_level: str = "WARNING",
    log_file: Optional[str] = None,
    enable_json_logging: bool = False,
    enable_console_logging: bool = True
) -> Dict[str, Any]:
    """
    Build the ``dictConfig`` mapping.

    Everything is attached to the root logger, so module loggers in
    ``services/`` and ``repositories/`` and the ``lq_stackelberg.*`` command
    loggers share the same handlers.

    Args:
        log_level: Logging level name
        log_file: Rotating log file; no file handlers are installed when empty.
            Errors are also written to a sibling ``*_errors.log`` file.
        enable_json_logging: Format records as JSON
        enable_console_logging: Log to stderr

    Returns:
        Logging configuration dictionary
    """
    handlers: Dict[str, Dict[str, Any]] = {}

    if log_file:
        os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
        file_format = "json" if enable_json_logging else "detailed"
        stem, ext = os.path.splitext(log_file)
        handlers["file"] = _file_handler(log_file, log_level, file_format)
        handlers["error_file"] = _file_handler(f"{stem}_errors{ext or '.log'}", "ERROR", file_format)

    if enable_console_logging:
        handlers["console"] = {
            "class": "logging.StreamHandler",
            "level": log_level,
            "formatter": "json" if enable_json_logging else "colored",
            "stream": "ext://sys.stderr"
        }

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "detailed": {
                "format": "%(asctime)s %(levelname)-8s %(name)s:%(lineno)d %(funcName)s() - %(message)s"
            },
            "json": {"()": JSONFormatter},
            "colored": {"()": ColoredFormatter}
        },
        "handlers": handlers,
        "root": {"level": log_level, "handlers": list(handlers)}
    }


def _env_flag(key: str, default: bool) -> bool:
    raw = os.getenv(key)
    return default if raw is None else raw.strip().lower() in ("1", "true", "yes", "on")


def setup_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    enable_json_logging: Optional[bool] = None,
    enable_console_logging: Optional[bool] = None
) -> None:
    """
    Configure logging for one CLI run.

    Arguments left as None fall back to ``LOG_LEVEL`` (WARNING),
    ``LOG_FILE`` (unset), ``ENABLE_JSON_LOGGING`` (false) and
    ``ENABLE_CONSOLE_LOGGING`` (true).
    """
    log_level = (log_level or os.getenv("LOG_LEVEL") or "WARNING").upper()
    log_file = log_file or os.getenv("LOG_FILE") or None
    if enable_json_logging is None:
        enable_json_logging = _env_flag("ENABLE_JSON_LOGGING", False)
    if enable_console_logging is None:
        enable_console_logging = _env_flag("ENABLE_CONSOLE_LOGGING", True)

    logging.config.dictConfig(get_logging_config(
        log_level=log_level,
        log_file=log_file,
        enable_json_logging=enable_json_logging,
        enable_console_logging=enable_console_logging
    ))
    get_logger("logging").debug(
        f"Logging configured at {log_level}",
        extra={"log_file": log_file, "json_logging": enable_json_logging}
    )


def get_logger(name: str) -> logging.Logger:
    """Logger under the ``lq_stackelberg`` namespace."""
    return logging.getLogger(f"{LOGGER_NAMESPACE}.{name}")


class CommandLoggingContext:
    """
    Log the start, completion and failure of one CLI command.

    Every record carries the run id (the spec digest prefix), the command
    name and the spec path.
    """

    def __init__(self, run_id: str, command: str, path: str):
        self.run_id = run_id
        self.command = command
        self.path = path
        self.logger = get_logger("command")
        self._started = None

    def _extra(self, **kwargs) -> Dict[str, Any]:
        return {"run_id": self.run_id, "command": self.command, "path": self.path, **kwargs}

    def __enter__(self):
        self._started = time.perf_counter()
        self.logger.info(f"Command started: {self.command} {self.path}", extra=self._extra())
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        duration = time.perf_counter() - self._started
        if exc_type is None:
            self.logger.info(
                f"Command completed: {self.command} {self.path}",
                extra=self._extra(duration_seconds=round(duration, 6))
            )
        else:
            self.logger.error(
                f"Command failed: {self.command} {self.path}",
                extra=self._extra(
                    duration_seconds=round(duration, 6),
                    exception_type=exc_type.__name__,
                    exception_message=str(exc_val) if exc_val else None
                )
            )

    def log_info(self, message: str, **kwargs):
        self.logger.info(message, extra=self._extra(**kwargs))

    def log_warning(self, message: str, **kwargs):
        self.logger.warning(message, extra=self._extra(**kwargs))
