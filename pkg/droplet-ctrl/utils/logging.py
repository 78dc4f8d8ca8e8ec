"""
Structured logging infrastructure for droplet-ctrl.
Provides JSON-formatted logging with run, step and iterate context.
"""
import logging
import json
import sys
from datetime import datetime, timezone
from typing import Optional
from pathlib import Path

import numpy as np

ROOT_LOGGER = "droplet_ctrl"


def _to_jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    return value


class JSONFormatter(logging.Formatter):
    """Custom JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        # Step indices, residuals, iterate numbers, file paths
        if hasattr(record, "extra_fields") and isinstance(record.extra_fields, dict):
            log_data.update(
                {key: _to_jsonable(value) for key, value in record.extra_fields.items()}
            )

        if hasattr(record, "error_context"):
            log_data["error_context"] = record.error_context

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[Path] = None,
    enable_json: bool = True
) -> logging.Logger:
    """
    Setup structured logging for droplet-ctrl.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional file path for file logging
        enable_json: Enable JSON formatting (default: True)

    Returns:
        Configured root logger of the package
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(getattr(logging, log_level.upper(), logging.INFO))

    logger.handlers.clear()

    if enable_json:
        formatter: logging.Formatter = JSONFormatter()
    else:
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, log_level.upper(), logging.INFO))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """
    Get a logger below the package root.

    Module names are mapped into the ``droplet_ctrl`` hierarchy, so
    ``get_logger("solver.forward")`` returns ``droplet_ctrl.solver.forward``.

    Args:
        name: Logger name or module ``__name__``

    Returns:
        Logger instance
    """
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")
