import logging
import sys
from typing import Dict
from pythonjsonlogger import jsonlogger
from config.settings import settings

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'

_loggers: Dict[str, logging.Logger] = {}


def _build_formatter() -> logging.Formatter:
    if settings.LOG_FORMAT == "json":
        return jsonlogger.JsonFormatter(
            '%(asctime)s %(name)s %(levelname)s %(message)s',
            datefmt=_DATEFMT
        )
    return logging.Formatter(_FORMAT, datefmt=_DATEFMT)


def get_logger(name: str) -> logging.Logger:
    """Get configured logger"""
    logger = logging.getLogger(name)

    if not logger.handlers:
        logger.setLevel(getattr(logging, settings.LOG_LEVEL))

        # stdout carries report documents, diagnostics go to stderr
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(getattr(logging, settings.LOG_LEVEL))
        handler.setFormatter(_build_formatter())

        logger.addHandler(handler)

    _loggers[name] = logger
    return logger


def set_log_level(level: str) -> None:
    """Re-level every logger handed out by get_logger"""
    numeric = getattr(logging, level.upper())
    for logger in _loggers.values():
        logger.setLevel(numeric)
        for handler in logger.handlers:
            handler.setLevel(numeric)
