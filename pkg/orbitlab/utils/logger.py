"""
Logging configuration for orbitlab.

One named logger, ``orbitlab``; the arithmetic modules log through its
children (``orbitlab.padic``, ``orbitlab.localdyn``, ...). Console records
always go to stderr because stdout may carry the JSON report.
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from orbitlab.app_settings import (
    LOG_BACKUP_COUNT,
    LOG_FILE_PATH,
    LOG_LEVEL,
    LOG_MAX_SIZE_MB,
    LOG_TO_FILE,
)

logger = logging.getLogger('orbitlab')

_DETAILED = '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d - %(message)s'


def _resolve_level(verbose: bool, silent: bool, log_level: Optional[str]) -> int:
    if log_level:
        level = logging.getLevelName(log_level.upper())
        if isinstance(level, int):
            return level
    if silent:
        return logging.ERROR
    if verbose:
        return logging.DEBUG
    return logging.getLevelName(LOG_LEVEL)


def setup_logger(verbose: bool = False, silent: bool = False,
                 log_file: Optional[str] = None, log_level: Optional[str] = None,
                 use_color: bool = True) -> logging.Logger:
    """
    Configure the orbitlab logger.

    Args:
        verbose: DEBUG level, with search steps and precision bookkeeping
        silent: ERROR level only
        log_file: Optional path for a rotating log file; LOG_FILE_PATH when
            LOG_TO_FILE is set in app_settings
        log_level: Explicit level name, overrides verbose/silent
        use_color: Render console records through rich

    Returns:
        Configured logger instance
    """
    logger.handlers.clear()
    level = _resolve_level(verbose, silent, log_level)
    logger.setLevel(level)
    logger.propagate = False

    logger.addHandler(_console_handler(level, use_color))

    log_file = log_file or (LOG_FILE_PATH if LOG_TO_FILE else None)
    if log_file:
        _add_file_handler(log_file, level)
    return logger


def _console_handler(level: int, use_color: bool) -> logging.Handler:
    debug = level <= logging.DEBUG
    if use_color:
        handler = RichHandler(console=Console(stderr=True), show_path=debug,
                              show_time=debug, markup=False)
        handler.setFormatter(logging.Formatter('%(message)s'))
    else:
        handler = logging.StreamHandler(sys.stderr)
        fmt = _DETAILED if debug else '%(levelname)s: %(message)s'
        handler.setFormatter(logging.Formatter(fmt, datefmt='%H:%M:%S'))
    handler.setLevel(level)
    return handler


def _add_file_handler(log_file: str, level: int) -> None:
    """
    Attach a rotating file handler; failures only warn.

    Args:
        log_file: Path to log file
        level: Logging level for the handler
    """
    try:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handler = RotatingFileHandler(
            log_file,
            maxBytes=LOG_MAX_SIZE_MB * 1024 * 1024,
            backupCount=LOG_BACKUP_COUNT,
            delay=True,
        )
    except OSError as e:
        logger.warning(f"Could not set up log file {log_file}: {e}")
        return
    handler.setFormatter(logging.Formatter(_DETAILED, datefmt='%Y-%m-%d %H:%M:%S'))
    handler.setLevel(level)
    logger.addHandler(handler)
    logger.debug(f"Logging to file: {log_file}")


def get_logger(name: str) -> logging.Logger:
    """Child logger for an arithmetic module, e.g. ``get_logger('padic')``."""
    return logger.getChild(name)
