"""Tests for utils.logger."""

import logging
from logging.handlers import RotatingFileHandler

from orbitlab.utils.logger import get_logger, setup_logger


def test_levels():
    assert setup_logger(silent=True).level == logging.ERROR
    assert setup_logger(verbose=True).level == logging.DEBUG
    assert setup_logger(silent=True, log_level="warning").level == logging.WARNING


def test_unknown_level_name_falls_back():
    assert setup_logger(verbose=True, log_level="chatty").level == logging.DEBUG


def test_file_handler_in_new_directory(tmp_path):
    path = tmp_path / "logs" / "run.log"
    log = setup_logger(log_file=str(path), use_color=False)
    assert any(isinstance(h, RotatingFileHandler) for h in log.handlers)
    assert path.parent.is_dir()
    for h in log.handlers:
        h.close()
    setup_logger(silent=True)


def test_child_loggers_share_the_root():
    assert get_logger("padic").name == "orbitlab.padic"
