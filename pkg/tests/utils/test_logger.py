import logging

from otmap.utils import get_logger, set_log_level


def test_get_logger_env(monkeypatch):
    monkeypatch.setenv("OTMAP_LOG_LEVEL", "WARNING")
    logger = get_logger("otmap.test")
    assert logger.level == logging.WARNING
    assert len(logger.handlers) == 1


def test_set_log_level():
    logger = get_logger("otmap.test", level="INFO")
    set_log_level("DEBUG", name="otmap.test")
    assert logger.level == logging.DEBUG
    assert all(h.level == logging.DEBUG for h in logger.handlers)
