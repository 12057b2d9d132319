import logging
import os
from typing import Optional, Union

import coloredlogs

LOG_LEVEL_ENV: str = "OTMAP_LOG_LEVEL"


def get_logger(name: str = "otmap", level: Optional[Union[int, str]] = None) -> logging.Logger:
    """Returns logger.

    If `level` is not specified, the level is read from the environment variable
    `OTMAP_LOG_LEVEL` and falls back to INFO.

    Args:
        name (str): Logger name. Defaults to "otmap".
        level (Optional[Union[int, str]]): Logging level. Defaults to None.

    Returns:
        logger (logging.Logger): Logger.
    """
    if level is None:
        level = os.environ.get(LOG_LEVEL_ENV, "INFO")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    logger = logging.getLogger(name)
    logger.handlers.clear()
    logger.propagate = False
    logger.setLevel(level)

    # log handler
    handler = logging.StreamHandler()
    handler.setLevel(level)

    # formatter
    formatter = coloredlogs.ColoredFormatter(
        fmt="[%(asctime)s] [%(levelname)s] [func] %(funcName)s [line] %(lineno)d: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        level_styles={
            "critical": {"color": "red", "bold": True},
            "error": {"color": "red"},
            "warning": {"color": "yellow"},
            "info": {},
            "debug": {"color": "green"},
        },
        field_styles={
            "asctime": {"color": "green"},
            "levelname": {"color": "cyan", "bold": True},
            "funcName": {"color": "blue"},
            "lineno": {"color": "blue", "bold": True},
        },
    )

    handler.setFormatter(formatter)
    logger.addHandler(handler)

    return logger


def set_log_level(level: Union[int, str], name: str = "otmap") -> None:
    """Change the level of an existing logger and its handlers.

    Args:
        level (Union[int, str]): New level, e.g. "DEBUG" or logging.DEBUG.
        name (str): Logger name. Defaults to "otmap".
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    logger = logging.getLogger(name)
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)
