﻿from __future__ import annotations

import logging
import os

from dotenv import load_dotenv

_ROOT_LOGGER = "lakevort"
_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_configured = False


def _resolve_level(value: str | None) -> int:
    if value is None or value.strip() == "":
        return logging.WARNING
    level = logging.getLevelName(value.strip().upper())
    return level if isinstance(level, int) else logging.WARNING


def configure_logging(level: str | None = None) -> None:
    global _configured
    load_dotenv(override=False)
    root = logging.getLogger(_ROOT_LOGGER)
    root.setLevel(_resolve_level(level if level is not None else os.getenv("LAKEVORT_LOG")))
    if not _configured:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        root.addHandler(handler)
        _configured = True


def get_logger(name: str) -> logging.Logger:
    if not _configured:
        configure_logging()
    if name == _ROOT_LOGGER or name.startswith(_ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{_ROOT_LOGGER}.{name}")
