from __future__ import annotations

import logging
import sys

from pythonjsonlogger.json import JsonFormatter

_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "INFO", json_output: bool = True) -> None:
    """Route package logs to stderr, as JSON lines unless disabled."""
    handler = logging.StreamHandler(sys.stderr)
    if json_output:
        handler.setFormatter(JsonFormatter(_FORMAT, rename_fields={"levelname": "level"}))
    else:
        handler.setFormatter(logging.Formatter(_FORMAT))
    root = logging.getLogger("ppi")
    root.handlers[:] = [handler]
    root.setLevel(level.upper())
    root.propagate = False
