"""Structured JSON-lines logging shared by every involcode channel."""
from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Optional

ROOT_CHANNEL = "involcode"
_RESERVED = set(logging.LogRecord("", 0, "", 0, "", (), None).__dict__) | {"message", "asctime"}


def get_logger(channel: str) -> logging.Logger:
    name = channel if channel.startswith(ROOT_CHANNEL) else f"{ROOT_CHANNEL}.{channel}"
    return logging.getLogger(name)


class JsonLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        out: dict[str, Any] = {
            "ts": round(record.created, 3),
            "channel": record.name,
            "level": record.levelname.lower(),
            "event": getattr(record, "event", None) or record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key in _RESERVED or key == "event":
                continue
            out[key] = value
        if record.exc_info:
            out["exc"] = self.formatException(record.exc_info)
        return json.dumps(out, ensure_ascii=True, sort_keys=True, default=str)


def audit_event(logger: logging.Logger, event: str, level: int = logging.INFO, **payload: Any) -> None:
    if not logger.isEnabledFor(level):
        return
    extra = {"event": event}
    for key, value in payload.items():
        # Payload keys must not clobber LogRecord attributes.
        extra[key if key not in _RESERVED else f"{key}_"] = value
    logger.log(level, event, extra=extra)


def configure_logging(level: str = "warning", audit_path: Optional[str] = None) -> logging.Logger:
    root = logging.getLogger(ROOT_CHANNEL)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.setLevel(logging.DEBUG)
    root.propagate = False

    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(getattr(logging, level.upper(), logging.WARNING))
    stderr_handler.setFormatter(JsonLineFormatter())
    root.addHandler(stderr_handler)

    if audit_path:
        path = Path(audit_path).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, mode="a", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(JsonLineFormatter())
        root.addHandler(file_handler)
    return root


class StageTimer:
    """Collects wall-clock time per pipeline stage."""

    def __init__(self) -> None:
        self.timings: dict[str, float] = {}

    def stage(self, name: str) -> "_Stage":
        return _Stage(self, name)


class _Stage:
    def __init__(self, timer: StageTimer, name: str) -> None:
        self.timer = timer
        self.name = name
        self.start = 0.0

    def __enter__(self) -> "_Stage":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *_exc: Any) -> None:
        elapsed = time.perf_counter() - self.start
        self.timer.timings[self.name] = self.timer.timings.get(self.name, 0.0) + elapsed
