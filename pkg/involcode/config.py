from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional

from .errors import InputError

DEFAULT_MAX_SUBDIVISIONS = 3
DEFAULT_SPARSE_THRESHOLD = 0.02
DEFAULT_SPARSE_MIN_ENTRIES = 40_000
DEFAULT_ENUMERATION_LIMIT = 28


def _env_int(env: Mapping[str, str], key: str, default: int) -> int:
    raw = env.get(key, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{key} must be an integer, got {raw!r}") from exc


def _env_float(env: Mapping[str, str], key: str, default: float) -> float:
    raw = env.get(key, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise InputError(f"{key} must be a number, got {raw!r}") from exc


@dataclass(frozen=True)
class EngineSettings:
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS
    # Density at or below which large reductions take the sparse path.
    sparse_threshold: float = DEFAULT_SPARSE_THRESHOLD
    sparse_min_entries: int = DEFAULT_SPARSE_MIN_ENTRIES
    collapse: bool = True
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT
    audit_log: Optional[str] = None

    def __post_init__(self) -> None:
        if self.max_subdivisions < 0:
            raise InputError(f"subdivision budget must be >= 0, got {self.max_subdivisions}")
        if not 0.0 <= self.sparse_threshold <= 1.0:
            raise InputError(f"sparse threshold must lie in [0, 1], got {self.sparse_threshold}")
        if self.sparse_min_entries < 0:
            raise InputError(f"sparse minimum size must be >= 0, got {self.sparse_min_entries}")
        if self.enumeration_limit < 0:
            raise InputError(f"enumeration limit must be >= 0, got {self.enumeration_limit}")

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> "EngineSettings":
        env = os.environ if env is None else env
        return cls(
            max_subdivisions=_env_int(env, "INVOLCODE_MAX_SUBDIV", DEFAULT_MAX_SUBDIVISIONS),
            sparse_threshold=_env_float(env, "INVOLCODE_SPARSE_THRESHOLD", DEFAULT_SPARSE_THRESHOLD),
            sparse_min_entries=_env_int(env, "INVOLCODE_SPARSE_MIN_ENTRIES", DEFAULT_SPARSE_MIN_ENTRIES),
            collapse=env.get("INVOLCODE_COLLAPSE", "1") != "0",
            enumeration_limit=_env_int(env, "INVOLCODE_ENUM_LIMIT", DEFAULT_ENUMERATION_LIMIT),
            audit_log=env.get("INVOLCODE_AUDIT_LOG") or None,
        )

    # None means "keep the current value" so argparse defaults can pass through.
    def with_overrides(self, **overrides: Any) -> "EngineSettings":
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes)


DEFAULT_SETTINGS = EngineSettings()
