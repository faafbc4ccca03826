from __future__ import annotations

import pytest

from involcode.config import DEFAULT_SETTINGS, EngineSettings
from involcode.errors import InputError


def test_defaults():
    assert DEFAULT_SETTINGS.max_subdivisions == 3
    assert DEFAULT_SETTINGS.collapse
    assert DEFAULT_SETTINGS.audit_log is None


def test_from_env_reads_every_knob():
    settings = EngineSettings.from_env(
        {
            "INVOLCODE_MAX_SUBDIV": "5",
            "INVOLCODE_SPARSE_THRESHOLD": "0.1",
            "INVOLCODE_SPARSE_MIN_ENTRIES": "10",
            "INVOLCODE_COLLAPSE": "0",
            "INVOLCODE_ENUM_LIMIT": "12",
            "INVOLCODE_AUDIT_LOG": "/tmp/audit.jsonl",
        }
    )
    assert settings == EngineSettings(
        max_subdivisions=5,
        sparse_threshold=0.1,
        sparse_min_entries=10,
        collapse=False,
        enumeration_limit=12,
        audit_log="/tmp/audit.jsonl",
    )


def test_blank_env_values_fall_back_to_defaults():
    assert EngineSettings.from_env({"INVOLCODE_MAX_SUBDIV": "  "}) == EngineSettings()


@pytest.mark.parametrize(
    "env",
    [{"INVOLCODE_MAX_SUBDIV": "three"}, {"INVOLCODE_SPARSE_THRESHOLD": "dense"}],
)
def test_from_env_rejects_garbage(env):
    with pytest.raises(InputError, match="must be"):
        EngineSettings.from_env(env)


@pytest.mark.parametrize(
    "kwargs",
    [{"max_subdivisions": -1}, {"sparse_threshold": 1.5}, {"sparse_min_entries": -2}, {"enumeration_limit": -1}],
)
def test_out_of_range_settings(kwargs):
    with pytest.raises(InputError):
        EngineSettings(**kwargs)


def test_overrides_skip_none():
    base = EngineSettings(max_subdivisions=2)
    assert base.with_overrides(max_subdivisions=None, collapse=False) == EngineSettings(max_subdivisions=2, collapse=False)
    with pytest.raises(InputError):
        base.with_overrides(max_subdivisions=-3)
