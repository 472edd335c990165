"""
Tests for Settings.
"""

import pytest

from riesz_core.errors import DomainError
from riesz_core.settings import DEFAULT_CAP_BLOCKS, WALK_CAP, Settings


def test_defaults():
    settings = Settings.from_env({})
    assert settings.cap_blocks == DEFAULT_CAP_BLOCKS
    assert settings.walk_cap == WALK_CAP
    assert settings.seed == 0


def test_environment_overrides():
    settings = Settings.from_env({"RIESZ_CAP_BLOCKS": "8", "RIESZ_SEED": "42", "OTHER": "x"})
    assert settings.cap_blocks == 8
    assert settings.seed == 42
    assert settings.family_cap == Settings().family_cap


def test_not_an_integer():
    with pytest.raises(DomainError, match="RIESZ_WALK_CAP must be an integer"):
        Settings.from_env({"RIESZ_WALK_CAP": "five"})


def test_negative():
    with pytest.raises(DomainError, match="non-negative"):
        Settings.from_env({"RIESZ_FAMILY_CAP": "-1"})


def test_with_overrides_skips_none():
    settings = Settings().with_overrides(cap_blocks=None, future_cap=3)
    assert settings.cap_blocks == DEFAULT_CAP_BLOCKS
    assert settings.future_cap == 3
