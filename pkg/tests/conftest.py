"""Shared fixtures; importing the strategies module loads the hypothesis profile."""

import pytest

import tests.strategies  # noqa: F401
from bulk_reach.core.settings_manager import EngineSettings


@pytest.fixture
def settings():
    """Engine defaults independent of any settings file on the machine."""
    return EngineSettings()
