"""Test configuration and fixtures."""

import tempfile

import pytest

from overlapix.core.config import Settings, get_settings
from overlapix.models.wigner import WignerEvaluator
from overlapix.services.artifact_service import ArtifactService
from overlapix.services.dv_states import char_table, ghz_state
from overlapix.services.experiments import ExperimentService
from overlapix.workers.trial_pool import TrialPool


class TestSettings(Settings):
    """Test-specific settings."""

    app_env: str = "development"
    debug: bool = True
    log_level: str = "WARNING"
    threads: int = 2


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Pin worker count and reset the cached settings around every test."""
    monkeypatch.setenv("OVERLAPIX_THREADS", "2")
    monkeypatch.setenv("OVERLAPIX_LOG_LEVEL", "WARNING")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def test_settings() -> TestSettings:
    """Get test settings."""
    return TestSettings()


@pytest.fixture
def temp_dir():
    """Create temporary directory for test files."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def artifact_service(test_settings, temp_dir) -> ArtifactService:
    """Artifact service writing below a temporary directory."""
    test_settings.output_dir = temp_dir
    return ArtifactService(test_settings)


@pytest.fixture
def trial_pool() -> TrialPool:
    return TrialPool(max_workers=2)


@pytest.fixture
def experiment_service(trial_pool) -> ExperimentService:
    return ExperimentService(pool=trial_pool)


@pytest.fixture
def vacuum() -> WignerEvaluator:
    return WignerEvaluator.fock(0)


@pytest.fixture
def ghz3():
    return ghz_state(3)


@pytest.fixture
def ghz3_table(ghz3):
    return char_table(ghz3)
