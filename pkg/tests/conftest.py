from pathlib import Path
import sys

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from termalg.theory.loader import load_theory, resolve_theory_path  # noqa: E402


@pytest.fixture
def load():
    """Load a shipped theory by name (rb, sg, lz, ...)."""

    def _load(name: str):
        return load_theory(resolve_theory_path(name))

    return _load


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch):
    for key in (
        "TERMALG_DATA_DIR",
        "TERMALG_N_JOBS",
        "TERMALG_TERM_SIZE",
        "TERMALG_STEPS",
        "TERMALG_MODEL_SIZE",
        "TERMALG_PROBE_SAMPLES",
        "TERMALG_SIGMA_R_CLOSURE",
    ):
        monkeypatch.delenv(key, raising=False)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs a probe or search at its full default budget")
