import numpy as np
import pytest

from spectrafrac.dims.measures import DiscreteMeasure, cantor_measure


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def isolated_home(tmp_path, monkeypatch):
    """Config and history under tmp_path, working directory inside it."""
    home = tmp_path / "home"
    monkeypatch.setenv("SPECTRAFRAC_HOME", str(home))
    for name in ("SPECTRAFRAC_SEED", "SPECTRAFRAC_JOBS", "SPECTRAFRAC_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    work = tmp_path / "work"
    work.mkdir()
    monkeypatch.chdir(work)
    return home


@pytest.fixture(scope="session")
def cantor14():
    return cantor_measure(14)


@pytest.fixture
def ten_atoms():
    return DiscreteMeasure.from_atoms(np.arange(10.0), np.full(10, 0.1))
