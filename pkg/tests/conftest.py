"""Shared fixtures for the test suite."""

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from src.hilbert.two_site import TwoSiteParams, build_two_site

settings.register_profile(
    "separability",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "separability"))


@pytest.fixture
def demo_params():
    """Two-site parameters with an exactly degenerate middle pair at -2."""
    return TwoSiteParams(omega0=6, omega_d=2 + 2j, V00=1.5, V0x=1, Vxx=0.5, J0x=1)


@pytest.fixture
def generic_params():
    """Two-site parameters with a non-degenerate spectrum."""
    return TwoSiteParams(omega0=6, omega_d=3 + 3j, V00=1.5, V0x=1, Vxx=1, J0x=1)


@pytest.fixture
def demo_H(demo_params):
    return build_two_site(demo_params)


@pytest.fixture
def generic_H(generic_params):
    return build_two_site(generic_params)


@pytest.fixture
def fresh_db(tmp_path, monkeypatch):
    """Point the database module at an empty SQLite file."""
    monkeypatch.setenv("DATABASE_URL", f"sqlite:///{tmp_path / 'runs.db'}")

    from src.database import db
    db._engine = None
    db._SessionLocal = None

    db.init_db()
    yield db
    db.drop_db()
    db._engine = None
    db._SessionLocal = None


@pytest.fixture
def random_hermitian():
    """Factory for seeded random Hermitian matrices."""

    def _make(n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return (A + A.conj().T) / 2

    return _make
