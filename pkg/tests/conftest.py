"""Shared pytest fixtures for FixCert tests."""

from __future__ import annotations

import os
from pathlib import Path

import pytest

# Keep test startup deterministic even when local .env has non-boolean debug values.
os.environ.setdefault("DEBUG", "false")

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def config_path():
    """Path of a bundled problem config by stem, e.g. config_path("quadratic")."""

    def _path(name: str) -> Path:
        return CONFIGS / f"{name}.cfg"

    return _path


@pytest.fixture
def load_problem(config_path):
    from fixcert.services.problem import ProblemService

    def _load(name: str):
        return ProblemService.load(config_path(name))

    return _load


@pytest.fixture
def chain_space():
    """a=0, b=2, c=3 on the line with the usual order."""
    from fixcert.models.spaces import FiniteOrderedMetricSpace

    return FiniteOrderedMetricSpace.chain([0.0, 2.0, 3.0], ["a", "b", "c"])


@pytest.fixture
def counterexample_space():
    """x_0 = 0, x_i = -(1/4)^i, materialised up to index 64."""
    from fixcert.models.spaces import IndexedSequenceSpace

    return IndexedSequenceSpace(lambda i: -(0.25**i), budget=64, overrides={0: 0.0})


@pytest.fixture(autouse=True)
def restore_settings():
    """
    Keep tests isolated: settings tweaked through attribute assignment are
    put back after every test.
    """
    from fixcert.core.config import settings

    snapshot = settings.model_dump()
    yield
    for key, value in snapshot.items():
        if getattr(settings, key) != value:
            setattr(settings, key, value)
