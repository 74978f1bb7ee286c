"""Shared fixtures: seeded samplers, frame families and scenario files."""

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from maxcov.config import FrameControlVariables  # noqa: E402
from maxcov.frames import make_frame_family  # noqa: E402
from maxcov.sampling import RationalSampler  # noqa: E402

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def sampler():
    return RationalSampler(42)


@pytest.fixture(scope="session")
def family():
    return make_frame_family("3/5")


@pytest.fixture(scope="session")
def alternate_family():
    return make_frame_family(FrameControlVariables.ALTERNATE_BETA)


@pytest.fixture
def points(sampler):
    return sampler.random_points(5)


@pytest.fixture
def scenario_path():
    def resolve(name: str) -> Path:
        return SCENARIO_DIR / name
    return resolve
