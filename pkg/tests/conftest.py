from pathlib import Path

import pytest

import swp

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"


@pytest.fixture
def scenarios_dir() -> Path:
    return SCENARIOS


@pytest.fixture
def grid50() -> swp.AgeGrid:
    """The standard working-life grid [20, 70] at one-year resolution."""
    return swp.build_grid(20.0, 70.0, 1.0)
