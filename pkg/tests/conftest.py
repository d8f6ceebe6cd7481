"""Shared fixtures: the two reference benchmark configurations."""

from pathlib import Path

import pytest

from avgsamp.experiments import Experiment, load_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def quadratic_benchmark() -> Experiment:
    """Quadratic-spline benchmark: two-term signal, centered 1/8 box kernel."""
    return load_config(CONFIG_DIR / "quadratic_bspline.json")


@pytest.fixture(scope="session")
def linear_benchmark() -> Experiment:
    """Linear-spline benchmark: two-term signal, offset unit box kernel."""
    return load_config(CONFIG_DIR / "linear_bspline.json")


@pytest.fixture(scope="session")
def config_dir() -> Path:
    return CONFIG_DIR
