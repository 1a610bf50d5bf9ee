"""
Pytest fixtures for the fractional Hausdorff operator test suite.
"""

import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from grid_core import make_log_grid
from hausdorff_operator import ClosedForm, ExponentSet
from kernels import AdjointHardy, FractionalHardy, GaussianHat
from weights import ConstantWeight, PowerWeight


REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "configs"


# ============================================================================
# TEMPORARY DIRECTORY FIXTURES
# ============================================================================

@pytest.fixture
def temp_dir():
    """Provides a temporary directory for file operations."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def temp_results_log(temp_dir):
    """Provides a temporary results log path."""
    return str(temp_dir / "results.jsonl")


@pytest.fixture
def write_config(temp_dir):
    """Writes a config dict to a JSON file and returns its path."""
    def _write(raw, name="config.json"):
        path = temp_dir / name
        path.write_text(json.dumps(raw))
        return path
    return _write


@pytest.fixture
def write_profile(temp_dir):
    """Writes a two-column (node, value) CSV and returns its path."""
    def _write(nodes, values, name="profile.csv"):
        path = temp_dir / name
        lines = ["node,value"] + [f"{float(n)!r},{float(v)!r}" for n, v in zip(nodes, values)]
        path.write_text("\n".join(lines) + "\n")
        return path
    return _write


# ============================================================================
# KERNEL AND WEIGHT FIXTURES
# ============================================================================

@pytest.fixture
def hardy_half():
    """Fractional Hardy kernel of order 1/2."""
    return FractionalHardy(0.5)


@pytest.fixture
def adjoint_hardy():
    return AdjointHardy()


@pytest.fixture
def gaussian_hat():
    """Kernel whose transform is exp(-pi xi^2)."""
    return GaussianHat(math.pi)


@pytest.fixture
def unit_weight():
    return ConstantWeight(1.0)


@pytest.fixture
def sqrt_weight():
    return PowerWeight(0.5)


@pytest.fixture
def reference_exponents():
    """p = 4/3, q = 4, beta = 1/2 on the Lebesgue diagonal."""
    return ExponentSet(4 / 3, 4.0, 0.5)


# ============================================================================
# FUNCTION AND GRID FIXTURES
# ============================================================================

@pytest.fixture
def unit_gaussian():
    """exp(-pi x^2), which is its own Fourier transform."""
    return ClosedForm(lambda x: np.exp(-math.pi * np.square(x)), (), "gaussian")


@pytest.fixture
def small_log_grid():
    return make_log_grid(1e-3, 1e3, 61)


# ============================================================================
# REFERENCE CONFIGS
# ============================================================================

@pytest.fixture
def reference_config_raw():
    """Raw dict of the fractional Hardy reference run."""
    return json.loads((CONFIG_DIR / "verify_increasing.json").read_text())


@pytest.fixture
def constants_config_raw():
    return json.loads((CONFIG_DIR / "constants.json").read_text())
