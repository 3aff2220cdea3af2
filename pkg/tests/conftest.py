"""
Test configuration and fixtures for dqcrcx tests.
"""

import os

import pytest

from src.dqcrcx.library import ghz
from src.dqcrcx.scheduler import parse_network
from src.dqcrcx.simulator import NoiseParams
from src.dqcrcx.transpiler import transpile


@pytest.fixture
def clean_env():
    """Fixture that provides a clean environment for testing."""
    # Store original environment variables
    original_env = dict(os.environ)

    env_vars_to_clear = [
        "DQCRCX_THREADS",
        "DQCRCX_WIDTH_CAP",
        "DQCRCX_TRAJECTORIES",
        "DQCRCX_LOG_LEVEL",
        "DQCRCX_EXECUTOR",
    ]

    for var in env_vars_to_clear:
        if var in os.environ:
            del os.environ[var]

    yield

    # Restore original environment
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture
def ghz8():
    """Transpiled 8-qubit GHZ circuit."""
    return transpile(ghz(8))


@pytest.fixture
def two_qpus():
    """Two QPUs with 4 computational and 2 communication qubits each."""
    return parse_network("2x4+2")


@pytest.fixture
def noiseless():
    """All error probabilities zero."""
    return NoiseParams.noiseless()


@pytest.fixture
def small_config():
    """Two-experiment configuration that runs in a few seconds."""
    return {
        "defaults": {
            "seeds": [0, 1],
            "n_traj": 200,
            "noise": {"p1": 0.001, "p2": 0.005, "p_ro": 0.005},
            "schedules": ["naive", "gp"],
        },
        "circuits": {"ghz-4": {"family": "ghz", "num_qubits": 4}},
        "experiments": [
            {
                "id": "a",
                "circuit": "ghz-4",
                "network": {"qpus": 2, "comp_qubits": 2, "comm_qubits": 1},
                "total_qubits": 6,
            },
            {
                "id": "b",
                "circuit": {"family": "ghz", "num_qubits": 4},
                "network": "4x1+2",
                "total_qubits": 12,
            },
        ],
    }
