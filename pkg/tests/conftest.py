"""
Pytest configuration and fixtures for testing.
"""

import math

import numpy as np
import pytest

from tbill_qae.circuit import Circuit, GateKind, make_gate
from tbill_qae.config import get_settings
from tbill_qae.qae import QaeProblem, build_qae

SINGLE_QUBIT_KINDS = [GateKind.H, GateKind.X, GateKind.SX, GateKind.RZ, GateKind.RX, GateKind.RY, GateKind.U]
TWO_QUBIT_KINDS = [GateKind.CX, GateKind.CRY, GateKind.CP, GateKind.RXX, GateKind.SWAP]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running reproduction runs")


def random_circuit(rng: np.random.Generator, width: int, num_gates: int) -> Circuit:
    """Random measurement-free circuit over every unitary gate kind."""
    gates = []
    for _ in range(num_gates):
        if width > 1 and rng.random() < 0.5:
            kind = TWO_QUBIT_KINDS[rng.integers(len(TWO_QUBIT_KINDS))]
            qubits = rng.choice(width, size=2, replace=False)
        else:
            kind = SINGLE_QUBIT_KINDS[rng.integers(len(SINGLE_QUBIT_KINDS))]
            qubits = [rng.integers(width)]
        params = rng.uniform(-2 * math.pi, 2 * math.pi, size=kind.num_params)
        gates.append(make_gate(kind, *(int(q) for q in qubits), params=params))
    return Circuit(width=width, gates=tuple(gates))


@pytest.fixture
def rng():
    """Seeded generator so failures reproduce."""
    return np.random.default_rng(20240521)


@pytest.fixture
def qae_n3():
    """Swapless QAE for p = 0.2 with three evaluation qubits."""
    return build_qae(QaeProblem(p=0.2, eval_qubits=3))


@pytest.fixture
def fresh_settings(monkeypatch):
    """Clear the cached settings around a test that changes the environment."""
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()
