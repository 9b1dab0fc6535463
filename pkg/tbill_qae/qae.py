"""
Amplitude-estimation circuit synthesis.

Layout: qubits ``0..n-1`` are the evaluation register, qubit ``n`` is the
objective qubit. Q = RY(2*theta) is applied in controlled powers. Evaluation
qubit ``j`` controls the power ``2**(n-1-j)``, which lets the inverse QFT run
without its SWAP layer and still leave the outcome z readable little-endian.

The objective qubit starts in |0>, an equal-weight mix of the eigenvectors
of Q. A = RY(theta) commutes with Q and only rephases that mix, so the
folded estimate distribution is the same with or without it and it is not
emitted.
"""

import logging
import math
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .circuit import Circuit, GateInstance, GateKind, gate_matrix, make_gate
from .errors import DomainError

logger = logging.getLogger(__name__)

# Lower bound on the chance that QAE lands on one of the two grid points
# bracketing the true probability.
SUCCESS_PROBABILITY = 8 / math.pi**2


def theta_from_p(p: float) -> float:
    """Rotation angle 2*arcsin(sqrt(p)) that loads p as an amplitude."""
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise DomainError(f"probability {p} outside [0, 1]")
    return 2 * math.asin(math.sqrt(p))


class QaeProblem(BaseModel):
    """Probability to estimate and the number of evaluation qubits."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(ge=0.0, le=1.0)
    eval_qubits: int = Field(ge=1)

    @property
    def theta(self) -> float:
        return theta_from_p(self.p)

    @property
    def grid_size(self) -> int:
        return 2**self.eval_qubits

    @property
    def width(self) -> int:
        return self.eval_qubits + 1


def q_operator(theta: float) -> np.ndarray:
    """Grover-like operator Q = RY(2*theta) on the objective qubit."""
    return gate_matrix(GateKind.RY, (2 * theta,))


def q_eigenphases(theta: float) -> np.ndarray:
    """Eigenphases of Q, ascending; they are -theta and +theta."""
    return np.sort(np.angle(np.linalg.eigvals(q_operator(theta))))


def _inverse_qft(n: int) -> List[GateInstance]:
    # Qubit b carries the binary fraction 0.y_b ... y_0; strip the already
    # decoded low bits, then a Hadamard exposes y_b.
    gates: List[GateInstance] = []
    for b in range(n):
        for c in range(b):
            gates.append(make_gate(GateKind.CP, c, b, params=(-math.pi / 2 ** (b - c),)))
        gates.append(make_gate(GateKind.H, b))
    return gates


def build_qae(problem: QaeProblem, swapless: bool = True) -> Circuit:
    """
    Build the amplitude-estimation circuit.

    With ``swapless=False`` the textbook construction is produced instead:
    controlled powers in natural order followed by an explicit SWAP reversal
    ahead of the same inverse-QFT body.
    """
    n = problem.eval_qubits
    objective = n
    theta = problem.theta

    gates: List[GateInstance] = [make_gate(GateKind.H, j) for j in range(n)]
    for j in range(n):
        power = n - 1 - j if swapless else j
        gates.append(
            make_gate(GateKind.CRY, j, objective, params=(2 ** (power + 1) * theta,))
        )
    if not swapless:
        gates.extend(make_gate(GateKind.SWAP, j, n - 1 - j) for j in range(n // 2))
    gates.extend(_inverse_qft(n))
    gates.extend(make_gate(GateKind.MEASURE, j, clbit=j) for j in range(n))

    logger.debug(f"Built {'swapless' if swapless else 'textbook'} QAE, n={n}, p={problem.p}")
    return Circuit(width=n + 1, gates=tuple(gates), classical_width=n)


def estimate_grid(n: int) -> List[float]:
    """Distinct estimates sin^2(pi*k/2^n) for k = 0..2^(n-1), ascending."""
    if n < 1:
        raise DomainError("need at least one evaluation qubit")
    m = 2**n
    return [math.sin(math.pi * k / m) ** 2 for k in range(m // 2 + 1)]


def outcome_to_estimate(z: int, n: int) -> float:
    """Map a measured integer to sin^2(pi*z/2^n); z and 2^n - z coincide."""
    if n < 1:
        raise DomainError("need at least one evaluation qubit")
    m = 2**n
    if not 0 <= z < m:
        raise DomainError(f"outcome {z} outside [0, {m})")
    k = min(z, m - z)
    return math.sin(math.pi * k / m) ** 2


def error_bound(m: int) -> float:
    """Estimation error bound pi/M + pi^2/M^2, held with probability >= 8/pi^2."""
    if m < 2 or m & (m - 1):
        raise DomainError(f"grid size {m} is not a power of two >= 2")
    return math.pi / m + math.pi**2 / m**2
