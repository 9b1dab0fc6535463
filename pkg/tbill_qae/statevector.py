"""
Dense state-vector simulation and QAE outcome distributions.
"""

import csv
import io
import logging
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .bond import TBill, expected_value
from .circuit import Circuit, GateKind, apply_gate_tensor, gate_matrix
from .config import get_settings
from .errors import CapabilityError, DomainError, StructuralError
from .qae import QaeProblem, outcome_to_estimate

logger = logging.getLogger(__name__)

_TIE_TOLERANCE = 1e-12


class StateVector(BaseModel):
    """Amplitudes over ``2**width`` little-endian basis states."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray

    @field_validator("amplitudes")
    @classmethod
    def check_length(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.ndim != 1 or v.size == 0 or v.size & (v.size - 1):
            raise ValueError("amplitude vector length must be a power of two")
        return v

    @property
    def width(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))


class EstimateDistribution(BaseModel):
    """
    Probability mass over folded estimates p~.

    ``shots`` is None for an exact distribution; otherwise ``counts`` holds
    the raw histogram and ``entries`` the normalized frequencies.
    """

    model_config = ConfigDict(frozen=True)

    entries: Dict[float, float]
    shots: Optional[int] = None
    counts: Optional[Dict[float, int]] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def check_mass(self) -> "EstimateDistribution":
        if not self.entries:
            raise ValueError("distribution is empty")
        total = sum(self.entries.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses sum to {total}, not 1")
        if self.shots is not None and self.counts is not None:
            if sum(self.counts.values()) != self.shots:
                raise ValueError("counts do not add up to shots")
        return self

    @property
    def is_exact(self) -> bool:
        return self.shots is None

    def mass(self, estimate: float, tol: float = 1e-12) -> float:
        """Mass recorded at ``estimate`` (0.0 if absent)."""
        return sum(m for e, m in self.entries.items() if abs(e - estimate) <= tol)

    def mode(self) -> float:
        """Most probable estimate; ties go to the smaller estimate."""
        best_estimate, best_mass = None, -1.0
        for estimate in sorted(self.entries):
            mass = self.entries[estimate]
            if mass > best_mass + _TIE_TOLERANCE:
                best_estimate, best_mass = estimate, mass
        return best_estimate


def _check_width(c: Circuit) -> None:
    limit = get_settings().MAX_STATEVECTOR_WIDTH
    if c.width > limit:
        raise CapabilityError(f"width {c.width} exceeds the simulator cap of {limit}")


def iter_statevector(c: Circuit) -> Iterator[StateVector]:
    """Yield the state after every non-measurement gate, starting from |0...0>."""
    _check_width(c)
    tensor = np.zeros((2,) * c.width, dtype=complex)
    tensor[(0,) * c.width] = 1.0
    for g in c.gates:
        if g.kind is GateKind.MEASURE:
            continue
        tensor = apply_gate_tensor(tensor, gate_matrix(g.kind, g.params), g.qubits, c.width)
        yield StateVector(amplitudes=tensor.reshape(-1))


def run_statevector(c: Circuit) -> StateVector:
    """Final state of ``c`` applied to |0...0>; measurements are ignored."""
    _check_width(c)
    state = np.zeros(2**c.width, dtype=complex)
    state[0] = 1.0
    result = StateVector(amplitudes=state)
    for result in iter_statevector(c):
        pass
    logger.debug(f"Simulated {len(c)} gates on {c.width} qubits")
    return result


def _register_marginal(state: StateVector, n: int) -> np.ndarray:
    # Evaluation qubits are the n low bits of the basis index.
    return state.probabilities.reshape(-1, 2**n).sum(axis=0)


def _fold(marginal: np.ndarray, n: int) -> Dict[float, float]:
    m = 2**n
    folded: Dict[int, float] = {}
    for z, mass in enumerate(marginal):
        k = min(z, m - z)
        folded[k] = folded.get(k, 0.0) + float(mass)
    return {outcome_to_estimate(k, n): folded[k] for k in sorted(folded)}


def exact_distribution(c: Circuit, problem: QaeProblem) -> EstimateDistribution:
    """Exact folded estimate distribution of a QAE circuit."""
    n = problem.eval_qubits
    if c.width < n:
        raise StructuralError(f"circuit of width {c.width} has no {n}-qubit register")
    state = run_statevector(c)
    marginal = _register_marginal(state, n)
    marginal = marginal / marginal.sum()
    return EstimateDistribution(entries=_fold(marginal, n))


def _measured_register(c: Circuit) -> int:
    measured = sorted(g.qubits[0] for g in c.gates if g.kind is GateKind.MEASURE)
    if not measured or measured != list(range(len(measured))):
        raise StructuralError("expected measurements on qubits 0..n-1")
    return len(measured)


def sample_shots(c: Circuit, shots: int, seed: int) -> EstimateDistribution:
    """
    Multinomial sample of the folded distribution.

    The evaluation register is the set of measured qubits. Draws come from
    numpy's PCG64 generator seeded with ``seed``.
    """
    if shots < 1:
        raise DomainError("shots must be at least 1")
    n = _measured_register(c)
    marginal = _register_marginal(run_statevector(c), n)
    marginal = marginal / marginal.sum()
    exact = _fold(marginal, n)

    estimates = list(exact)
    masses = np.array([exact[e] for e in estimates])
    masses = masses / masses.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    drawn = rng.multinomial(shots, masses)

    counts = {e: int(k) for e, k in zip(estimates, drawn) if k > 0}
    entries = {e: k / shots for e, k in counts.items()}
    logger.debug(f"Sampled {shots} shots with seed {seed}")
    return EstimateDistribution(entries=entries, shots=shots, counts=counts, seed=seed)


def estimate_and_price(dist: EstimateDistribution, tb: TBill) -> Tuple[float, float]:
    """Most probable estimate and the T-Bill value priced at that estimate."""
    p_est = dist.mode()
    priced = tb.model_copy(update={"p_no_change": min(max(p_est, 0.0), 1.0)})
    return p_est, expected_value(priced)


def bracketing_mass(dist: EstimateDistribution, p: float) -> float:
    """Combined mass on the closest estimates at or below and at or above ``p``."""
    below = [e for e in dist.entries if e <= p]
    above = [e for e in dist.entries if e >= p]
    targets = set()
    if below:
        targets.add(max(below))
    if above:
        targets.add(min(above))
    return sum(dist.entries[e] for e in targets)


def distribution_to_csv(dist: EstimateDistribution, header: Optional[List[str]] = None) -> str:
    """
    CSV of a distribution: ``estimate,mass`` when exact, else
    ``estimate,count,frequency``. ``header`` lines are emitted as comments.
    """
    buffer = io.StringIO()
    for line in header or []:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    if dist.is_exact:
        writer.writerow(["estimate", "mass"])
        for estimate in sorted(dist.entries):
            writer.writerow([repr(estimate), repr(dist.entries[estimate])])
    else:
        writer.writerow(["estimate", "count", "frequency"])
        for estimate in sorted(dist.entries):
            writer.writerow(
                [repr(estimate), dist.counts[estimate], repr(dist.entries[estimate])]
            )
    return buffer.getvalue()


def distribution_from_csv(text: str) -> EstimateDistribution:
    """Inverse of ``distribution_to_csv``."""
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    reader = csv.DictReader(rows)
    entries: Dict[float, float] = {}
    counts: Dict[float, int] = {}
    for row in reader:
        estimate = float(row["estimate"])
        if "mass" in row:
            entries[estimate] = float(row["mass"])
        else:
            counts[estimate] = int(row["count"])
            entries[estimate] = float(row["frequency"])
    if counts:
        return EstimateDistribution(
            entries=entries, shots=sum(counts.values()), counts=counts
        )
    return EstimateDistribution(entries=entries)

