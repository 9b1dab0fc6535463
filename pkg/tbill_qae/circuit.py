"""
Gate-level circuit representation.

The same immutable ``Circuit`` flows through synthesis, native lowering,
routing and simulation. Qubit 0 is the least-significant bit of a basis-state
index, so a measured evaluation register reads directly as an integer.
Circuits never carry a global phase; every equivalence check ignores it.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections import Counter
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import get_settings
from .errors import CapabilityError, StructuralError

logger = logging.getLogger(__name__)


class GateKind(str, Enum):
    """Supported gate kinds; values are the QASM spellings."""

    H = "h"
    X = "x"
    SX = "sx"
    RZ = "rz"
    RX = "rx"
    RY = "ry"
    U = "u"
    CX = "cx"
    CRY = "cry"
    CP = "cp"
    RXX = "rxx"
    SWAP = "swap"
    MEASURE = "measure"

    @property
    def num_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT_KINDS else 1

    @property
    def num_params(self) -> int:
        return _PARAM_COUNTS.get(self, 0)

    @property
    def is_two_qubit(self) -> bool:
        return self in _TWO_QUBIT_KINDS


_TWO_QUBIT_KINDS = frozenset(
    {GateKind.CX, GateKind.CRY, GateKind.CP, GateKind.RXX, GateKind.SWAP}
)
_PARAM_COUNTS = {
    GateKind.RZ: 1,
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.U: 3,
    GateKind.CRY: 1,
    GateKind.CP: 1,
    GateKind.RXX: 1,
}


class GateInstance(BaseModel):
    """One gate application: kind, qubit operands and angles in radians."""

    model_config = ConfigDict(frozen=True)

    kind: GateKind
    qubits: Tuple[int, ...]
    params: Tuple[float, ...] = ()
    clbit: Optional[int] = None

    @model_validator(mode="after")
    def check_shape(self) -> "GateInstance":
        if len(self.qubits) != self.kind.num_qubits:
            raise ValueError(
                f"{self.kind.value} acts on {self.kind.num_qubits} qubit(s), "
                f"got {len(self.qubits)}"
            )
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind.value} operands must be distinct")
        if len(self.params) != self.kind.num_params:
            raise ValueError(
                f"{self.kind.value} takes {self.kind.num_params} parameter(s), "
                f"got {len(self.params)}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError("gate angles must be finite")
        if self.kind is GateKind.MEASURE:
            if self.clbit is None or self.clbit < 0:
                raise ValueError("measure needs a non-negative classical bit")
        elif self.clbit is not None:
            raise ValueError("only measure writes a classical bit")
        return self


def make_gate(
    kind: GateKind,
    *qubits: int,
    params: Sequence[float] = (),
    clbit: Optional[int] = None,
) -> GateInstance:
    """Shorthand constructor used by the builders and rewrite rules."""
    return GateInstance(
        kind=kind,
        qubits=tuple(qubits),
        params=tuple(float(p) for p in params),
        clbit=clbit,
    )


class Circuit(BaseModel):
    """Ordered gate sequence over ``width`` qubits, in program order."""

    model_config = ConfigDict(frozen=True)

    width: int = Field(ge=1)
    gates: Tuple[GateInstance, ...] = ()
    classical_width: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_operands(self) -> "Circuit":
        for index, g in enumerate(self.gates):
            if any(q >= self.width for q in g.qubits):
                raise ValueError(
                    f"gate {index} ({g.kind.value}) addresses a qubit outside "
                    f"width {self.width}"
                )
            if g.clbit is not None and g.clbit >= self.classical_width:
                raise ValueError(
                    f"gate {index} writes classical bit {g.clbit} outside "
                    f"classical width {self.classical_width}"
                )
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def compose(self, other: "Circuit") -> "Circuit":
        """Concatenate ``other`` after this circuit on the same register."""
        if other.width != self.width:
            raise StructuralError(
                f"cannot compose width {other.width} onto width {self.width}"
            )
        return Circuit(
            width=self.width,
            gates=self.gates + other.gates,
            classical_width=max(self.classical_width, other.classical_width),
        )

    def with_gates(self, gates: Iterable[GateInstance]) -> "Circuit":
        """Same registers, new gate list."""
        return Circuit(
            width=self.width,
            gates=tuple(gates),
            classical_width=self.classical_width,
        )

    def without_measurements(self) -> "Circuit":
        return self.with_gates(g for g in self.gates if g.kind is not GateKind.MEASURE)

    def count_ops(self) -> Dict[str, int]:
        """Gate census keyed by QASM name."""
        return dict(Counter(g.kind.value for g in self.gates))


_SQRT1_2 = 1 / math.sqrt(2)


def _rotation(axis: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array(
        [[cmath.exp(-0.5j * angle), 0], [0, cmath.exp(0.5j * angle)]], dtype=complex
    )


def u_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    """Generic single-qubit rotation U(theta, phi, lambda)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def _controlled(block: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = block
    return out


def gate_matrix(kind: GateKind, params: Sequence[float] = ()) -> np.ndarray:
    """
    Local matrix of a gate kind.

    Two-qubit matrices are indexed by ``2 * bit(qubits[0]) + bit(qubits[1])``;
    for controlled kinds ``qubits[0]`` is the control.
    """
    if kind is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
    if kind is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.SX:
        return np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2
    if kind is GateKind.RZ:
        return _rotation("z", params[0])
    if kind is GateKind.RX:
        return _rotation("x", params[0])
    if kind is GateKind.RY:
        return _rotation("y", params[0])
    if kind is GateKind.U:
        return u_matrix(*params)
    if kind is GateKind.CX:
        return _controlled(gate_matrix(GateKind.X))
    if kind is GateKind.CRY:
        return _controlled(_rotation("y", params[0]))
    if kind is GateKind.CP:
        return np.diag([1, 1, 1, cmath.exp(1j * params[0])]).astype(complex)
    if kind is GateKind.RXX:
        c, s = math.cos(params[0] / 2), math.sin(params[0] / 2)
        return c * np.eye(4, dtype=complex) - 1j * s * np.fliplr(np.eye(4, dtype=complex))
    if kind is GateKind.SWAP:
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    raise StructuralError(f"{kind.value} has no unitary matrix")


def apply_gate_tensor(
    tensor: np.ndarray, local: np.ndarray, qubits: Sequence[int], width: int
) -> np.ndarray:
    """
    Contract a local gate matrix into a ``(2,) * width + extra`` tensor.

    Axis ``width - 1 - q`` holds qubit ``q`` (C-order reshape of a
    little-endian index). Trailing axes are carried through untouched, so the
    same kernel evolves state vectors and unitary columns.
    """
    k = len(qubits)
    axes = [width - 1 - q for q in qubits]
    op = local.reshape((2,) * (2 * k))
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes)


def _check_unitary_width(width: int) -> None:
    limit = get_settings().MAX_UNITARY_WIDTH
    if width > limit:
        raise CapabilityError(
            f"dense unitary of width {width} exceeds the limit of {limit} qubits"
        )


def gate_unitary(g: GateInstance, width: int) -> np.ndarray:
    """Full-width unitary of one gate, identity on untouched qubits."""
    if g.kind is GateKind.MEASURE:
        raise StructuralError("measure has no unitary")
    if any(q >= width for q in g.qubits):
        raise StructuralError(
            f"{g.kind.value} on qubits {g.qubits} is out of range for width {width}"
        )
    _check_unitary_width(width)
    dim = 2**width
    tensor = np.eye(dim, dtype=complex).reshape((2,) * width + (dim,))
    tensor = apply_gate_tensor(tensor, gate_matrix(g.kind, g.params), g.qubits, width)
    return tensor.reshape(dim, dim)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Ordered product of gate unitaries; later gates multiply on the left."""
    _check_unitary_width(c.width)
    if any(g.kind is GateKind.MEASURE for g in c.gates):
        raise StructuralError("circuit_unitary needs a measurement-free circuit")
    dim = 2**c.width
    tensor = np.eye(dim, dtype=complex).reshape((2,) * c.width + (dim,))
    for g in c.gates:
        tensor = apply_gate_tensor(tensor, gate_matrix(g.kind, g.params), g.qubits, c.width)
    return tensor.reshape(dim, dim)


def count_two_qubit_gates(c: Circuit) -> int:
    """Number of gate instances acting on two qubits."""
    return sum(1 for g in c.gates if g.kind.is_two_qubit)


def equivalent_up_to_global_phase(
    a: np.ndarray, b: np.ndarray, tol: float = 1e-10
) -> bool:
    """
    True iff ``a`` equals ``exp(i*phi) * b`` within ``tol`` in max-norm.

    The phase is read off the entry where ``b`` has the largest magnitude.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise StructuralError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return True
    idx = int(np.argmax(np.abs(b)))
    pivot = b.flat[idx]
    if abs(pivot) == 0.0:
        return float(np.max(np.abs(a))) <= tol
    ratio = a.flat[idx] / pivot
    phase = ratio / abs(ratio) if abs(ratio) > 0.0 else 1.0
    return float(np.max(np.abs(a - phase * b))) <= tol


def unitarity_defect(m: np.ndarray) -> float:
    """Max-norm of ``m^dagger m - I``."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
