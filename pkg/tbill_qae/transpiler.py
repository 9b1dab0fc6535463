"""
Lowering to native gate sets.

Two targets are registered: ``superconducting`` ({CX, RZ, SX, X}, the
identity is simply omitted) and ``iontrap`` ({RX, RY, RZ, RXX}). Two-qubit
gates are rewritten one rule at a time until only the target entangler is
left; every rule is phase-equivalent to its source. Single-qubit gates that
are not native are re-synthesized from their matrix through ZYZ angles.
No adjacent-gate cancellation is performed, so the entangler census is the
plain structural one:

* superconducting: 2 per CRY, 2 per CP, 1 per CX, 3 per SWAP
* iontrap:         1 per CRY, 2 per CP, 1 per CX, 3 per SWAP
"""

import cmath
import logging
import math
from functools import lru_cache
from typing import Dict, FrozenSet, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .circuit import Circuit, GateInstance, GateKind, gate_matrix, make_gate
from .errors import StructuralError, UnknownDeviceError

logger = logging.getLogger(__name__)

_EPS = 1e-12


class NativeGateSet(BaseModel):
    """Gate kinds a device executes directly."""

    model_config = ConfigDict(frozen=True)

    name: str
    single_qubit_kinds: FrozenSet[GateKind]
    two_qubit_kind: GateKind

    @model_validator(mode="after")
    def check_kinds(self) -> "NativeGateSet":
        if self.two_qubit_kind not in (GateKind.CX, GateKind.RXX):
            raise ValueError("native entangler must be cx or rxx")
        if any(k.is_two_qubit or k is GateKind.MEASURE for k in self.single_qubit_kinds):
            raise ValueError("single-qubit kinds must act on one qubit")
        return self

    def is_native(self, g: GateInstance) -> bool:
        return (
            g.kind is GateKind.MEASURE
            or g.kind is self.two_qubit_kind
            or g.kind in self.single_qubit_kinds
        )


SUPERCONDUCTING = NativeGateSet(
    name="superconducting",
    single_qubit_kinds=frozenset({GateKind.RZ, GateKind.SX, GateKind.X}),
    two_qubit_kind=GateKind.CX,
)
IONTRAP = NativeGateSet(
    name="iontrap",
    single_qubit_kinds=frozenset({GateKind.RX, GateKind.RY, GateKind.RZ}),
    two_qubit_kind=GateKind.RXX,
)

GATE_SETS: Dict[str, NativeGateSet] = {gs.name: gs for gs in (SUPERCONDUCTING, IONTRAP)}


def get_gate_set(name: str) -> NativeGateSet:
    """Look up a native gate set by name."""
    try:
        return GATE_SETS[name]
    except KeyError:
        raise UnknownDeviceError(
            f"unknown target {name!r}; expected one of {sorted(GATE_SETS)}"
        ) from None


def _u(qubit: int, theta: float, phi: float, lam: float) -> GateInstance:
    return make_gate(GateKind.U, qubit, params=(theta, phi, lam))


def decompose_cry_superconducting(theta: float, control: int, target: int) -> List[GateInstance]:
    """CRY(theta) as RY(theta/2), CX, RY(-theta/2), CX on the target."""
    return [
        _u(target, theta / 2, 0.0, 0.0),
        make_gate(GateKind.CX, control, target),
        _u(target, -theta / 2, 0.0, 0.0),
        make_gate(GateKind.CX, control, target),
    ]


def decompose_cry_iontrap(theta: float, control: int, target: int) -> List[GateInstance]:
    """
    CRY(theta) with a single RXX(-theta/2).

    Hadamards on the control turn the XX interaction into Z(control)X(target);
    RZ(-pi/2) before and RZ(pi/2) after on the target turn it into Z Y; the
    trailing RY(theta/2) on the target (folded into the last U) cancels the
    control-|0> branch and doubles the control-|1> branch to RY(theta).
    """
    return [
        _u(control, math.pi / 2, 0.0, math.pi),
        _u(target, 0.0, 0.0, -math.pi / 2),
        make_gate(GateKind.RXX, control, target, params=(-theta / 2,)),
        _u(control, math.pi / 2, 0.0, math.pi),
        _u(target, theta / 2, 0.0, math.pi / 2),
    ]


def decompose_cx_iontrap(control: int, target: int) -> List[GateInstance]:
    """CX with a single RXX(pi/2)."""
    return [
        _u(control, math.pi / 2, 0.0, 0.0),
        make_gate(GateKind.RXX, control, target, params=(math.pi / 2,)),
        _u(control, math.pi / 2, math.pi / 2, -math.pi),
        _u(target, -math.pi / 2, -math.pi / 2, math.pi / 2),
    ]


def _decompose_cp(lam: float, control: int, target: int) -> List[GateInstance]:
    return [
        make_gate(GateKind.RZ, control, params=(lam / 2,)),
        make_gate(GateKind.CX, control, target),
        make_gate(GateKind.RZ, target, params=(-lam / 2,)),
        make_gate(GateKind.CX, control, target),
        make_gate(GateKind.RZ, target, params=(lam / 2,)),
    ]


def _decompose_swap(a: int, b: int) -> List[GateInstance]:
    return [
        make_gate(GateKind.CX, a, b),
        make_gate(GateKind.CX, b, a),
        make_gate(GateKind.CX, a, b),
    ]


def _decompose_rxx_superconducting(theta: float, a: int, b: int) -> List[GateInstance]:
    return [
        make_gate(GateKind.H, a),
        make_gate(GateKind.H, b),
        make_gate(GateKind.CX, a, b),
        make_gate(GateKind.RZ, b, params=(theta,)),
        make_gate(GateKind.CX, a, b),
        make_gate(GateKind.H, a),
        make_gate(GateKind.H, b),
    ]


def zyz_angles(matrix: np.ndarray) -> Tuple[float, float, float]:
    """
    Angles (theta, phi, lam) with matrix ~ RZ(phi) RY(theta) RZ(lam) up to
    global phase.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2, 2):
        raise StructuralError(f"expected a 2x2 matrix, got {matrix.shape}")
    special = matrix / cmath.sqrt(np.linalg.det(matrix))
    a, b = special[0, 0], special[1, 0]
    theta = 2 * math.atan2(abs(b), abs(a))
    if abs(b) < _EPS:
        return 0.0, -2 * cmath.phase(a), 0.0
    if abs(a) < _EPS:
        return theta, 2 * cmath.phase(b), 0.0
    total = -2 * cmath.phase(a)
    diff = 2 * cmath.phase(b)
    return theta, (total + diff) / 2, (total - diff) / 2


def _is_trivial(angle: float) -> bool:
    # RZ(2*pi*k) is +-identity, a global phase.
    return abs(math.remainder(angle, 2 * math.pi)) < _EPS


@lru_cache(maxsize=4096)
def _synthesis_recipe(
    kind: GateKind, params: Tuple[float, ...], target_name: str
) -> Tuple[Tuple[GateKind, Tuple[float, ...]], ...]:
    theta, phi, lam = zyz_angles(gate_matrix(kind, params))
    if _is_trivial(theta):
        total = phi + lam
        return () if _is_trivial(total) else ((GateKind.RZ, (total,)),)

    if target_name == IONTRAP.name:
        sequence = [(GateKind.RZ, lam), (GateKind.RY, theta), (GateKind.RZ, phi)]
        return tuple((k, (a,)) for k, a in sequence if k is GateKind.RY or not _is_trivial(a))

    # RY(theta) = RZ(pi) SX RZ(theta - pi) SX up to phase once folded with
    # the outer Z rotations.
    recipe = []
    if not _is_trivial(lam):
        recipe.append((GateKind.RZ, (lam,)))
    recipe.append((GateKind.SX, ()))
    if not _is_trivial(theta - math.pi):
        recipe.append((GateKind.RZ, (theta - math.pi,)))
    recipe.append((GateKind.SX, ()))
    if not _is_trivial(phi + math.pi):
        recipe.append((GateKind.RZ, (phi + math.pi,)))
    return tuple(recipe)


def synthesize_single_qubit(g: GateInstance, target: NativeGateSet) -> List[GateInstance]:
    """Rewrite a single-qubit gate into the target's single-qubit kinds."""
    recipe = _synthesis_recipe(g.kind, g.params, target.name)
    return [make_gate(kind, g.qubits[0], params=params) for kind, params in recipe]


def _expand_two_qubit(g: GateInstance, target: NativeGateSet) -> List[GateInstance]:
    a, b = g.qubits
    if g.kind is GateKind.SWAP:
        return _decompose_swap(a, b)
    if g.kind is GateKind.CP:
        return _decompose_cp(g.params[0], a, b)
    if g.kind is GateKind.CRY:
        if target.two_qubit_kind is GateKind.CX:
            return decompose_cry_superconducting(g.params[0], a, b)
        return decompose_cry_iontrap(g.params[0], a, b)
    if g.kind is GateKind.CX:
        return decompose_cx_iontrap(a, b)
    if g.kind is GateKind.RXX:
        return _decompose_rxx_superconducting(g.params[0], a, b)
    raise StructuralError(f"no lowering rule for {g.kind.value}")


def lower_gate(g: GateInstance, target: NativeGateSet) -> List[GateInstance]:
    """Fully lower one gate to native kinds."""
    if target.is_native(g):
        return [g]
    if not g.kind.is_two_qubit:
        return synthesize_single_qubit(g, target)
    lowered: List[GateInstance] = []
    for step in _expand_two_qubit(g, target):
        lowered.extend(lower_gate(step, target))
    return lowered


def transpile(c: Circuit, target: NativeGateSet) -> Circuit:
    """Lower every gate of ``c`` to ``target``'s native kinds."""
    gates: List[GateInstance] = []
    for g in c.gates:
        gates.extend(lower_gate(g, target))
    out = c.with_gates(gates)
    logger.debug(f"Transpiled {len(c)} gates to {len(out)} {target.name} gates")
    return out


def expected_two_qubit_census(c: Circuit, target: NativeGateSet) -> int:
    """Entangler count predicted from the source gate mix, without lowering."""
    weights: Dict[GateKind, Sequence[int]] = {
        GateKind.CRY: (2, 1),
        GateKind.CP: (2, 2),
        GateKind.CX: (1, 1),
        GateKind.SWAP: (3, 3),
        GateKind.RXX: (2, 1),
    }
    column = 0 if target.two_qubit_kind is GateKind.CX else 1
    return sum(weights[g.kind][column] for g in c.gates if g.kind.is_two_qubit)
