"""
QASM 2.0-style subset reader and writer.

One gate per line, gate names exactly the ``GateKind`` values. Angles are
written with ``repr`` so a round trip reproduces them bit for bit.
"""

import logging
import math
import re
from typing import List, Optional, Tuple

from pydantic import ValidationError

from .circuit import Circuit, GateInstance, GateKind, make_gate
from .errors import QasmParseError

logger = logging.getLogger(__name__)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

_VERSION_RE = re.compile(r"^OPENQASM\s+2(\.0)?\s*;$")
_INCLUDE_RE = re.compile(r'^include\s+"[^"]+"\s*;$')
_REG_RE = re.compile(r"^(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*;$")
_MEASURE_RE = re.compile(
    r"^measure\s+[A-Za-z_]\w*\s*\[\s*(\d+)\s*\]\s*->\s*[A-Za-z_]\w*\s*\[\s*(\d+)\s*\]\s*;$"
)
_GATE_RE = re.compile(r"^([a-z]+)\s*(?:\(([^)]*)\))?\s+(.+?)\s*;$")
_OPERAND_RE = re.compile(r"^[A-Za-z_]\w*\s*\[\s*(\d+)\s*\]$")
_PI_RE = re.compile(
    r"^([+-]?)\s*(?:(\d+(?:\.\d*)?)\s*\*\s*)?pi(?:\s*/\s*(\d+(?:\.\d*)?))?$"
)


def _format_gate(g: GateInstance) -> str:
    if g.kind is GateKind.MEASURE:
        return f"measure q[{g.qubits[0]}] -> c[{g.clbit}];"
    operands = ",".join(f"q[{q}]" for q in g.qubits)
    if g.params:
        args = ",".join(repr(float(p)) for p in g.params)
        return f"{g.kind.value}({args}) {operands};"
    return f"{g.kind.value} {operands};"


def qasm_export(c: Circuit) -> str:
    """Serialize a circuit to the QASM subset."""
    lines = [HEADER.rstrip("\n"), f"qreg q[{c.width}];"]
    if c.classical_width:
        lines.append(f"creg c[{c.classical_width}];")
    lines.extend(_format_gate(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def _parse_angle(token: str, line_number: int) -> float:
    token = token.strip()
    try:
        return float(token)
    except ValueError:
        pass
    match = _PI_RE.match(token)
    if not match:
        raise QasmParseError(f"cannot parse angle {token!r}", line_number)
    sign, factor, divisor = match.groups()
    value = math.pi * (float(factor) if factor else 1.0) / (float(divisor) if divisor else 1.0)
    return -value if sign == "-" else value


def qasm_import(text: str) -> Circuit:
    """Parse QASM subset text into a circuit."""
    width: Optional[int] = None
    classical_width = 0
    gates: List[GateInstance] = []
    pending: List[Tuple[int, GateInstance]] = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if _VERSION_RE.match(line) or _INCLUDE_RE.match(line):
            continue

        reg = _REG_RE.match(line)
        if reg:
            size = int(reg.group(3))
            if reg.group(1) == "qreg":
                if width is not None:
                    raise QasmParseError("only one qreg is supported", line_number)
                if size < 1:
                    raise QasmParseError("qreg needs at least one qubit", line_number)
                width = size
            else:
                classical_width = size
            continue

        if width is None:
            raise QasmParseError("statement before qreg declaration", line_number)

        try:
            measure = _MEASURE_RE.match(line)
            if measure:
                gate = make_gate(
                    GateKind.MEASURE, int(measure.group(1)), clbit=int(measure.group(2))
                )
            else:
                gate = _parse_gate_line(line, line_number)
        except ValidationError as exc:
            raise QasmParseError(str(exc.errors()[0]["msg"]), line_number) from exc
        pending.append((line_number, gate))

    if width is None:
        raise QasmParseError("missing qreg declaration")

    for line_number, gate in pending:
        if any(q >= width for q in gate.qubits):
            raise QasmParseError(f"qubit index outside qreg of size {width}", line_number)
        if gate.clbit is not None and gate.clbit >= classical_width:
            raise QasmParseError(
                f"classical bit outside creg of size {classical_width}", line_number
            )
        gates.append(gate)

    logger.debug(f"Parsed {len(gates)} gates on {width} qubits")
    return Circuit(width=width, gates=tuple(gates), classical_width=classical_width)


def _parse_gate_line(line: str, line_number: int) -> GateInstance:
    match = _GATE_RE.match(line)
    if not match:
        raise QasmParseError(f"unrecognized statement {line!r}", line_number)
    name, args, operands = match.groups()
    try:
        kind = GateKind(name)
    except ValueError:
        raise QasmParseError(f"unknown gate {name!r}", line_number) from None
    if kind is GateKind.MEASURE:
        raise QasmParseError("malformed measure statement", line_number)

    params = [_parse_angle(a, line_number) for a in args.split(",")] if args else []
    qubits = []
    for operand in operands.split(","):
        op_match = _OPERAND_RE.match(operand.strip())
        if not op_match:
            raise QasmParseError(f"bad operand {operand.strip()!r}", line_number)
        qubits.append(int(op_match.group(1)))
    return make_gate(kind, *qubits, params=params)
