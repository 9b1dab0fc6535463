"""
Exception hierarchy shared by every toolkit module.
"""

from typing import Optional


class TbillQaeError(Exception):
    """Root of all toolkit errors."""


class StructuralError(TbillQaeError, ValueError):
    """A gate, circuit or matrix is malformed for the requested operation."""


class DomainError(TbillQaeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(TbillQaeError):
    """The request exceeds a dense-simulation or exhaustive-search cap."""


class CapacityError(CapabilityError):
    """A circuit needs more qubits than the target device has."""


class UnknownDeviceError(TbillQaeError, LookupError):
    """No coupling map, gate set or backend is registered under a name."""


class FitError(TbillQaeError):
    """The least-squares design matrix is rank deficient."""


class QasmParseError(StructuralError):
    """A QASM line could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
