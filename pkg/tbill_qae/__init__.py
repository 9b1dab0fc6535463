"""
T-Bill pricing with quantum amplitude estimation, native gate lowering,
topology routing and two-qubit gate scaling analysis.
"""

__version__ = "0.1.0"

from .bond import RatePath, TBill, expected_value, future_value, shifted_value
from .circuit import (
    Circuit,
    GateInstance,
    GateKind,
    circuit_unitary,
    count_two_qubit_gates,
    equivalent_up_to_global_phase,
    gate_unitary,
    make_gate,
)
from .config import configure_logging, get_settings
from .errors import (
    CapabilityError,
    CapacityError,
    DomainError,
    FitError,
    QasmParseError,
    StructuralError,
    TbillQaeError,
    UnknownDeviceError,
)
from .qae import QaeProblem, build_qae, error_bound, estimate_grid, outcome_to_estimate
from .qasm import qasm_export, qasm_import
from .router import Layout, RoutedCircuit, brute_force_route, route, routed_two_qubit_count
from .scaling import (
    BackendSpec,
    QuadraticFit,
    ScalingRecord,
    ScalingRun,
    emit_csv,
    emit_plot,
    fit_quadratic,
    run_scaling,
)
from .statevector import (
    EstimateDistribution,
    StateVector,
    estimate_and_price,
    exact_distribution,
    run_statevector,
    sample_shots,
)
from .topology import CouplingMap, builtin_coupling_map, load_coupling_map
from .transpiler import IONTRAP, SUPERCONDUCTING, NativeGateSet, transpile

__all__ = [
    # Circuit model
    "Circuit",
    "GateInstance",
    "GateKind",
    "make_gate",
    "gate_unitary",
    "circuit_unitary",
    "count_two_qubit_gates",
    "equivalent_up_to_global_phase",
    "qasm_export",
    "qasm_import",

    # Pricing and estimation
    "TBill",
    "RatePath",
    "expected_value",
    "future_value",
    "shifted_value",
    "QaeProblem",
    "build_qae",
    "estimate_grid",
    "outcome_to_estimate",
    "error_bound",
    "StateVector",
    "EstimateDistribution",
    "run_statevector",
    "exact_distribution",
    "sample_shots",
    "estimate_and_price",

    # Compilation
    "NativeGateSet",
    "SUPERCONDUCTING",
    "IONTRAP",
    "transpile",
    "CouplingMap",
    "builtin_coupling_map",
    "load_coupling_map",
    "Layout",
    "RoutedCircuit",
    "route",
    "routed_two_qubit_count",
    "brute_force_route",

    # Scaling
    "BackendSpec",
    "ScalingRecord",
    "ScalingRun",
    "QuadraticFit",
    "run_scaling",
    "fit_quadratic",
    "emit_csv",
    "emit_plot",

    # Errors and config
    "TbillQaeError",
    "StructuralError",
    "DomainError",
    "CapabilityError",
    "CapacityError",
    "UnknownDeviceError",
    "FitError",
    "QasmParseError",
    "get_settings",
    "configure_logging",
]
