"""Tests for SWAP-insertion routing."""
import pytest
from pydantic import ValidationError

from tbill_qae.circuit import Circuit, GateKind, circuit_unitary, equivalent_up_to_global_phase, make_gate
from tbill_qae.errors import CapabilityError, CapacityError, StructuralError
from tbill_qae.qae import QaeProblem, build_qae
from tbill_qae.router import (
    Layout,
    RoutedCircuit,
    brute_force_route,
    check_routing,
    embed,
    route,
    routed_two_qubit_count,
    undo_permutation,
)
from tbill_qae.topology import CouplingMap, all_to_all, builtin_coupling_map
from tbill_qae.transpiler import IONTRAP, SUPERCONDUCTING


def _qae(n: int) -> Circuit:
    return build_qae(QaeProblem(p=0.2, eval_qubits=n))


@pytest.fixture
def yorktown():
    return builtin_coupling_map("yorktown")


@pytest.fixture
def path3():
    return CouplingMap(name="path", qubit_count=3, edges=[(0, 1), (1, 2)])


def test_layout_must_be_injective():
    """Test Layout validation and inversion."""
    with pytest.raises(ValidationError):
        Layout(mapping=(0, 0))
    with pytest.raises(ValidationError):
        Layout(mapping=(-1, 2))
    layout = Layout(mapping=(3, 1))
    assert layout.inverse() == {3: 0, 1: 1}
    with pytest.raises(StructuralError):
        layout.check_fits(3)


def test_yorktown_walkthrough(qae_n3, yorktown):
    """One SWAP, 15 CX in total."""
    routed = route(qae_n3, yorktown, seed=1234, trials=64)
    assert routed.swap_count == 1
    assert routed_two_qubit_count(routed, SUPERCONDUCTING) == 15
    assert len(routed.trial_swap_counts) == 64
    assert min(routed.trial_swap_counts) == 1
    check_routing(routed, yorktown)


def test_yorktown_oracle(qae_n3, yorktown):
    """Test the exhaustive search on Yorktown."""
    assert brute_force_route(qae_n3, yorktown) == 1


@pytest.mark.parametrize("n, total", [(3, 12), (4, 23)])
def test_tokyo_totals(n, total):
    """Test routed CX totals on Tokyo."""
    tokyo = builtin_coupling_map("tokyo")
    routed = route(_qae(n), tokyo, seed=1234, trials=64)
    assert routed_two_qubit_count(routed, SUPERCONDUCTING) == total
    check_routing(routed, tokyo)


@pytest.mark.parametrize("n", range(1, 6))
def test_all_to_all_needs_no_swaps(n):
    """Test routing on a complete graph."""
    routed = route(_qae(n), all_to_all(n + 1), seed=7, trials=4)
    assert routed.swap_count == 0
    assert routed_two_qubit_count(routed, SUPERCONDUCTING) == n * n + n


def test_iontrap_on_all_to_all(qae_n3):
    """Test the ion-trap count after routing."""
    routed = route(qae_n3, all_to_all(4), seed=7, trials=2)
    assert routed_two_qubit_count(routed, IONTRAP) == 9


def test_fixed_layout_oracle(path3):
    """Test the exhaustive search with and without a fixed layout."""
    chain = Circuit(width=3, gates=(make_gate(GateKind.CX, 0, 1), make_gate(GateKind.CX, 1, 2)))
    assert brute_force_route(chain, path3, Layout(mapping=(0, 1, 2))) == 0

    ends = Circuit(width=3, gates=(make_gate(GateKind.CX, 0, 2),))
    assert brute_force_route(ends, path3, Layout(mapping=(0, 1, 2))) == 1
    assert brute_force_route(ends, path3) == 0


def test_oracle_caps(qae_n3):
    """Test the exhaustive search size limits."""
    with pytest.raises(CapabilityError):
        brute_force_route(qae_n3, builtin_coupling_map("tokyo"))
    many = Circuit(width=2, gates=tuple(make_gate(GateKind.CX, 0, 1) for _ in range(13)))
    with pytest.raises(CapabilityError):
        brute_force_route(many, all_to_all(2))
    pair = Circuit(width=2, gates=many.gates[:2])
    with pytest.raises(StructuralError):
        brute_force_route(pair, all_to_all(3), Layout(mapping=(0,)))


def test_capacity(yorktown):
    """Test circuits wider than the device."""
    with pytest.raises(CapacityError):
        route(_qae(5), yorktown)
    with pytest.raises(CapacityError):
        brute_force_route(Circuit(width=6, gates=(make_gate(GateKind.CX, 0, 5),)), yorktown)


def test_route_is_deterministic(qae_n3, yorktown):
    """Test that a seed fixes the routing."""
    first = route(qae_n3, yorktown, seed=99, trials=8)
    second = route(qae_n3, yorktown, seed=99, trials=8)
    assert first == second
    assert first.seed == 99 and first.trials == 8


def test_routing_preserves_unitary(qae_n3, yorktown):
    """Undoing the SWAP permutation recovers the embedded original."""
    routed = route(qae_n3, yorktown, seed=3, trials=16)
    restored = circuit_unitary(undo_permutation(routed))
    original = circuit_unitary(embed(qae_n3.without_measurements(), routed.initial_layout, 5))
    assert equivalent_up_to_global_phase(restored, original, tol=1e-9)


def test_measurements_follow_final_layout(qae_n3, yorktown):
    """Test measurement remapping after SWAPs."""
    routed = route(qae_n3, yorktown, seed=3, trials=16)
    measured = {g.clbit: g.qubits[0] for g in routed.circuit.gates if g.kind is GateKind.MEASURE}
    assert measured == {l: routed.final_layout[l] for l in range(3)}


def test_check_routing_rejects_off_edge_gate(yorktown):
    """Test rejecting a gate between uncoupled qubits."""
    bad = RoutedCircuit(
        circuit=Circuit(width=5, gates=(make_gate(GateKind.CX, 0, 3),)),
        initial_layout=Layout(mapping=(0, 3)),
        final_layout=Layout(mapping=(0, 3)),
        swap_count=0,
        seed=0,
        trials=1,
        device="yorktown",
    )
    with pytest.raises(StructuralError):
        check_routing(bad, yorktown)


def test_check_routing_rejects_wrong_final_layout(qae_n3, yorktown):
    """Test rejecting a tampered final layout."""
    routed = route(qae_n3, yorktown, seed=3, trials=16)
    wrong = tuple(reversed(routed.final_layout.mapping))
    tampered = routed.model_copy(update={"final_layout": Layout(mapping=wrong)})
    with pytest.raises(StructuralError):
        check_routing(tampered, yorktown)


@pytest.mark.parametrize(
    "device_name, n",
    [("yorktown", 1), ("yorktown", 2), ("yorktown", 3), ("ring", 1), ("ring", 2)],
)
def test_heuristic_close_to_oracle(device_name, n):
    """Test the heuristic against the exhaustive search."""
    if device_name == "ring":
        device = CouplingMap(name="ring", qubit_count=4, edges=[(0, 1), (1, 2), (2, 3), (3, 0)])
    else:
        device = builtin_coupling_map(device_name)
    c = _qae(n)
    assert route(c, device, seed=1234, trials=64).swap_count <= brute_force_route(c, device) + 1
