"""
SWAP-insertion routing onto a coupling map.

``route`` runs independent stochastic trials and keeps the one with the fewest
inserted SWAPs. A trial:

1. places the busiest logical qubit on a maximum-degree physical qubit, then
   places the rest greedily next to the partners they interact with most;
2. walks the gates in program order; whenever a two-qubit gate is not on an
   edge it inserts one SWAP at a time, choosing among the SWAPs that bring
   the pair closer the one that minimizes the decayed distance sum over the
   next ``window`` two-qubit gates.

Random choices only break ties, and each trial draws from its own generator
seeded with ``(seed, trial)``, so results are reproducible.

``brute_force_route`` is the exact minimum for toy instances.
"""

import logging
from collections import Counter, deque
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .circuit import Circuit, GateInstance, GateKind, count_two_qubit_gates, make_gate
from .config import get_settings
from .errors import CapabilityError, CapacityError, StructuralError
from .topology import CouplingMap
from .transpiler import NativeGateSet, transpile

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_QUBITS = 6
BRUTE_FORCE_MAX_GATES = 12

_TIE_TOLERANCE = 1e-12


class Layout(BaseModel):
    """Injective logical -> physical assignment; ``mapping[l]`` hosts logical ``l``."""

    model_config = ConfigDict(frozen=True)

    mapping: Tuple[int, ...]

    @field_validator("mapping")
    @classmethod
    def check_injective(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(p < 0 for p in v):
            raise ValueError("physical indices must be non-negative")
        if len(set(v)) != len(v):
            raise ValueError("layout is not injective")
        return v

    def __len__(self) -> int:
        return len(self.mapping)

    def __getitem__(self, logical: int) -> int:
        return self.mapping[logical]

    def inverse(self) -> Dict[int, int]:
        return {p: l for l, p in enumerate(self.mapping)}

    def check_fits(self, qubit_count: int) -> None:
        if any(p >= qubit_count for p in self.mapping):
            raise StructuralError(f"layout {self.mapping} leaves a {qubit_count}-qubit device")


class RoutedCircuit(BaseModel):
    """Best routing found, plus the per-trial SWAP counts behind it."""

    model_config = ConfigDict(frozen=True)

    circuit: Circuit
    initial_layout: Layout
    final_layout: Layout
    swap_count: int = Field(ge=0)
    swap_positions: Tuple[int, ...] = ()
    seed: int
    trials: int = Field(ge=1)
    trial_swap_counts: Tuple[int, ...] = ()
    device: str

    @property
    def mean_swaps(self) -> float:
        return float(np.mean(self.trial_swap_counts))

    @property
    def std_swaps(self) -> float:
        if len(self.trial_swap_counts) < 2:
            return 0.0
        return float(np.std(self.trial_swap_counts, ddof=1))


def _pair(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _pick(options: Sequence, rng: np.random.Generator):
    return options[int(rng.integers(len(options)))]


def _argmin_ties(costs: Dict, rng: np.random.Generator):
    best = min(costs.values())
    options = sorted(k for k, v in costs.items() if v <= best + _TIE_TOLERANCE)
    return _pick(options, rng)


def _initial_layout(
    width: int,
    device: CouplingMap,
    weights: Counter,
    rng: np.random.Generator,
) -> List[int]:
    load = [0] * width
    for (a, b), w in weights.items():
        load[a] += w
        load[b] += w

    hottest = max(load)
    start = _pick([q for q in range(width) if load[q] == hottest], rng)
    l2p = {start: _pick(device.max_degree_qubits(), rng)}
    free = set(range(device.qubit_count)) - {l2p[start]}
    remaining = set(range(width)) - {start}
    dist = device.distance

    while remaining:
        def affinity(q: int) -> int:
            return sum(weights.get(_pair(q, m), 0) for m in l2p)

        nxt = max(sorted(remaining), key=lambda q: (affinity(q), load[q]))
        if affinity(nxt):
            costs = {
                p: sum(weights.get(_pair(nxt, m), 0) * dist[p, pm] for m, pm in l2p.items())
                for p in free
            }
        else:
            # No interaction with the placed set; keep the layout compact.
            costs = {p: sum(dist[p, pm] for pm in l2p.values()) for p in free}
        l2p[nxt] = _argmin_ties(costs, rng)
        free.discard(l2p[nxt])
        remaining.discard(nxt)

    return [l2p[q] for q in range(width)]


def _route_trial(
    c: Circuit,
    device: CouplingMap,
    rng: np.random.Generator,
    window: int,
    decay: float,
) -> Tuple[List[GateInstance], List[int], List[int], List[int]]:
    two_qubit = [g.qubits for g in c.gates if g.kind.is_two_qubit]
    weights = Counter(_pair(a, b) for a, b in two_qubit)
    initial = _initial_layout(c.width, device, weights, rng)

    dist = device.distance
    l2p = list(initial)
    p2l: Dict[int, int] = {p: l for l, p in enumerate(l2p)}
    out: List[GateInstance] = []
    swap_positions: List[int] = []
    front = 0

    def apply_swap(u: int, v: int) -> None:
        lu, lv = p2l.pop(u, None), p2l.pop(v, None)
        if lu is not None:
            l2p[lu] = v
            p2l[v] = lu
        if lv is not None:
            l2p[lv] = u
            p2l[u] = lv

    def lookahead(start: int) -> float:
        upcoming = two_qubit[start : start + window]
        return sum(decay**k * dist[l2p[a], l2p[b]] for k, (a, b) in enumerate(upcoming))

    for g in c.gates:
        if not g.kind.is_two_qubit:
            out.append(
                make_gate(g.kind, l2p[g.qubits[0]], params=g.params, clbit=g.clbit)
            )
            continue

        a, b = g.qubits
        while dist[l2p[a], l2p[b]] > 1:
            pa, pb = l2p[a], l2p[b]
            here = dist[pa, pb]
            candidates = {
                _pair(pa, n) for n in device.neighbors(pa) if dist[n, pb] < here
            } | {_pair(pb, n) for n in device.neighbors(pb) if dist[pa, n] < here}
            costs = {}
            for u, v in candidates:
                apply_swap(u, v)
                costs[(u, v)] = lookahead(front)
                apply_swap(u, v)
            u, v = _argmin_ties(costs, rng)
            apply_swap(u, v)
            swap_positions.append(len(out))
            out.append(make_gate(GateKind.SWAP, u, v))

        out.append(make_gate(g.kind, l2p[a], l2p[b], params=g.params))
        front += 1

    return out, initial, l2p, swap_positions


def route(
    c: Circuit,
    device: CouplingMap,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    window: Optional[int] = None,
    decay: Optional[float] = None,
) -> RoutedCircuit:
    """
    Route ``c`` onto ``device``; the best of ``trials`` attempts is returned
    with ties going to the earliest trial.
    """
    settings = get_settings()
    seed = settings.DEFAULT_SEED if seed is None else seed
    trials = settings.ROUTE_TRIALS if trials is None else trials
    window = settings.LOOKAHEAD_WINDOW if window is None else window
    decay = settings.LOOKAHEAD_DECAY if decay is None else decay
    if trials < 1:
        raise StructuralError("need at least one routing trial")
    if c.width > device.qubit_count:
        raise CapacityError(
            f"{c.width}-qubit circuit does not fit {device.name} ({device.qubit_count} qubits)"
        )

    best = None
    counts: List[int] = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        result = _route_trial(c, device, rng, window, decay)
        counts.append(len(result[3]))
        if best is None or len(result[3]) < len(best[3]):
            best = result
        logger.debug(f"Trial {trial} on {device.name}: {counts[-1]} swaps")

    gates, initial, final, swap_positions = best
    routed = RoutedCircuit(
        circuit=Circuit(
            width=device.qubit_count, gates=tuple(gates), classical_width=c.classical_width
        ),
        initial_layout=Layout(mapping=tuple(initial)),
        final_layout=Layout(mapping=tuple(final)),
        swap_count=len(swap_positions),
        swap_positions=tuple(swap_positions),
        seed=seed,
        trials=trials,
        trial_swap_counts=tuple(counts),
        device=device.name,
    )
    logger.info(
        f"Routed {c.width}-qubit circuit onto {device.name}: "
        f"{routed.swap_count} swaps (best of {trials}, seed {seed})"
    )
    return routed


def routed_two_qubit_count(r: RoutedCircuit, target: NativeGateSet) -> int:
    """Two-qubit gates left after lowering the routed circuit to ``target``."""
    return count_two_qubit_gates(transpile(r.circuit, target))


def brute_force_route(
    c: Circuit,
    device: CouplingMap,
    initial_layout: Optional[Layout] = None,
) -> int:
    """
    Exact minimum SWAP count over all initial layouts (or the given one).

    0-1 breadth-first search over (gate index, placement): executing a gate
    that already sits on an edge is free, every edge SWAP costs one.
    """
    pairs = [g.qubits for g in c.gates if g.kind.is_two_qubit]
    if device.qubit_count > BRUTE_FORCE_MAX_QUBITS or len(pairs) > BRUTE_FORCE_MAX_GATES:
        raise CapabilityError(
            f"exhaustive routing is limited to {BRUTE_FORCE_MAX_QUBITS} device qubits "
            f"and {BRUTE_FORCE_MAX_GATES} two-qubit gates"
        )
    if c.width > device.qubit_count:
        raise CapacityError(f"{c.width}-qubit circuit does not fit {device.name}")

    if initial_layout is not None:
        initial_layout.check_fits(device.qubit_count)
        if len(initial_layout) != c.width:
            raise StructuralError("initial layout must place every logical qubit")
        starts = [initial_layout.mapping]
    else:
        starts = list(permutations(range(device.qubit_count), c.width))

    edges = sorted(device.edges)
    best: Dict[Tuple[int, Tuple[int, ...]], int] = {}
    queue: deque = deque()
    for placement in starts:
        best[(0, placement)] = 0
        queue.append((0, placement))

    while queue:
        state = queue.popleft()
        index, placement = state
        cost = best[state]
        if index == len(pairs):
            logger.debug(f"Exhaustive search settled {len(best)} states")
            return cost

        a, b = pairs[index]
        if device.is_adjacent(placement[a], placement[b]):
            nxt = (index + 1, placement)
            if cost < best.get(nxt, cost + 1):
                best[nxt] = cost
                queue.appendleft(nxt)
            continue

        for u, v in edges:
            swapped = tuple(v if p == u else u if p == v else p for p in placement)
            nxt = (index, swapped)
            if cost + 1 < best.get(nxt, cost + 2):
                best[nxt] = cost + 1
                queue.append(nxt)

    raise StructuralError(f"no routing found on {device.name}")


def embed(c: Circuit, layout: Layout, width: int) -> Circuit:
    """Relabel logical qubits of ``c`` onto physical qubits of a ``width``-qubit register."""
    if len(layout) != c.width:
        raise StructuralError(f"layout covers {len(layout)} qubits, circuit has {c.width}")
    layout.check_fits(width)
    gates = [
        make_gate(g.kind, *(layout[q] for q in g.qubits), params=g.params, clbit=g.clbit)
        for g in c.gates
    ]
    return Circuit(width=width, gates=tuple(gates), classical_width=c.classical_width)


def _replay_positions(r: RoutedCircuit) -> List[int]:
    # Item i < width is logical qubit i; the rest are the idle physical
    # qubits in ascending order. Returns item -> physical after all SWAPs.
    width = len(r.initial_layout)
    idle = sorted(set(range(r.circuit.width)) - set(r.initial_layout.mapping))
    position = list(r.initial_layout.mapping) + idle
    holder = {p: item for item, p in enumerate(position)}
    for index in r.swap_positions:
        u, v = r.circuit.gates[index].qubits
        iu, iv = holder[u], holder[v]
        position[iu], position[iv] = v, u
        holder[u], holder[v] = iv, iu
    if position[:width] != list(r.final_layout.mapping):
        raise StructuralError("replaying the inserted SWAPs does not reach the final layout")
    return position


def undo_permutation(r: RoutedCircuit) -> Circuit:
    """
    The routed circuit without measurements, followed by SWAPs that return
    every physical qubit to where it started; it implements the same unitary
    as ``embed(original, r.initial_layout, width)``.
    """
    width = len(r.initial_layout)
    position = _replay_positions(r)
    idle = sorted(set(range(r.circuit.width)) - set(r.initial_layout.mapping))
    home = list(r.initial_layout.mapping) + idle
    holder = {p: item for item, p in enumerate(position)}

    restore: List[GateInstance] = []
    for item, target in enumerate(home):
        current = position[item]
        if current == target:
            continue
        other = holder[target]
        restore.append(make_gate(GateKind.SWAP, current, target))
        position[item], position[other] = target, current
        holder[target], holder[current] = item, other
    logger.debug(f"Restoring {width} logical qubits took {len(restore)} swaps")
    stripped = r.circuit.without_measurements()
    return stripped.with_gates(stripped.gates + tuple(restore))


def check_routing(r: RoutedCircuit, device: CouplingMap) -> None:
    """Raise ``StructuralError`` unless every two-qubit gate sits on a device edge."""
    if r.circuit.width != device.qubit_count:
        raise StructuralError(
            f"routed circuit width {r.circuit.width} does not match {device.name}"
        )
    for index, g in enumerate(r.circuit.gates):
        if g.kind.is_two_qubit and not device.is_adjacent(*g.qubits):
            raise StructuralError(
                f"gate {index} ({g.kind.value}) on {g.qubits} is not a {device.name} edge"
            )
    if len(r.swap_positions) != r.swap_count:
        raise StructuralError("swap_count disagrees with the recorded swap positions")
    if any(r.circuit.gates[i].kind is not GateKind.SWAP for i in r.swap_positions):
        raise StructuralError("recorded swap position does not hold a SWAP")
    _replay_positions(r)
