"""
Device coupling graphs.

Built-in maps ship as ``data/*.map`` text files::

    # comment
    name qubit_count
    u v
    ...

and are checked against the structural facts the routing results depend on
when they are loaded.
"""

import logging
import re
from functools import cached_property, lru_cache
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import StructuralError, UnknownDeviceError

logger = logging.getLogger(__name__)

ALL_TO_ALL = "all-to-all"
BUILTIN_DEVICES = ("yorktown", "tokyo", "cairo")

_ALL_TO_ALL_RE = re.compile(r"^all-to-all(?:\((\d+)\))?$")


class CouplingMap(BaseModel):
    """Undirected, connected interaction graph of a device."""

    model_config = ConfigDict(frozen=True)

    name: str
    qubit_count: int = Field(ge=1)
    edges: FrozenSet[Tuple[int, int]]

    @field_validator("edges", mode="before")
    @classmethod
    def normalize_edges(cls, v):
        return frozenset(tuple(sorted((int(a), int(b)))) for a, b in v)

    @model_validator(mode="after")
    def check_graph(self) -> "CouplingMap":
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on qubit {a}")
            if a < 0 or b >= self.qubit_count:
                raise ValueError(f"edge ({a}, {b}) outside {self.qubit_count} qubits")
        if self.qubit_count > 1 and not nx.is_connected(self._build_graph()):
            raise ValueError(f"coupling map {self.name!r} is not connected")
        return self

    def _build_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.qubit_count))
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def graph(self) -> nx.Graph:
        return self._build_graph()

    @cached_property
    def distance(self) -> np.ndarray:
        """All-pairs shortest-path lengths in edges."""
        dist = np.zeros((self.qubit_count, self.qubit_count), dtype=int)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, length in lengths.items():
                dist[source, target] = length
        return dist

    @property
    def is_complete(self) -> bool:
        n = self.qubit_count
        return len(self.edges) == n * (n - 1) // 2

    def is_adjacent(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)

    def degree(self, q: int) -> int:
        return self.graph.degree[q]

    def max_degree_qubits(self) -> List[int]:
        top = max(d for _, d in self.graph.degree)
        return sorted(q for q, d in self.graph.degree if d == top)

    def neighbors(self, q: int) -> List[int]:
        return sorted(self.graph.neighbors(q))


def all_to_all(k: int) -> CouplingMap:
    """Complete graph on ``k`` qubits."""
    if k < 1:
        raise StructuralError("all-to-all needs at least one qubit")
    return CouplingMap(name=f"{ALL_TO_ALL}({k})", qubit_count=k, edges=combinations(range(k), 2))


def parse_coupling_map(text: str, source: str = "<string>") -> CouplingMap:
    """Parse the coupling-map text format."""
    header: Optional[Tuple[str, int]] = None
    edges: List[Tuple[int, int]] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise StructuralError(f"{source}:{line_number}: expected two fields, got {line!r}")
        if header is None:
            name, count = fields
            if not count.isdigit():
                raise StructuralError(f"{source}:{line_number}: bad qubit count {count!r}")
            header = (name, int(count))
            continue
        try:
            edges.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise StructuralError(f"{source}:{line_number}: bad edge {line!r}") from None
    if header is None:
        raise StructuralError(f"{source}: missing 'name qubit_count' header")
    try:
        return CouplingMap(name=header[0], qubit_count=header[1], edges=edges)
    except ValueError as exc:
        raise StructuralError(f"{source}: {exc}") from exc


def load_coupling_map(path: Union[str, Path]) -> CouplingMap:
    """Read a coupling map from a file."""
    path = Path(path)
    cmap = parse_coupling_map(path.read_text(encoding="utf-8"), source=str(path))
    logger.info(f"Loaded coupling map {cmap.name!r} ({cmap.qubit_count} qubits) from {path}")
    return cmap


def _check_yorktown(cmap: CouplingMap) -> None:
    if cmap.qubit_count != 5 or cmap.degree(2) != 4 or len(cmap.edges) != 6:
        raise StructuralError("yorktown must be a 5-qubit bow-tie centred on qubit 2")


def _check_tokyo(cmap: CouplingMap) -> None:
    if cmap.qubit_count != 20:
        raise StructuralError("tokyo must have 20 qubits")
    if not all(cmap.is_adjacent(a, b) for a, b in combinations((5, 6, 10, 11), 2)):
        raise StructuralError("tokyo qubits {5, 6, 10, 11} must be fully connected")


def _check_cairo(cmap: CouplingMap) -> None:
    if cmap.qubit_count != 27:
        raise StructuralError("cairo must have 27 qubits")
    if max(d for _, d in cmap.graph.degree) > 3:
        raise StructuralError("cairo is heavy-hex; no qubit may exceed degree 3")


_STRUCTURE_CHECKS: Dict[str, Callable[[CouplingMap], None]] = {
    "yorktown": _check_yorktown,
    "tokyo": _check_tokyo,
    "cairo": _check_cairo,
}


@lru_cache(maxsize=None)
def _load_builtin(name: str) -> CouplingMap:
    data = resources.files("tbill_qae").joinpath("data")
    text = data.joinpath(f"{name}.map").read_text(encoding="utf-8")
    cmap = parse_coupling_map(text, source=f"{name}.map")
    _STRUCTURE_CHECKS[name](cmap)
    return cmap


def builtin_coupling_map(name: str, qubit_count: Optional[int] = None) -> CouplingMap:
    """
    Look up a shipped coupling map.

    ``all-to-all`` takes its size either inline (``all-to-all(4)``) or from
    ``qubit_count``.
    """
    match = _ALL_TO_ALL_RE.match(name)
    if match:
        k = int(match.group(1)) if match.group(1) else qubit_count
        if k is None:
            raise StructuralError("all-to-all needs a qubit count")
        return all_to_all(k)
    if name not in BUILTIN_DEVICES:
        raise UnknownDeviceError(
            f"unknown device {name!r}; expected one of {list(BUILTIN_DEVICES) + [ALL_TO_ALL]}"
        )
    return _load_builtin(name)
