"""Tests for device coupling maps."""
from itertools import combinations

import pytest
from pydantic import ValidationError

from tbill_qae.errors import StructuralError, UnknownDeviceError
from tbill_qae.topology import (
    CouplingMap,
    all_to_all,
    builtin_coupling_map,
    load_coupling_map,
    parse_coupling_map,
)


def test_yorktown_bow_tie():
    """Two triangles sharing qubit 2."""
    york = builtin_coupling_map("yorktown")
    assert york.qubit_count == 5
    assert york.edges == {(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)}
    assert york.degree(2) == 4
    assert york.max_degree_qubits() == [2]
    assert york.distance[0, 3] == 2
    assert york.distance[1, 2] == 1


def test_tokyo_clique():
    """Test the fully connected square on Tokyo."""
    tokyo = builtin_coupling_map("tokyo")
    assert tokyo.qubit_count == 20
    assert all(tokyo.is_adjacent(a, b) for a, b in combinations((5, 6, 10, 11), 2))
    assert not tokyo.is_complete


def test_cairo_heavy_hex():
    """Test the low degree and long paths on Cairo."""
    cairo = builtin_coupling_map("cairo")
    assert cairo.qubit_count == 27
    assert max(cairo.degree(q) for q in range(27)) <= 3
    assert cairo.distance.max() > 5


def test_all_to_all():
    """Test complete graphs by size and by name."""
    full = all_to_all(4)
    assert full.is_complete
    assert len(full.edges) == 6
    assert builtin_coupling_map("all-to-all(4)") == full
    assert builtin_coupling_map("all-to-all", qubit_count=4) == full
    assert all_to_all(1).edges == frozenset()
    with pytest.raises(StructuralError):
        builtin_coupling_map("all-to-all")
    with pytest.raises(StructuralError):
        all_to_all(0)


def test_unknown_device():
    """Test looking up a device that is not built in."""
    with pytest.raises(UnknownDeviceError):
        builtin_coupling_map("melbourne")


def test_edges_are_normalized():
    """Test that edges are stored with the smaller qubit first."""
    cmap = CouplingMap(name="pair", qubit_count=2, edges=[(1, 0)])
    assert cmap.edges == {(0, 1)}
    assert cmap.is_adjacent(1, 0)
    assert cmap.neighbors(0) == [1]


@pytest.mark.parametrize(
    "edges",
    [[(0, 0), (0, 1)], [(0, 3)], [(0, 1)]],
    ids=["self-loop", "out-of-range", "disconnected"],
)
def test_invalid_graphs(edges):
    """Test rejecting self-loops, stray qubits and split graphs."""
    with pytest.raises(ValidationError):
        CouplingMap(name="bad", qubit_count=3, edges=edges)


def test_parse_coupling_map():
    """Test parsing a map with comments."""
    text = "# a path\npath 3\n0 1  # first\n1 2\n"
    cmap = parse_coupling_map(text)
    assert cmap.name == "path"
    assert cmap.edges == {(0, 1), (1, 2)}


@pytest.mark.parametrize(
    "text",
    ["0 1 2\n", "path x\n0 1\n", "path 2\n0 1 2\n", "path 2\n0 a\n", "path 3\n0 1\n", ""],
)
def test_parse_errors(text):
    """Test malformed coupling map text."""
    with pytest.raises(StructuralError):
        parse_coupling_map(text, source="test.map")


def test_load_coupling_map(tmp_path):
    """Test loading a coupling map from disk."""
    path = tmp_path / "ring.map"
    path.write_text("ring 4\n0 1\n1 2\n2 3\n3 0\n")
    ring = load_coupling_map(path)
    assert ring.qubit_count == 4
    assert ring.distance[0, 2] == 2
    assert ring.max_degree_qubits() == [0, 1, 2, 3]
