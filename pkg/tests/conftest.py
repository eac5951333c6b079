import json

import numpy as np
import pytest
from hypothesis import strategies as st

from pou_lab.graph import Edge, Graph, disjoint_paths_graph, graph_to_json


def diamond_graph():
    """s -> v over two parallel edges, then a single bottleneck edge v -> t."""
    return Graph.from_edges([Edge("a1", "s", "v"), Edge("a2", "s", "v"), Edge("b", "v", "t")])


def crossing_graph():
    """Two s-t routes sharing a middle edge plus a bypass, so paths overlap."""
    return Graph.from_edges([
        Edge("e1", "s", "u"), Edge("e2", "s", "w"), Edge("e3", "u", "w"),
        Edge("e4", "w", "t"), Edge("e5", "u", "t"),
    ])


def random_dag(rng, n_vertices, n_edges):
    names = ["s"] + [f"v{i}" for i in range(1, n_vertices - 1)] + ["t"]
    pairs = [(names[i], names[i + 1]) for i in range(len(names) - 1)]
    while len(pairs) < n_edges:
        a, b = sorted(rng.choice(len(names), size=2, replace=False))
        pairs.append((names[a], names[b]))
    return Graph.from_edges([Edge(f"e{i:02d}", a, b) for i, (a, b) in enumerate(pairs)])


@st.composite
def dags(draw, max_vertices=5, max_edges=9):
    seed = draw(st.integers(0, 2**32 - 1))
    nv = draw(st.integers(2, max_vertices))
    ne = draw(st.integers(nv - 1, max(nv - 1, max_edges)))
    return random_dag(np.random.default_rng(seed), nv, ne)


@st.composite
def disjoint_graphs(draw, max_paths=4, max_len=4):
    lengths = draw(st.lists(st.integers(1, max_len), min_size=1, max_size=max_paths))
    return disjoint_paths_graph(sorted(lengths))


@pytest.fixture
def two_parallel():
    return disjoint_paths_graph([1, 1])


@pytest.fixture
def three_parallel():
    return disjoint_paths_graph([1, 1, 1])


@pytest.fixture
def two_routes():
    """A short route of one edge and a long route of two edges."""
    return disjoint_paths_graph([1, 2])


@pytest.fixture
def diamond():
    return diamond_graph()


@pytest.fixture
def crossing():
    return crossing_graph()


@pytest.fixture
def write_graph(tmp_path):
    def write(graph, name="g.json"):
        path = tmp_path / name
        path.write_text(json.dumps(graph_to_json(graph)))
        return str(path)
    return write
