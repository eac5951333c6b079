"""s-t DAG model: validation, path enumeration, flows, mincut and prefix tables.

Edges carry unit capacity and unit cost.  Parallel edges are distinct edges
with distinct ids; nothing here collapses them.  Ties are always broken by
lexicographic edge-id order so results are reproducible.
"""
import heapq
import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

from .config import DEFAULT_CAPS
from .errors import (
    CycleDetected,
    DanglingEdge,
    DuplicateEdgeId,
    GraphFormatError,
    NotAFlow,
    NotMaximal,
    PathCapExceeded,
    SourceSinkInvalid,
)

DEFAULT_PATH_CAP = DEFAULT_CAPS.paths


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Graph:
    """Directed s-t multigraph.

    Vertices are kept sorted and edges are kept sorted by id, so two graphs
    built from the same data in different orders compare equal.  Structural
    invariants (acyclicity, coverage) are checked by :func:`validate`, not
    here, so that invalid inputs can still be constructed and diagnosed.
    """

    vertices: tuple
    source: str
    sink: str
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", tuple(sorted(edges, key=lambda e: e.id)))

    @classmethod
    def from_edges(cls, edges, source="s", sink="t", vertices=None):
        edges = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        if vertices is None:
            vertices = {source, sink}
            for e in edges:
                vertices.update((e.tail, e.head))
        return cls(tuple(vertices), source, sink, tuple(edges))

    @cached_property
    def edge_ids(self):
        return tuple(e.id for e in self.edges)

    @cached_property
    def edge_map(self):
        return {e.id: e for e in self.edges}

    @cached_property
    def edge_index(self):
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def out_edges(self):
        out = defaultdict(list)
        for e in self.edges:
            out[e.tail].append(e)
        return dict(out)

    @cached_property
    def in_edges(self):
        inc = defaultdict(list)
        for e in self.edges:
            inc[e.head].append(e)
        return dict(inc)

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class Path:
    """An s-t path as its ordered edge-id sequence."""

    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))

    @property
    def length(self):
        return len(self.edges)

    @cached_property
    def edge_set(self):
        return frozenset(self.edges)

    def sort_key(self):
        return (self.length, self.edges)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)


@dataclass(frozen=True)
class PrefixTable:
    """Minimal total-length sets of ``i`` edge-disjoint paths, ``i = 1..mincut``.

    ``sums[i - 1]`` is the minimal total edge count of ``i`` edge-disjoint
    s-t paths and ``path_sets[i - 1]`` is a witness, sorted by length.
    """

    mincut: int
    sums: tuple
    path_sets: tuple = field(repr=False)


# -- validation -------------------------------------------------------------


def _topological_order(graph):
    indeg = {v: 0 for v in graph.vertices}
    for e in graph.edges:
        indeg[e.head] += 1
    queue = deque(sorted(v for v, d in indeg.items() if d == 0))
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for e in graph.out_edges.get(v, ()):
            indeg[e.head] -= 1
            if indeg[e.head] == 0:
                queue.append(e.head)
    if len(order) != len(graph.vertices):
        stuck = sorted(v for v, d in indeg.items() if d > 0)
        raise CycleDetected(f"graph has a directed cycle through {stuck[:5]}")
    return order


def _reachable(start, step):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in step(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def validate(graph: Graph) -> None:
    """Raise if ``graph`` is not a valid s-t DAG; return ``None`` otherwise."""
    vertices = set(graph.vertices)
    if graph.source == graph.sink:
        raise SourceSinkInvalid("source and sink must differ")
    for name, v in (("source", graph.source), ("sink", graph.sink)):
        if v not in vertices:
            raise SourceSinkInvalid(f"{name} {v!r} is not a vertex")
    seen = set()
    for e in graph.edges:
        if e.id in seen:
            raise DuplicateEdgeId(f"edge id {e.id!r} used more than once")
        seen.add(e.id)
        if e.tail not in vertices or e.head not in vertices:
            raise GraphFormatError(f"edge {e.id!r} references an unknown vertex")
    _topological_order(graph)
    from_s = _reachable(graph.source, lambda v: (e.head for e in graph.out_edges.get(v, ())))
    to_t = _reachable(graph.sink, lambda v: (e.tail for e in graph.in_edges.get(v, ())))
    if graph.sink not in from_s:
        raise SourceSinkInvalid("sink is not reachable from source")
    for e in graph.edges:
        if e.tail not in from_s or e.head not in to_t:
            raise DanglingEdge(f"edge {e.id!r} lies on no s-t path")


@lru_cache(maxsize=256)
def _checked(graph):
    validate(graph)
    return True


def ensure_valid(graph):
    _checked(graph)
    return graph


def check_path(graph: Graph, path: Path) -> bool:
    """True iff ``path`` is an s-t path of ``graph``."""
    if not path.edges:
        return False
    v = graph.source
    visited = {v}
    for eid in path.edges:
        e = graph.edge_map.get(eid)
        if e is None or e.tail != v or e.head in visited:
            return False
        v = e.head
        visited.add(v)
    return v == graph.sink


# -- paths ------------------------------------------------------------------


@lru_cache(maxsize=256)
def _enumerate(graph, cap):
    found = []
    stack = [(graph.source, ())]
    while stack:
        v, prefix = stack.pop()
        if v == graph.sink:
            found.append(Path(prefix))
            if len(found) > cap:
                raise PathCapExceeded(f"more than {cap} s-t paths")
            continue
        for e in reversed(graph.out_edges.get(v, ())):
            stack.append((e.head, prefix + (e.id,)))
    found.sort(key=Path.sort_key)
    return tuple(found)


def enumerate_st_paths(graph: Graph, cap: int = DEFAULT_PATH_CAP) -> list:
    """All s-t paths, shortest first, equal lengths ordered by edge ids."""
    ensure_valid(graph)
    return list(_enumerate(graph, cap))


def is_disjoint_paths_graph(graph: Graph) -> bool:
    ensure_valid(graph)
    for v in graph.vertices:
        if v in (graph.source, graph.sink):
            continue
        n_in = len(graph.in_edges.get(v, ()))
        n_out = len(graph.out_edges.get(v, ()))
        if (n_in, n_out) not in ((0, 0), (1, 1)):
            return False
    return True


def paths_disjoint(paths: Sequence[Path]) -> bool:
    used = set()
    for p in paths:
        if used & p.edge_set:
            return False
        used |= p.edge_set
    return True


# -- flows ------------------------------------------------------------------


class _Residual:
    """Unit-capacity residual network; arc 2i is edge i forward, 2i+1 backward."""

    def __init__(self, graph):
        self.graph = graph
        self.heads = []
        self.tails = []
        self.cap = []
        self.cost = []
        self.adj = defaultdict(list)
        for e in graph.edges:
            a = len(self.heads)
            self.tails += [e.tail, e.head]
            self.heads += [e.head, e.tail]
            self.cap += [1, 0]
            self.cost += [1, -1]
            self.adj[e.tail].append(a)
            self.adj[e.head].append(a + 1)
        self.potential = {v: 0 for v in graph.vertices}
        self.value = 0
        self.total_cost = 0

    def _shortest_path(self):
        # Dijkstra on reduced costs; all reduced costs stay nonnegative.
        order = {v: i for i, v in enumerate(self.graph.vertices)}
        dist = {self.graph.source: 0}
        parent = {}
        heap = [(0, order[self.graph.source], self.graph.source)]
        done = set()
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            for a in self.adj.get(v, ()):
                if self.cap[a] <= 0:
                    continue
                w = self.heads[a]
                nd = d + self.cost[a] + self.potential[v] - self.potential[w]
                if w not in dist or nd < dist[w]:
                    dist[w] = nd
                    parent[w] = a
                    heapq.heappush(heap, (nd, order[w], w))
        return dist, parent

    def augment(self):
        """Push one unit along a cheapest residual s-t path; False if none."""
        dist, parent = self._shortest_path()
        t = self.graph.sink
        if t not in dist:
            return False
        for v, d in dist.items():
            self.potential[v] += d
        v = t
        while v != self.graph.source:
            a = parent[v]
            self.cap[a] -= 1
            self.cap[a ^ 1] += 1
            self.total_cost += self.cost[a]
            v = self.tails[a]
        self.value += 1
        return True

    def flow(self):
        return {e.id: self.cap[2 * i + 1] for i, e in enumerate(self.graph.edges)}

    def source_side(self):
        return _reachable(
            self.graph.source,
            lambda v: (self.heads[a] for a in self.adj.get(v, ()) if self.cap[a] > 0),
        )


def _split_flow(graph, flow):
    remaining = {eid for eid, x in flow.items() if x}
    paths = []
    while any(e.id in remaining for e in graph.out_edges.get(graph.source, ())):
        v = graph.source
        edges = []
        while v != graph.sink:
            e = next(e for e in graph.out_edges.get(v, ()) if e.id in remaining)
            remaining.discard(e.id)
            edges.append(e.id)
            v = e.head
        paths.append(Path(edges))
    paths.sort(key=Path.sort_key)
    return paths


def flow_value(graph: Graph, flow: Mapping[str, int]) -> int:
    return sum(flow.get(e.id, 0) for e in graph.out_edges.get(graph.source, ()))


def check_flow(graph: Graph, flow: Mapping[str, int], *, maximal=True) -> None:
    """Raise unless ``flow`` is a binary s-t flow (and maximal, if asked)."""
    unknown = set(flow) - set(graph.edge_ids)
    if unknown:
        raise NotAFlow(f"flow mentions unknown edges {sorted(unknown)[:5]}")
    for eid, x in flow.items():
        if x not in (0, 1):
            raise NotAFlow(f"flow on {eid!r} must be 0 or 1, got {x!r}")
    for v in graph.vertices:
        if v in (graph.source, graph.sink):
            continue
        inflow = sum(flow.get(e.id, 0) for e in graph.in_edges.get(v, ()))
        outflow = sum(flow.get(e.id, 0) for e in graph.out_edges.get(v, ()))
        if inflow != outflow:
            raise NotAFlow(f"conservation violated at {v!r}: in {inflow}, out {outflow}")
    if maximal:
        free = _reachable(
            graph.source,
            lambda v: (e.head for e in graph.out_edges.get(v, ()) if not flow.get(e.id, 0)),
        )
        if graph.sink in free:
            raise NotMaximal("an s-t path of unused edges remains")


def decompose_flow(graph: Graph, flow: Mapping[str, int]) -> list:
    """Split a maximal binary flow into its edge-disjoint paths, shortest first.

    At every vertex the lexicographically first unused flow edge is taken, which
    fixes one decomposition when several exist.
    """
    ensure_valid(graph)
    check_flow(graph, flow, maximal=True)
    return _split_flow(graph, flow)


@lru_cache(maxsize=256)
def _solve_flows(graph):
    res = _Residual(graph)
    sums, sets = [], []
    while res.augment():
        sums.append(res.total_cost)
        sets.append(tuple(_split_flow(graph, res.flow())))
    cut_side = res.source_side()
    witness = tuple(e.id for e in graph.edges if e.tail in cut_side and e.head not in cut_side)
    return PrefixTable(res.value, tuple(sums), tuple(sets)), witness, res.flow()


def mincut(graph: Graph) -> tuple:
    """``(mincut size, cut edge ids)``; the cut is the residual-reachable side of a max flow."""
    ensure_valid(graph)
    table, witness, _ = _solve_flows(graph)
    return table.mincut, witness


def max_flow(graph: Graph) -> dict:
    ensure_valid(graph)
    return dict(_solve_flows(graph)[2])


def prefix_table(graph: Graph) -> PrefixTable:
    """Min-cost flows of every value 1..mincut by successive shortest paths.

    Each augmentation along a cheapest residual path keeps the current flow
    min-cost for its value, so one run yields every row of the table.
    """
    ensure_valid(graph)
    return _solve_flows(graph)[0]


# -- builders and JSON ------------------------------------------------------


def disjoint_paths_graph(lengths: Sequence[int]) -> Graph:
    """s-t graph made of internally disjoint paths of the given edge counts."""
    if not lengths or any(int(x) < 1 for x in lengths):
        raise GraphFormatError("need at least one path, each of length >= 1")
    edges = []
    width = max(2, len(str(len(lengths))))
    for i, length in enumerate(lengths, start=1):
        nodes = ["s"] + [f"p{i:0{width}d}v{j:02d}" for j in range(1, int(length))] + ["t"]
        for j in range(int(length)):
            edges.append(Edge(f"p{i:0{width}d}e{j + 1:02d}", nodes[j], nodes[j + 1]))
    return Graph.from_edges(edges)


_GRAPH_KEYS = {"vertices", "source", "sink", "edges"}
_EDGE_KEYS = {"id", "from", "to"}


def graph_from_json(obj) -> Graph:
    if not isinstance(obj, dict):
        raise GraphFormatError("graph JSON must be an object")
    extra = set(obj) - _GRAPH_KEYS
    missing = _GRAPH_KEYS - set(obj)
    if extra:
        raise GraphFormatError(f"unknown graph fields {sorted(extra)}")
    if missing:
        raise GraphFormatError(f"missing graph fields {sorted(missing)}")
    if not isinstance(obj["vertices"], list) or not all(isinstance(v, str) for v in obj["vertices"]):
        raise GraphFormatError("vertices must be a list of strings")
    if len(set(obj["vertices"])) != len(obj["vertices"]):
        raise GraphFormatError("duplicate vertex ids")
    if not isinstance(obj["edges"], list):
        raise GraphFormatError("edges must be a list")
    edges = []
    for item in obj["edges"]:
        if not isinstance(item, dict) or set(item) != _EDGE_KEYS:
            raise GraphFormatError(f"edge must have exactly the fields {sorted(_EDGE_KEYS)}: {item!r}")
        if not all(isinstance(item[k], str) for k in _EDGE_KEYS):
            raise GraphFormatError(f"edge fields must be strings: {item!r}")
        edges.append(Edge(item["id"], item["from"], item["to"]))
    if not isinstance(obj["source"], str) or not isinstance(obj["sink"], str):
        raise GraphFormatError("source and sink must be strings")
    return Graph(tuple(obj["vertices"]), obj["source"], obj["sink"], tuple(edges))


def graph_to_json(graph: Graph) -> dict:
    return {
        "vertices": list(graph.vertices),
        "source": graph.source,
        "sink": graph.sink,
        "edges": [{"id": e.id, "from": e.tail, "to": e.head} for e in graph.edges],
    }


def canonical_graph_json(graph: Graph) -> str:
    return json.dumps(graph_to_json(graph), sort_keys=True, separators=(",", ":"))
