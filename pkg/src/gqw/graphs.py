"""Finite directed multigraphs and their cycle/sink combinatorics.

A graph is a quadruple (vertices, edges, source, range).  Parallel edges
and loops are allowed.  Everything downstream (monoid ideals, covering
windows, dimension distributions) is driven by a small set of notions
defined here:

* the tree T(S) of forward-reachable vertices,
* cycles up to rotation, with a deterministic canonical representative,
* maximal cycles (no other cycle connects to them) and maximal sinks
  (no cycle connects to them),
* closed simple paths CSP(v) based at a vertex, and the set of vertices
  admitting more than one of them.

All values are immutable after construction and all operations are pure,
so concurrent reads are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence


class GraphError(ValueError):
    """Malformed graph data: duplicate ids, unknown vertices, bad edges."""


class PreconditionError(ValueError):
    """An operation was called on a graph outside its hypotheses."""


class CapExceededError(RuntimeError):
    """An enumeration exceeded its configured bound."""


class Edge(NamedTuple):
    id: str
    src: str
    dst: str


class Graph:
    """Immutable finite directed multigraph with ordered vertex/edge ids.

    The declaration order of vertices and edges is significant: it fixes
    canonical forms (cycle rotations, report ordering) and makes every
    derived object diff-stable.
    """

    __slots__ = ("vertices", "edges", "_vindex", "_eindex", "_out", "_in")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]] = ()):
        vs = tuple(vertices)
        vindex: dict[str, int] = {}
        for v in vs:
            if v in vindex:
                raise GraphError(f"duplicate vertex id {v!r}")
            vindex[v] = len(vindex)
        es: list[Edge] = []
        eindex: dict[str, int] = {}
        out: dict[str, list[Edge]] = {v: [] for v in vs}
        inc: dict[str, list[Edge]] = {v: [] for v in vs}
        for triple in edges:
            e = Edge(*triple)
            if e.id in eindex:
                raise GraphError(f"duplicate edge id {e.id!r}")
            if e.src not in vindex:
                raise GraphError(f"unknown vertex {e.src!r} in edge {e.id!r}")
            if e.dst not in vindex:
                raise GraphError(f"unknown vertex {e.dst!r} in edge {e.id!r}")
            eindex[e.id] = len(es)
            es.append(e)
            out[e.src].append(e)
            inc[e.dst].append(e)
        self.vertices = vs
        self.edges = tuple(es)
        self._vindex = vindex
        self._eindex = eindex
        self._out = {v: tuple(lst) for v, lst in out.items()}
        self._in = {v: tuple(lst) for v, lst in inc.items()}

    # -- basic queries -------------------------------------------------

    def has_vertex(self, v: str) -> bool:
        return v in self._vindex

    def check_vertices(self, vs: Iterable[str]) -> None:
        for v in vs:
            if v not in self._vindex:
                raise GraphError(f"unknown vertex id {v!r}")

    def vertex_index(self, v: str) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise GraphError(f"unknown vertex id {v!r}") from None

    def edge(self, eid: str) -> Edge:
        try:
            return self.edges[self._eindex[eid]]
        except KeyError:
            raise GraphError(f"unknown edge id {eid!r}") from None

    def edge_index(self, eid: str) -> int:
        try:
            return self._eindex[eid]
        except KeyError:
            raise GraphError(f"unknown edge id {eid!r}") from None

    def has_edge(self, eid: str) -> bool:
        return eid in self._eindex

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        self.check_vertices((v,))
        return self._out[v]

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        self.check_vertices((v,))
        return self._in[v]

    def out_degree(self, v: str) -> int:
        return len(self.out_edges(v))

    def in_degree(self, v: str) -> int:
        return len(self.in_edges(v))

    def is_sink(self, v: str) -> bool:
        return self.out_degree(v) == 0

    def is_source(self, v: str) -> bool:
        return self.in_degree(v) == 0

    def is_isolated(self, v: str) -> bool:
        return self.is_sink(v) and self.is_source(v)

    def is_regular(self, v: str) -> bool:
        return self.out_degree(v) > 0

    def sorted_vertices(self, vs: Iterable[str]) -> tuple[str, ...]:
        """Sort a vertex collection by declaration order."""
        return tuple(sorted(vs, key=self.vertex_index))

    # -- derived graphs ------------------------------------------------

    def without_vertices(self, drop: Iterable[str]) -> "Graph":
        """Delete the given vertices together with all incident edges."""
        gone = set(drop)
        self.check_vertices(gone)
        keep_v = [v for v in self.vertices if v not in gone]
        keep_e = [e for e in self.edges if e.src not in gone and e.dst not in gone]
        return Graph(keep_v, keep_e)

    def relabeled(self, vmap: dict[str, str], emap: dict[str, str] | None = None) -> "Graph":
        """Rename vertices (and optionally edges), preserving declaration order."""
        emap = emap or {}
        return Graph(
            (vmap.get(v, v) for v in self.vertices),
            ((emap.get(e.id, e.id), vmap.get(e.src, e.src), vmap.get(e.dst, e.dst)) for e in self.edges),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __repr__(self) -> str:
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class VertexClasses:
    """Partition of the vertex set by degree behaviour.

    Sinks emit nothing, sources receive nothing, isolated vertices do
    both, regular vertices emit at least one edge.  Sinks and sources
    include the isolated vertices.
    """

    sinks: tuple[str, ...]
    sources: tuple[str, ...]
    isolated: tuple[str, ...]
    regular: tuple[str, ...]


def vertex_classes(g: Graph) -> VertexClasses:
    return VertexClasses(
        sinks=tuple(v for v in g.vertices if g.is_sink(v)),
        sources=tuple(v for v in g.vertices if g.is_source(v)),
        isolated=tuple(v for v in g.vertices if g.is_isolated(v)),
        regular=tuple(v for v in g.vertices if g.is_regular(v)),
    )


def tree(g: Graph, seeds: Iterable[str]) -> frozenset[str]:
    """Forward reachability closure T(S), including S itself."""
    todo = list(seeds)
    g.check_vertices(todo)
    seen = set(todo)
    while todo:
        v = todo.pop()
        for e in g._out[v]:
            if e.dst not in seen:
                seen.add(e.dst)
                todo.append(e.dst)
    return frozenset(seen)


def is_acyclic(g: Graph) -> bool:
    """Kahn peeling; loops and parallel edges are handled."""
    indeg = {v: g.in_degree(v) for v in g.vertices}
    ready = [v for v in g.vertices if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for e in g._out[v]:
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                ready.append(e.dst)
    return seen == len(g.vertices)


@dataclass(frozen=True)
class Path:
    """A nonempty composable edge sequence."""

    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if not self.edges:
            raise GraphError("a path needs at least one edge")
        for a, b in zip(self.edges, self.edges[1:]):
            if a.dst != b.src:
                raise GraphError(f"edges {a.id!r} and {b.id!r} do not compose")

    @property
    def source(self) -> str:
        return self.edges[0].src

    @property
    def range(self) -> str:
        return self.edges[-1].dst

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset({self.source} | {e.dst for e in self.edges})

    def __str__(self) -> str:
        return ".".join(e.id for e in self.edges)


@dataclass(frozen=True)
class CycleClass:
    """A cycle up to rotation, stored in its canonical rotation.

    A cycle is a closed path whose edges have pairwise distinct sources.
    The canonical representative is the rotation whose tuple of declared
    edge indices is lexicographically least.
    """

    edges: tuple[Edge, ...]

    @staticmethod
    def from_edges(g: Graph, edges: Sequence[Edge]) -> "CycleClass":
        edges = tuple(edges)
        if not edges:
            raise GraphError("a cycle needs at least one edge")
        for a, b in zip(edges, edges[1:]):
            if a.dst != b.src:
                raise GraphError(f"edges {a.id!r} and {b.id!r} do not compose")
        if edges[-1].dst != edges[0].src:
            raise GraphError("edge sequence is not closed")
        sources = [e.src for e in edges]
        if len(set(sources)) != len(sources):
            raise GraphError("closed path revisits a vertex, not a cycle")
        idx = [g.edge_index(e.id) for e in edges]
        best = min(range(len(edges)), key=lambda r: idx[r:] + idx[:r])
        return CycleClass(edges[best:] + edges[:best])

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> tuple[str, ...]:
        """Vertices in traversal order of the canonical rotation."""
        return tuple(e.src for e in self.edges)

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @property
    def id(self) -> str:
        return ".".join(e.id for e in self.edges)

    def __str__(self) -> str:
        return self.id


def enumerate_cycles(g: Graph, cap: int = 10**6) -> tuple[CycleClass, ...]:
    """All cycles of g up to rotation, in a deterministic canonical order.

    Depth-first search rooted at each vertex in declaration order; a cycle
    is emitted exactly once, from the rotation based at its least vertex.
    Raises CapExceededError when more than `cap` classes are found.
    """
    found: list[CycleClass] = []
    for start in g.vertices:
        si = g.vertex_index(start)
        path: list[Edge] = []
        on_path = {start}
        iters: list[Iterator[Edge]] = [iter(g.out_edges(start))]
        while iters:
            e = next(iters[-1], None)
            if e is None:
                iters.pop()
                if path:
                    on_path.discard(path.pop().dst)
                continue
            w = e.dst
            if w == start:
                found.append(CycleClass.from_edges(g, tuple(path) + (e,)))
                if len(found) > cap:
                    raise CapExceededError(f"more than {cap} cycle classes")
            elif w not in on_path and g.vertex_index(w) > si:
                path.append(e)
                on_path.add(w)
                iters.append(iter(g.out_edges(w)))
    found.sort(key=lambda c: (c.length, tuple(g.edge_index(e.id) for e in c.edges)))
    return tuple(found)


def maximal_cycles(g: Graph, cap: int = 10**6) -> tuple[CycleClass, ...]:
    """Cycles that no other cycle connects to.

    A cycle D connects to C when the tree of D's vertex set meets C's
    vertex set; in particular a maximal cycle is disjoint from all other
    cycles.
    """
    cycles = enumerate_cycles(g, cap=cap)
    trees = {c: tree(g, c.vertex_set) for c in cycles}
    return tuple(
        c for c in cycles
        if all(d is c or not (trees[d] & c.vertex_set) for d in cycles)
    )


def maximal_sinks(g: Graph, cap: int = 10**6) -> tuple[str, ...]:
    """Sinks that no cycle connects to, in declaration order."""
    cycles = enumerate_cycles(g, cap=cap)
    trees = [tree(g, c.vertex_set) for c in cycles]
    return tuple(
        z for z in g.vertices
        if g.is_sink(z) and all(z not in t for t in trees)
    )


def maximal_cycle_vertices(g: Graph, cap: int = 10**6) -> frozenset[str]:
    """Union of the vertex sets of the maximal cycles."""
    out: set[str] = set()
    for c in maximal_cycles(g, cap=cap):
        out |= c.vertex_set
    return frozenset(out)


# -- closed simple paths ----------------------------------------------
#
# A closed path based at v is simple when exactly one of its edges has
# source v.  Equivalently: one edge e out of v followed by a walk from
# r(e) back to v that never leaves v again.  The walk lives in the graph
# with v's out-edges removed, where v is a sink.


def _csp_pieces(g: Graph, v: str):
    """Return (starts, hout, reach) for the return-walk graph of v.

    hout maps each vertex to its out-edges with v's out-edges removed;
    reach is the set of vertices from which v is reachable in that graph.
    """
    g.check_vertices((v,))
    hout = {u: (g._out[u] if u != v else ()) for u in g.vertices}
    hin: dict[str, list[Edge]] = {u: [] for u in g.vertices}
    for u in g.vertices:
        for e in hout[u]:
            hin[e.dst].append(e)
    reach = {v}
    todo = [v]
    while todo:
        u = todo.pop()
        for e in hin[u]:
            if e.src not in reach:
                reach.add(e.src)
                todo.append(e.src)
    return g.out_edges(v), hout, reach


def _csp_is_finite(g: Graph, v: str) -> bool:
    starts, hout, reach = _csp_pieces(g, v)
    # forward closure of the walk starts inside the return-walk graph
    fwd: set[str] = set()
    todo = [e.dst for e in starts]
    while todo:
        u = todo.pop()
        if u in fwd:
            continue
        fwd.add(u)
        for e in hout[u]:
            todo.append(e.dst)
    # a cycle among relevant vertices (other than v) pumps forever
    core = (fwd & reach) - {v}
    indeg = {u: 0 for u in core}
    for u in core:
        for e in hout[u]:
            if e.dst in core:
                indeg[e.dst] += 1
    ready = [u for u in core if indeg[u] == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for e in hout[u]:
            if e.dst in core:
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    ready.append(e.dst)
    return seen == len(core)


def csp_count_exceeds_one(g: Graph, v: str) -> bool:
    """Decide |CSP(v)| > 1 exactly, without enumerating the set."""
    starts, hout, reach = _csp_pieces(g, v)
    if not starts:
        return False
    if not _csp_is_finite(g, v):
        return True
    # acyclic relevant region: count walks into v by memoised sums
    memo: dict[str, int] = {v: 1}

    def walks(u: str) -> int:
        if u in memo:
            return memo[u]
        memo[u] = total = sum(walks(e.dst) for e in hout[u] if e.dst in reach)
        return total

    return sum(walks(e.dst) for e in starts if e.dst in reach) > 1


def csp(g: Graph, v: str, cap: int = 10**5) -> tuple[Path, ...]:
    """The set CSP(v) of closed simple paths based at v.

    Raises CapExceededError when CSP(v) is infinite (the return walk can
    be pumped around a cycle) or exceeds `cap` paths.
    """
    starts, hout, reach = _csp_pieces(g, v)
    if not _csp_is_finite(g, v):
        raise CapExceededError(f"CSP({v}) is infinite")
    out: list[Path] = []
    for first in starts:
        stack: list[tuple[str, tuple[Edge, ...]]] = [(first.dst, (first,))]
        while stack:
            u, prefix = stack.pop()
            if u == v:
                out.append(Path(prefix))
                if len(out) > cap:
                    raise CapExceededError(f"more than {cap} closed simple paths at {v}")
                continue
            for e in reversed(hout[u]):
                if e.dst in reach:
                    stack.append((e.dst, prefix + (e,)))
    out.sort(key=lambda p: tuple(g.edge_index(e.id) for e in p.edges))
    return tuple(out)


def csp_gt1(g: Graph) -> tuple[str, ...]:
    """Vertices based at more than one closed simple path."""
    return tuple(v for v in g.vertices if csp_count_exceeds_one(g, v))


def find_cycle_reaching(g: Graph, v: str) -> CycleClass:
    """Some cycle whose vertex set connects to v, found by a backward walk.

    Requires a graph with no sources: walk backwards from v along the
    first declared in-edge until a vertex repeats; the repeated stretch is
    the cycle.  Deterministic given the declaration order.
    """
    g.check_vertices((v,))
    bad = [u for u in g.vertices if g.is_source(u)]
    if bad:
        raise PreconditionError(f"graph has a source: {bad[0]!r}")
    seen_at = {v: 0}
    chain: list[Edge] = []
    w = v
    while True:
        e = g.in_edges(w)[0]
        chain.append(e)
        w = e.src
        if w in seen_at:
            j = seen_at[w]
            return CycleClass.from_edges(g, tuple(reversed(chain[j:])))
        seen_at[w] = len(chain)
