"""Double graphs, Cuntz-Krieger relations and covering-graph windows.

The double graph adds to every edge e a reversed ghost edge e* carrying
degree weight -1 (real edges carry +1).  The covering graph unwinds a
weighted graph over the integers: a weight +1 edge e lifts to edges
e_i : u_{i-1} -> v_i and a weight -1 edge f to f_i : u_i -> v_{i-1}.
Only a finite level window [lo, hi] of the covering graph is ever
materialised; lifts that would leave the window are dropped and recorded
in a boundary report.

Relations are the Cuntz-Krieger families: for every pair of edges e, f
sharing a source, e* f = (e == f) r(e); and for every regular vertex v,
the sum of e e* over the edges out of v equals v.  Lifting a relation
anchors every one of its paths at a common start level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .graphs import Edge, Graph, GraphError, Path

GHOST_SUFFIX = "*"


class DoubleGraph:
    """A graph together with its ghost edges and the +1/-1 weights."""

    __slots__ = ("base", "graph", "_weights", "_ghost_of")

    def __init__(self, base: Graph):
        for e in base.edges:
            if base.has_edge(e.id + GHOST_SUFFIX):
                raise GraphError(f"edge id {e.id + GHOST_SUFFIX!r} collides with a ghost id")
        ghosts = [Edge(e.id + GHOST_SUFFIX, e.dst, e.src) for e in base.edges]
        self.base = base
        self.graph = Graph(base.vertices, tuple(base.edges) + tuple(ghosts))
        self._weights = {e.id: 1 for e in base.edges}
        self._weights.update({gh.id: -1 for gh in ghosts})
        self._ghost_of = {e.id: gh for e, gh in zip(base.edges, ghosts)}

    def weight(self, eid: str) -> int:
        try:
            return self._weights[eid]
        except KeyError:
            raise GraphError(f"unknown edge id {eid!r}") from None

    def is_ghost(self, eid: str) -> bool:
        return self.weight(eid) == -1

    def ghost(self, eid: str) -> Edge:
        """The ghost partner of a real base edge."""
        try:
            return self._ghost_of[eid]
        except KeyError:
            raise GraphError(f"unknown real edge id {eid!r}") from None

    def real_id(self, eid: str) -> str:
        """Strip the ghost marker, if any."""
        return eid[:-len(GHOST_SUFFIX)] if self.is_ghost(eid) else eid

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DoubleGraph):
            return NotImplemented
        return self.base == other.base

    def __hash__(self) -> int:
        return hash(("double", self.base))

    def __repr__(self) -> str:
        return f"DoubleGraph({self.base!r})"


def double_graph(g: Graph) -> DoubleGraph:
    return DoubleGraph(g)


# -- Cuntz-Krieger relations ---------------------------------------------


@dataclass(frozen=True)
class PairRelation:
    """e* f = (e == f) r(e), for edges e, f with a common source."""

    e: Edge
    f: Edge

    @property
    def is_diagonal(self) -> bool:
        return self.e.id == self.f.id

    def __str__(self) -> str:
        rhs = self.e.dst if self.is_diagonal else "0"
        return f"{self.e.id}*.{self.f.id} = {rhs}"


@dataclass(frozen=True)
class SumRelation:
    """sum of e e* over edges e out of a regular vertex equals the vertex."""

    vertex: str
    edges: tuple[Edge, ...]

    def __str__(self) -> str:
        lhs = " + ".join(f"{e.id}.{e.id}*" for e in self.edges)
        return f"{lhs} = {self.vertex}"


@dataclass(frozen=True)
class CKRelationSet:
    graph: Graph
    pairs: tuple[PairRelation, ...]
    sums: tuple[SumRelation, ...]


def ck_relations(g: Graph) -> CKRelationSet:
    """All Cuntz-Krieger relations of a graph; sinks get no sum relation."""
    pairs = []
    sums = []
    for v in g.vertices:
        out = g.out_edges(v)
        for e in out:
            for f in out:
                pairs.append(PairRelation(e, f))
        if out:
            sums.append(SumRelation(v, out))
    return CKRelationSet(g, tuple(pairs), tuple(sums))


# -- covering windows ------------------------------------------------------


class WindowVertex(NamedTuple):
    vertex: str
    level: int

    def __str__(self) -> str:
        return f"{self.vertex}@{self.level}"


class WindowEdge(NamedTuple):
    edge: Edge
    level: int
    src: WindowVertex
    dst: WindowVertex

    def __str__(self) -> str:
        return f"{self.edge.id}@{self.level}"


class CoveringWindow:
    """The slice of the covering graph between two levels, inclusive.

    Window edge identities are (base edge id, level).  Boundary lifts,
    the ones with exactly one endpoint inside the window, are recorded
    as (edge id, level) pairs.
    """

    __slots__ = ("graph", "weights", "lo", "hi", "vertices", "edges", "boundary")

    def __init__(self, graph: Graph, weights: dict[str, int], lo: int, hi: int,
                 vertices: tuple[WindowVertex, ...], edges: tuple[WindowEdge, ...],
                 boundary: tuple[tuple[str, int], ...]):
        self.graph = graph
        self.weights = weights
        self.lo = lo
        self.hi = hi
        self.vertices = vertices
        self.edges = edges
        self.boundary = boundary

    def restrict(self, lo: int, hi: int) -> "CoveringWindow":
        if not (self.lo <= lo and hi <= self.hi):
            raise GraphError(f"[{lo}, {hi}] is not inside [{self.lo}, {self.hi}]")
        return lift_window(self.graph, self.weights, lo, hi)

    def shift(self, k: int) -> "CoveringWindow":
        return shift_window(self, k)

    def is_ghost(self, eid: str) -> bool:
        return self.weights[eid] == -1

    def as_graph(self) -> Graph:
        """The window itself as a plain graph, for reachability questions."""
        return Graph(
            (str(v) for v in self.vertices),
            ((str(e), str(e.src), str(e.dst)) for e in self.edges),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoveringWindow):
            return NotImplemented
        return (self.graph == other.graph and self.weights == other.weights
                and self.lo == other.lo and self.hi == other.hi
                and self.vertices == other.vertices and self.edges == other.edges)

    def __repr__(self) -> str:
        return (f"CoveringWindow([{self.lo}, {self.hi}], "
                f"{len(self.vertices)} vertices, {len(self.edges)} edges)")


def lift_window(graph: Graph, weights: dict[str, int], lo: int, hi: int) -> CoveringWindow:
    """Window of the covering graph of an arbitrary +1/-1 weighted graph.

    This is the general constructor; `covering_window` specialises it to
    double graphs with real = +1 and ghost = -1.
    """
    if lo > hi:
        raise GraphError(f"invalid window bounds [{lo}, {hi}]")
    for e in graph.edges:
        if weights.get(e.id) not in (1, -1):
            raise GraphError(f"edge {e.id!r} needs weight +1 or -1")
    vertices = tuple(WindowVertex(v, i) for v in graph.vertices for i in range(lo, hi + 1))
    edges = []
    boundary = []
    for e in graph.edges:
        for i in range(lo + 1, hi + 1):
            if weights[e.id] == 1:
                edges.append(WindowEdge(e, i, WindowVertex(e.src, i - 1), WindowVertex(e.dst, i)))
            else:
                edges.append(WindowEdge(e, i, WindowVertex(e.src, i), WindowVertex(e.dst, i - 1)))
        boundary.extend(((e.id, lo), (e.id, hi + 1)))
    return CoveringWindow(graph, dict(weights), lo, hi, vertices, tuple(edges), tuple(boundary))


def covering_window(dg: DoubleGraph, lo: int, hi: int) -> CoveringWindow:
    """Window of the covering graph of a double graph."""
    return lift_window(dg.graph, dg._weights, lo, hi)


def shift_window(w: CoveringWindow, k: int) -> CoveringWindow:
    """Relabel levels i -> i - k; shifting by k then -k is the identity."""
    return lift_window(w.graph, w.weights, w.lo - k, w.hi - k)


# -- lifted paths and relations -------------------------------------------


@dataclass(frozen=True)
class LiftedPath:
    """A path of the double graph lifted into the covering graph.

    Each step is (edge, subscript); a weight +1 edge with subscript i runs
    from level i-1 to level i, a weight -1 edge from level i to level i-1.
    The first edge receives the requested subscript.
    """

    steps: tuple[tuple[Edge, int], ...]
    start_level: int
    end_level: int

    def __str__(self) -> str:
        return ".".join(f"{e.id}@{i}" for e, i in self.steps)


def lift_path(dg: DoubleGraph, p: Path, j: int) -> LiftedPath:
    for e in p.edges:
        if not dg.graph.has_edge(e.id):
            raise GraphError(f"path edge {e.id!r} is not in the double graph")
    first_w = dg.weight(p.edges[0].id)
    level = j - 1 if first_w == 1 else j
    start = level
    steps = []
    for e in p.edges:
        if dg.weight(e.id) == 1:
            steps.append((e, level + 1))
            level += 1
        else:
            steps.append((e, level))
            level -= 1
    return LiftedPath(tuple(steps), start, level)


@dataclass(frozen=True)
class LiftedPair:
    """A pair relation anchored at a start level inside a window.

    The path e* f starts at r(e) on the anchor level, dips one level down
    and comes back: e*_l f_l = (e == f) r(e)_l.
    """

    rel: PairRelation
    level: int

    def __str__(self) -> str:
        rhs = f"{self.rel.e.dst}@{self.level}" if self.rel.is_diagonal else "0"
        return f"{self.rel.e.id}*@{self.level}.{self.rel.f.id}@{self.level} = {rhs}"


@dataclass(frozen=True)
class LiftedSum:
    """A sum relation anchored at a start level inside a window.

    Each path e e* climbs from v on the anchor level and returns:
    sum of e_{l+1} e*_{l+1} equals v_l.
    """

    rel: SumRelation
    level: int

    def __str__(self) -> str:
        lhs = " + ".join(f"{e.id}@{self.level + 1}.{e.id}*@{self.level + 1}"
                         for e in self.rel.edges)
        return f"{lhs} = {self.rel.vertex}@{self.level}"


@dataclass(frozen=True)
class WindowRelations:
    pairs: tuple[LiftedPair, ...]
    sums: tuple[LiftedSum, ...]
    note: str | None = None


def lift_relations(rel: CKRelationSet, lo: int, hi: int) -> WindowRelations:
    """All relation lifts whose paths stay inside the window.

    Pair relations need levels l and l-1, so they anchor at l in
    [lo+1, hi]; sum relations need l and l+1, so they anchor at l in
    [lo, hi-1].  A note is attached when truncation removed everything.
    """
    if lo > hi:
        raise GraphError(f"invalid window bounds [{lo}, {hi}]")
    pairs = tuple(LiftedPair(r, lvl) for r in rel.pairs for lvl in range(lo + 1, hi + 1))
    sums = tuple(LiftedSum(r, lvl) for r in rel.sums for lvl in range(lo, hi - 1 + 1))
    note = None
    if (rel.pairs or rel.sums) and not (pairs or sums):
        note = f"window [{lo}, {hi}] is too narrow for any relation lift"
    return WindowRelations(pairs, sums, note)


# -- DOT export -------------------------------------------------------------


def _dot_lines(names: Iterable[str], arrows: Iterable[tuple[str, str, str, bool]]) -> str:
    lines = ["digraph {"]
    lines.extend(f'  "{n}";' for n in names)
    for src, dst, label, ghost in arrows:
        style = ", style=dashed" if ghost else ""
        lines.append(f'  "{src}" -> "{dst}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_graph(g: Graph) -> str:
    """Plain DOT rendering of a graph."""
    return _dot_lines(g.vertices, ((e.src, e.dst, e.id, False) for e in g.edges))


def dot_double_graph(dg: DoubleGraph) -> str:
    """DOT rendering of a double graph; ghost edges are dashed."""
    return _dot_lines(
        dg.graph.vertices,
        ((e.src, e.dst, e.id, dg.is_ghost(e.id)) for e in dg.graph.edges),
    )


def dot_window(w: CoveringWindow) -> str:
    """DOT rendering of a covering window with v@i vertex labels."""
    return _dot_lines(
        (str(v) for v in w.vertices),
        ((str(e.src), str(e.dst), str(e), w.is_ghost(e.edge.id)) for e in w.edges),
    )
