"""Talented monoid elements, hereditary saturated ideals and quotients.

The talented monoid of a graph is the commutative monoid on generators
v(i), one per vertex v and integer i, with the relation

    v(i) = sum over edges e out of v of  r(e)(i + 1)

at every regular vertex, and with the integers acting by index shift.
Dropping the indices gives the plain graph monoid.  Equality of elements
is handled by bounded expansion search: applying the relations in
parallel is a function on elements, two elements are equal whenever some
pair of expansions coincides, and on acyclic graphs expansion terminates
at a sink-supported normal form so equality is decided exactly.

Hereditary saturated vertex sets stand for the order-ideals of the
talented monoid that are closed under the shift action.  Quotient graphs,
their classification into comet / acyclic-unique-sink shapes, and the
resulting correspondence with maximal cycles and maximal sinks live here
too, together with the coarse signature used to screen candidate pairs
of graphs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

from .graphs import (
    CapExceededError,
    CycleClass,
    Graph,
    GraphError,
    is_acyclic,
    maximal_cycles,
    maximal_sinks,
    tree,
)

DEFAULT_EQ_BOUND = 32
DEFAULT_HSAT_CAP = 20


# -- elements ----------------------------------------------------------


@dataclass(frozen=True)
class TalentedElement:
    """Finite N-linear combination of shifted vertex generators v(i).

    Stored as a sorted tuple of ((vertex, shift), coefficient) with all
    coefficients strictly positive; the empty combination is zero.
    """

    terms: tuple[tuple[tuple[str, int], int], ...] = ()

    @staticmethod
    def of(coeffs: dict[tuple[str, int], int]) -> "TalentedElement":
        items = []
        for key, c in coeffs.items():
            if c < 0:
                raise ValueError(f"negative coefficient for {key}")
            if c:
                items.append((key, c))
        items.sort()
        return TalentedElement(tuple(items))

    @staticmethod
    def generator(v: str, i: int = 0) -> "TalentedElement":
        return TalentedElement((((v, i), 1),))

    @staticmethod
    def unit(g: Graph) -> "TalentedElement":
        """The order unit: the sum of v(0) over all vertices."""
        return TalentedElement.of({(v, 0): 1 for v in g.vertices})

    def coeffs(self) -> dict[tuple[str, int], int]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> frozenset[str]:
        return frozenset(v for (v, _i), _c in self.terms)

    def shifted(self, n: int) -> "TalentedElement":
        return TalentedElement(tuple(sorted((((v, i + n), c) for (v, i), c in self.terms))))

    def __add__(self, other: "TalentedElement") -> "TalentedElement":
        out = self.coeffs()
        for key, c in other.terms:
            out[key] = out.get(key, 0) + c
        return TalentedElement.of(out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (v, i), c in self.terms:
            head = f"{c} " if c != 1 else ""
            bits.append(f"{head}{v}({i})")
        return " + ".join(bits)


@dataclass(frozen=True)
class GraphMonoidElement:
    """Finite N-linear combination of vertex generators, no shifts."""

    terms: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(coeffs: dict[str, int]) -> "GraphMonoidElement":
        items = []
        for v, c in coeffs.items():
            if c < 0:
                raise ValueError(f"negative coefficient for {v}")
            if c:
                items.append((v, c))
        items.sort()
        return GraphMonoidElement(tuple(items))

    @staticmethod
    def generator(v: str) -> "GraphMonoidElement":
        return GraphMonoidElement(((v, 1),))

    def coeffs(self) -> dict[str, int]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> frozenset[str]:
        return frozenset(v for v, _c in self.terms)

    def __add__(self, other: "GraphMonoidElement") -> "GraphMonoidElement":
        out = self.coeffs()
        for v, c in other.terms:
            out[v] = out.get(v, 0) + c
        return GraphMonoidElement.of(out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join((f"{c} {v}" if c != 1 else v) for v, c in self.terms)


def _check_support(g: Graph, support: Iterable[str]) -> None:
    for v in support:
        if not g.has_vertex(v):
            raise GraphError(f"element mentions unknown vertex {v!r}")


def expand(e: TalentedElement, g: Graph, steps: int = 1) -> TalentedElement:
    """Apply the defining relations to every regular generator, in parallel.

    One step replaces c * v(i), for regular v, by c copies of the sum of
    r(f)(i+1) over the edges f out of v; sink generators are untouched.
    """
    _check_support(g, e.support())
    cur = e.coeffs()
    for _ in range(steps):
        nxt: dict[tuple[str, int], int] = {}
        for (v, i), c in cur.items():
            if g.is_sink(v):
                nxt[(v, i)] = nxt.get((v, i), 0) + c
            else:
                for f in g.out_edges(v):
                    key = (f.dst, i + 1)
                    nxt[key] = nxt.get(key, 0) + c
        cur = nxt
    return TalentedElement.of(cur)


def expand_graph_monoid(e: GraphMonoidElement, g: Graph, steps: int = 1) -> GraphMonoidElement:
    """Index-free parallel expansion in the graph monoid."""
    _check_support(g, e.support())
    cur = e.coeffs()
    for _ in range(steps):
        nxt: dict[str, int] = {}
        for v, c in cur.items():
            if g.is_sink(v):
                nxt[v] = nxt.get(v, 0) + c
            else:
                for f in g.out_edges(v):
                    nxt[f.dst] = nxt.get(f.dst, 0) + c
        cur = nxt
    return GraphMonoidElement.of(cur)


class EqResult(enum.Enum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"


def _eq_by_expansion(a, b, g: Graph, bound: int, step) -> EqResult:
    if a == b:
        return EqResult.EQUAL
    if is_acyclic(g):
        # expansion reaches the sink-supported normal form in < |V| steps,
        # and distinct normal forms certify inequality
        n = len(g.vertices)
        return EqResult.EQUAL if step(a, g, n) == step(b, g, n) else EqResult.DISTINCT
    orbit_a = [a]
    orbit_b = [b]
    for _ in range(bound):
        orbit_a.append(step(orbit_a[-1], g, 1))
        orbit_b.append(step(orbit_b[-1], g, 1))
    if set(orbit_a) & set(orbit_b):
        return EqResult.EQUAL
    return EqResult.UNKNOWN


def eq_bounded(a: TalentedElement, b: TalentedElement, g: Graph,
               bound: int = DEFAULT_EQ_BOUND) -> EqResult:
    """Bounded semi-decision of equality in the talented monoid.

    EQUAL when some pair of parallel expansions (up to `bound` steps each)
    coincides.  On acyclic graphs the answer is always definitive; on
    graphs with cycles a failed search returns UNKNOWN.
    """
    _check_support(g, a.support() | b.support())
    return _eq_by_expansion(a, b, g, bound, expand)


def graph_monoid_eq_bounded(a: GraphMonoidElement, b: GraphMonoidElement, g: Graph,
                            bound: int = DEFAULT_EQ_BOUND) -> EqResult:
    """Bounded semi-decision of equality in the graph monoid."""
    _check_support(g, a.support() | b.support())
    return _eq_by_expansion(a, b, g, bound, expand_graph_monoid)


# -- hereditary saturated sets ------------------------------------------


@dataclass(frozen=True)
class HSatSet:
    """A hereditary saturated vertex subset of a fixed graph.

    Hereditary: closed under forward reachability.  Saturated: a regular
    vertex all of whose ranges lie in the set is itself in the set.  Such
    sets are exactly the shift-closed order-ideals of the talented monoid.
    """

    graph: Graph
    vertices: frozenset[str]

    def __post_init__(self) -> None:
        self.graph.check_vertices(self.vertices)
        for v in self.vertices:
            for e in self.graph.out_edges(v):
                if e.dst not in self.vertices:
                    raise GraphError(f"{sorted(self.vertices)} is not hereditary at {v!r}")
        for v in self.graph.vertices:
            if v in self.vertices or not self.graph.is_regular(v):
                continue
            if all(e.dst in self.vertices for e in self.graph.out_edges(v)):
                raise GraphError(f"{sorted(self.vertices)} is not saturated at {v!r}")

    @property
    def sorted_vertices(self) -> tuple[str, ...]:
        return self.graph.sorted_vertices(self.vertices)

    def __le__(self, other: "HSatSet") -> bool:
        return self.vertices <= other.vertices

    def __str__(self) -> str:
        return "{" + ", ".join(self.sorted_vertices) + "}"


def saturate(g: Graph, seeds: Iterable[str]) -> HSatSet:
    """Least hereditary saturated set containing the seeds.

    Alternates the reachability closure with saturation sweeps until the
    set is stable under both.
    """
    cur = set(tree(g, seeds))
    while True:
        grew = False
        for v in g.vertices:
            if v in cur or not g.is_regular(v):
                continue
            if all(e.dst in cur for e in g.out_edges(v)):
                cur.add(v)
                grew = True
        if not grew:
            break
        cur = set(tree(g, cur))
    return HSatSet(g, frozenset(cur))


class HSatLattice:
    """All hereditary saturated subsets of a graph, ordered by inclusion."""

    def __init__(self, graph: Graph, sets: Iterable[HSatSet]):
        self.graph = graph
        self.sets = tuple(sorted(
            sets, key=lambda h: (len(h.vertices), h.sorted_vertices)))

    def __iter__(self) -> Iterator[HSatSet]:
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __contains__(self, h: HSatSet) -> bool:
        return h in self.sets

    def meet(self, a: HSatSet, b: HSatSet) -> HSatSet:
        return HSatSet(self.graph, a.vertices & b.vertices)

    def join(self, a: HSatSet, b: HSatSet) -> HSatSet:
        return saturate(self.graph, a.vertices | b.vertices)

    def hasse_pairs(self) -> tuple[tuple[HSatSet, HSatSet], ...]:
        """Cover relations (a, b) with a < b and nothing strictly between."""
        out = []
        for a in self.sets:
            for b in self.sets:
                if not (a.vertices < b.vertices):
                    continue
                if any(a.vertices < c.vertices < b.vertices for c in self.sets):
                    continue
                out.append((a, b))
        return tuple(out)


def enumerate_hsat(g: Graph, cap: int = DEFAULT_HSAT_CAP) -> HSatLattice:
    """Brute-force enumeration of all hereditary saturated subsets.

    Subsets are generated as bitmasks with a quick hereditary test first;
    graphs above `cap` vertices are rejected.
    """
    n = len(g.vertices)
    if n > cap:
        raise CapExceededError(f"graph has {n} vertices, enumeration cap is {cap}")
    vid = {v: i for i, v in enumerate(g.vertices)}
    succ = [0] * n
    for e in g.edges:
        succ[vid[e.src]] |= 1 << vid[e.dst]
    regulars = [i for i, v in enumerate(g.vertices) if g.is_regular(v)]
    found = []
    for mask in range(1 << n):
        ok = True
        for i in range(n):
            if mask >> i & 1 and succ[i] & ~mask:
                ok = False  # hereditary fails at i
                break
        if not ok:
            continue
        for i in regulars:
            if not mask >> i & 1 and not (succ[i] & ~mask):
                ok = False  # saturation forces i
                break
        if ok:
            found.append(HSatSet(g, frozenset(
                v for v, i in vid.items() if mask >> i & 1)))
    return HSatLattice(g, found)


def quotient_graph(g: Graph, h: HSatSet) -> Graph:
    """Delete the ideal's vertices and every incident edge."""
    if h.graph != g:
        raise GraphError("hereditary saturated set belongs to a different graph")
    return g.without_vertices(h.vertices)


def remove_sources(g: Graph) -> Graph:
    """Iteratively delete non-isolated sources; isolated vertices stay.

    The talented monoid of the result is unchanged, which is what makes
    quotient classification work on the source-removed graph.
    """
    cur = g
    while True:
        doomed = [v for v in cur.vertices if cur.is_source(v) and not cur.is_isolated(v)]
        if not doomed:
            return cur
        cur = cur.without_vertices(doomed)


class QuotientShape(enum.Enum):
    COMET = "comet"
    ACYCLIC_UNIQUE_SINK = "acyclic-unique-sink"
    OTHER = "other"


@dataclass(frozen=True)
class QuotientKind:
    shape: QuotientShape
    period: int | None = None

    def __post_init__(self) -> None:
        if self.shape is QuotientShape.COMET and (self.period is None or self.period < 1):
            raise ValueError("a comet quotient needs a period of at least 1")

    @staticmethod
    def comet(period: int) -> "QuotientKind":
        return QuotientKind(QuotientShape.COMET, period)

    @staticmethod
    def acyclic_unique_sink() -> "QuotientKind":
        return QuotientKind(QuotientShape.ACYCLIC_UNIQUE_SINK)

    @staticmethod
    def other() -> "QuotientKind":
        return QuotientKind(QuotientShape.OTHER)


def _is_single_cycle(g: Graph) -> int | None:
    """Length of the unique covering cycle, if g is exactly one cycle."""
    n = len(g.vertices)
    if n == 0 or len(g.edges) != n:
        return None
    if any(g.out_degree(v) != 1 or g.in_degree(v) != 1 for v in g.vertices):
        return None
    seen = set()
    v = g.vertices[0]
    for _ in range(n):
        if v in seen:
            return None
        seen.add(v)
        v = g.out_edges(v)[0].dst
    return n if v == g.vertices[0] else None


def classify_quotient(g: Graph, h: HSatSet) -> QuotientKind:
    """Shape of the quotient graph, read off the source-removed quotient.

    Comet of period k: after removing sources the quotient is a single
    k-cycle (so every quotient vertex connected to it).  Acyclic unique
    sink: the quotient is acyclic with exactly one sink.  Anything else,
    including the empty quotient, is Other.
    """
    q = quotient_graph(g, h)
    if is_acyclic(q):
        sinks = [v for v in q.vertices if q.is_sink(v)]
        if len(sinks) == 1:
            return QuotientKind.acyclic_unique_sink()
        return QuotientKind.other()
    period = _is_single_cycle(remove_sources(q))
    if period is not None:
        return QuotientKind.comet(period)
    return QuotientKind.other()


@dataclass(frozen=True)
class TalMaxCorrespondence:
    """The ideal attached to each maximal cycle and each maximal sink.

    A maximal cycle C is paired with the set of vertices whose tree
    avoids C (the quotient is then a comet of period |C|); a maximal sink
    z with the set of vertices whose tree avoids z (the quotient is then
    acyclic with unique sink z).
    """

    graph: Graph
    cycle_pairs: tuple[tuple[CycleClass, HSatSet], ...]
    sink_pairs: tuple[tuple[str, HSatSet], ...]


def talmax(g: Graph, cap: int = 10**6) -> TalMaxCorrespondence:
    cycle_pairs = []
    for c in maximal_cycles(g, cap=cap):
        avoid = frozenset(v for v in g.vertices if not (tree(g, (v,)) & c.vertex_set))
        cycle_pairs.append((c, HSatSet(g, avoid)))
    sink_pairs = []
    for z in maximal_sinks(g, cap=cap):
        avoid = frozenset(v for v in g.vertices if z not in tree(g, (v,)))
        sink_pairs.append((z, HSatSet(g, avoid)))
    return TalMaxCorrespondence(g, tuple(cycle_pairs), tuple(sink_pairs))


# -- signatures ---------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Multiset of maximal cycle lengths plus the number of maximal sinks.

    Agreement of signatures is necessary for the talented monoids to be
    isomorphic as shift-monoids; it is not sufficient.
    """

    cycle_lengths: tuple[int, ...]
    sink_count: int


def signature(g: Graph, cap: int = 10**6) -> Signature:
    lengths = sorted(c.length for c in maximal_cycles(g, cap=cap))
    return Signature(tuple(lengths), len(maximal_sinks(g, cap=cap)))


@dataclass(frozen=True)
class CandidateResult:
    """Outcome of the signature screen between two graphs.

    Compatible results carry one explicit length-preserving matching of
    maximal cycles and a positional matching of maximal sinks; otherwise
    the witness names the disagreeing component.
    """

    graph1: Graph
    graph2: Graph
    compatible: bool
    cycle_matching: tuple[tuple[CycleClass, CycleClass], ...] = ()
    sink_matching: tuple[tuple[str, str], ...] = ()
    witness: str | None = None

    def reversed(self) -> "CandidateResult":
        return CandidateResult(
            self.graph2, self.graph1, self.compatible,
            tuple((b, a) for a, b in self.cycle_matching),
            tuple((b, a) for a, b in self.sink_matching),
            self.witness,
        )


def candidate_check(g1: Graph, g2: Graph, cap: int = 10**6) -> CandidateResult:
    s1, s2 = signature(g1, cap=cap), signature(g2, cap=cap)
    if s1.cycle_lengths != s2.cycle_lengths:
        return CandidateResult(g1, g2, False, witness=(
            f"maximal cycle lengths differ: {list(s1.cycle_lengths)} vs {list(s2.cycle_lengths)}"))
    if s1.sink_count != s2.sink_count:
        return CandidateResult(g1, g2, False, witness=(
            f"maximal sink counts differ: {s1.sink_count} vs {s2.sink_count}"))

    def ordered(g: Graph) -> list[CycleClass]:
        return sorted(maximal_cycles(g, cap=cap),
                      key=lambda c: (c.length, tuple(g.edge_index(e.id) for e in c.edges)))

    cycles = tuple(zip(ordered(g1), ordered(g2)))
    sinks = tuple(zip(maximal_sinks(g1, cap=cap), maximal_sinks(g2, cap=cap)))
    return CandidateResult(g1, g2, True, cycles, sinks)


def ideal_membership(e: TalentedElement, h: HSatSet) -> bool:
    """Membership of an element in the ideal generated by the set.

    Because the set is hereditary and saturated, the ideal is exactly the
    elements supported inside it, so a support check suffices.
    """
    _check_support(h.graph, e.support())
    return e.support() <= h.vertices
