"""Graded dimension distributions: the flow equation and its solutions.

A distribution assigns a natural number d(v_i) to every vertex v and
level i of the covering graph of the double graph.  Validity means the
flow equation holds at every regular vertex:

    d(v_i) = sum over edges e out of v of  d(r(e)_{i+1}).

On a finite graph whose sources are all isolated, the locally finite
solutions are classified by a small data tuple: an arbitrary level map
for each isolated vertex, an eventually trivial level map for each sink,
and one tuple of naturals per maximal cycle.  Above a stabilisation
threshold t the cycle rows rotate their tuple, everything else off the
cycles is zero, and below t the remaining values are forced by running
the flow equation backwards.  `construct_distribution` realises a data
tuple on a finite window and `extract_datum` inverts it.

Finite-dimensional (non-graded) solutions are far more rigid: constant
on each maximal cycle, free on isolated vertices, zero elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .graphs import (
    CycleClass,
    Graph,
    PreconditionError,
    csp_count_exceeds_one,
    maximal_cycles,
    maximal_sinks,
)
from .monoids import CandidateResult


class DistributionError(ValueError):
    """Inconsistent distribution data (bad window, bad datum, bad tail)."""


# -- level maps -------------------------------------------------------------


@dataclass(frozen=True)
class LevelRule:
    """Default value of a level map outside its finite table.

    kind "const" yields `value` everywhere; kind "abs" yields |i + value|.
    Both families are closed under level shifts, which keeps shifted
    distributions serialisable.
    """

    kind: str = "const"
    value: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("const", "abs"):
            raise DistributionError(f"unknown level rule kind {self.kind!r}")
        if self.kind == "const" and self.value < 0:
            raise DistributionError("constant level rule needs a natural value")

    def at(self, i: int) -> int:
        return self.value if self.kind == "const" else abs(i + self.value)

    def shifted(self, k: int) -> "LevelRule":
        # after a shift by k the map reads i -> old(i + k)
        if self.kind == "const":
            return self
        return LevelRule("abs", self.value + k)


@dataclass(frozen=True)
class LevelMap:
    """A total map from levels to naturals: finite table over a default rule."""

    default: LevelRule = LevelRule()
    table: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if any(val < 0 for _i, val in self.table):
            raise DistributionError("level map values must be natural numbers")
        if tuple(sorted(self.table)) != self.table:
            raise DistributionError("level map table must be sorted by level")
        if len({i for i, _ in self.table}) != len(self.table):
            raise DistributionError("level map table has a duplicate level")

    @staticmethod
    def of(values: dict[int, int], default: LevelRule = LevelRule()) -> "LevelMap":
        # entries matching the default are redundant; drop them for a
        # canonical form
        table = tuple(sorted((i, v) for i, v in values.items() if v != default.at(i)))
        return LevelMap(default, table)

    @staticmethod
    def zero() -> "LevelMap":
        return LevelMap()

    def at(self, i: int) -> int:
        for j, v in self.table:
            if j == i:
                return v
        return self.default.at(i)

    def shifted(self, k: int) -> "LevelMap":
        return LevelMap(self.default.shifted(k),
                        tuple(sorted((i - k, v) for i, v in self.table)))


@dataclass(frozen=True)
class SinkMap:
    """An eventually trivial level map: zero from the threshold upward."""

    threshold: int = 0
    default: LevelRule = LevelRule()
    table: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if any(val < 0 for _i, val in self.table):
            raise DistributionError("sink map values must be natural numbers")
        if any(i >= self.threshold for i, _v in self.table):
            raise DistributionError("sink map table entries must sit below the threshold")
        if tuple(sorted(self.table)) != self.table:
            raise DistributionError("sink map table must be sorted by level")
        if len({i for i, _ in self.table}) != len(self.table):
            raise DistributionError("sink map table has a duplicate level")

    @staticmethod
    def of(values: dict[int, int], threshold: int,
           default: LevelRule = LevelRule()) -> "SinkMap":
        for i, v in values.items():
            if i >= threshold and v != 0:
                raise DistributionError(
                    f"entry {i}={v} contradicts eventual triviality from {threshold}")
        table = tuple(sorted(
            (i, v) for i, v in values.items() if i < threshold and v != default.at(i)))
        return SinkMap(threshold, default, table)

    @staticmethod
    def zero(threshold: int = 0) -> "SinkMap":
        return SinkMap(threshold)

    def at(self, i: int) -> int:
        if i >= self.threshold:
            return 0
        for j, v in self.table:
            if j == i:
                return v
        return self.default.at(i)

    def shifted(self, k: int) -> "SinkMap":
        return SinkMap(self.threshold - k, self.default.shifted(k),
                       tuple(sorted((i - k, v) for i, v in self.table)))


# -- data tuples -------------------------------------------------------------


@dataclass(frozen=True)
class RepDatum:
    """The classifying data of a locally finite distribution.

    One level map per isolated vertex, one eventually trivial map per
    sink, and one tuple of naturals per maximal cycle (indexed along the
    canonical rotation, anchored at the stabilisation threshold).
    """

    isolated: tuple[tuple[str, LevelMap], ...] = ()
    sinks: tuple[tuple[str, SinkMap], ...] = ()
    cycles: tuple[tuple[CycleClass, tuple[int, ...]], ...] = ()

    def __post_init__(self) -> None:
        for c, tup in self.cycles:
            if len(tup) != c.length:
                raise DistributionError(
                    f"tuple arity {len(tup)} does not match cycle {c.id} of length {c.length}")
            if any(k < 0 for k in tup):
                raise DistributionError("cycle tuple entries must be natural numbers")

    @staticmethod
    def build(isolated: dict[str, LevelMap] | None = None,
              sinks: dict[str, SinkMap] | None = None,
              cycles: dict[CycleClass, tuple[int, ...]] | None = None) -> "RepDatum":
        return RepDatum(
            tuple(sorted((isolated or {}).items())),
            tuple(sorted((sinks or {}).items())),
            tuple(sorted((cycles or {}).items(), key=lambda kv: kv[0].id)),
        )

    @property
    def isolated_map(self) -> dict[str, LevelMap]:
        return dict(self.isolated)

    @property
    def sink_map(self) -> dict[str, SinkMap]:
        return dict(self.sinks)

    @property
    def cycle_map(self) -> dict[CycleClass, tuple[int, ...]]:
        return dict(self.cycles)

    @property
    def threshold(self) -> int:
        """Least level from which every sink map is zero, floored at 0."""
        return max([m.threshold for _w, m in self.sinks] + [0])

    def shifted(self, k: int) -> "RepDatum":
        return RepDatum(
            tuple((v, m.shifted(k)) for v, m in self.isolated),
            tuple((w, m.shifted(k)) for w, m in self.sinks),
            self.cycles,
        )


# -- distributions ------------------------------------------------------------


class DimDistribution:
    """Dimension values on a level window plus the tail data beyond it.

    The window always reaches from `lo` up to `hi` >= t + (longest
    maximal cycle) + 1, so at least one full period of every cycle row is
    visible above the threshold.
    """

    __slots__ = ("graph", "lo", "hi", "t", "values", "datum")

    def __init__(self, graph: Graph, lo: int, hi: int, t: int,
                 values: dict[tuple[str, int], int], datum: RepDatum):
        if lo > hi:
            raise DistributionError(f"invalid window bounds [{lo}, {hi}]")
        for v in graph.vertices:
            for i in range(lo, hi + 1):
                if (v, i) not in values:
                    raise DistributionError(f"missing value for {v}@{i}")
        if len(values) != len(graph.vertices) * (hi - lo + 1):
            extra = next((v, i) for (v, i) in values
                         if not (graph.has_vertex(v) and lo <= i <= hi))
            raise DistributionError(f"value for {extra[0]}@{extra[1]} lies outside the window")
        if any(c < 0 for c in values.values()):
            raise DistributionError("dimension values must be natural numbers")
        self.graph = graph
        self.lo = lo
        self.hi = hi
        self.t = t
        self.values = dict(values)
        self.datum = datum

    def value(self, v: str, i: int) -> int:
        try:
            return self.values[(v, i)]
        except KeyError:
            raise DistributionError(f"{v}@{i} is outside the window") from None

    def row(self, v: str) -> tuple[int, ...]:
        return tuple(self.values[(v, i)] for i in range(self.lo, self.hi + 1))

    def levels(self) -> range:
        return range(self.lo, self.hi + 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DimDistribution):
            return NotImplemented
        return (self.graph == other.graph and self.lo == other.lo and self.hi == other.hi
                and self.t == other.t and self.values == other.values
                and self.datum == other.datum)

    def __repr__(self) -> str:
        return (f"DimDistribution(window=[{self.lo}, {self.hi}], t={self.t}, "
                f"{len(self.graph.vertices)} rows)")


@dataclass(frozen=True)
class FlowCheck:
    """Outcome of a flow validation; the first violation is reported in
    (vertex declaration order, level) order."""

    ok: bool
    vertex: str | None = None
    level: int | None = None
    lhs: int | None = None
    rhs: int | None = None


def validate_flow(dist: DimDistribution) -> FlowCheck:
    """Check the flow equation at every regular vertex and interior level."""
    g = dist.graph
    for v in g.vertices:
        if not g.is_regular(v):
            continue
        for i in range(dist.lo, dist.hi):
            lhs = dist.values[(v, i)]
            rhs = sum(dist.values[(e.dst, i + 1)] for e in g.out_edges(v))
            if lhs != rhs:
                return FlowCheck(False, v, i, lhs, rhs)
    return FlowCheck(True)


# -- the classification ------------------------------------------------------


def _require_isolated_sources(g: Graph) -> None:
    bad = [v for v in g.vertices if g.is_source(v) and not g.is_isolated(v)]
    if bad:
        raise PreconditionError(f"graph has a non-isolated source: {bad[0]!r}")


@dataclass(frozen=True)
class FinDimClassification:
    """Parameter space of finite-dimensional (non-graded) solutions.

    One free natural per maximal cycle (the common value along the
    cycle), one per isolated vertex, zero everywhere else.
    """

    graph: Graph
    cycles: tuple[CycleClass, ...]
    isolated: tuple[str, ...]

    def dimension_vector(self, cycle_values: dict[CycleClass, int] | None = None,
                         isolated_values: dict[str, int] | None = None) -> dict[str, int]:
        cycle_values = cycle_values or {}
        isolated_values = isolated_values or {}
        for c in cycle_values:
            if c not in self.cycles:
                raise DistributionError(f"{c.id} is not a maximal cycle of the graph")
        for v in isolated_values:
            if v not in self.isolated:
                raise DistributionError(f"{v!r} is not an isolated vertex of the graph")
        out = {v: 0 for v in self.graph.vertices}
        for c, n in cycle_values.items():
            if n < 0:
                raise DistributionError("dimensions must be natural numbers")
            for v in c.vertices:
                out[v] = n
        for v, n in isolated_values.items():
            if n < 0:
                raise DistributionError("dimensions must be natural numbers")
            out[v] = n
        return out


def classify_findim(g: Graph) -> FinDimClassification:
    """Describe all finite-dimensional dimension vectors of the graph."""
    _require_isolated_sources(g)
    return FinDimClassification(
        g, maximal_cycles(g), tuple(v for v in g.vertices if g.is_isolated(v)))


@dataclass(frozen=True)
class GradedFinDimSupport:
    """Support constraint for finite graded solutions.

    Nonzero values can only sit on lifts of isolated vertices, finitely
    many of them; a graph without isolated vertices admits only the zero
    distribution.
    """

    graph: Graph
    isolated: tuple[str, ...]

    @property
    def only_zero(self) -> bool:
        return not self.isolated


def classify_graded_findim(g: Graph) -> GradedFinDimSupport:
    _require_isolated_sources(g)
    return GradedFinDimSupport(g, tuple(v for v in g.vertices if g.is_isolated(v)))


def periodic_value(cycle: CycleClass, t: int, values: tuple[int, ...], j: int, s: int) -> int:
    """Stable cycle row value d((w_j)_s) for s >= t.

    w_j is the j-th vertex of the canonical rotation (0-based) and the
    answer is values[i] for i congruent to j + t - s modulo the length.
    """
    n = cycle.length
    if len(values) != n:
        raise DistributionError(f"tuple arity {len(values)} does not match cycle length {n}")
    if not 0 <= j < n:
        raise DistributionError(f"vertex index {j} out of range for a cycle of length {n}")
    if s < t:
        raise DistributionError(f"level {s} is below the stabilisation threshold {t}")
    return values[(j + t - s) % n]


def _datum_for_graph(g: Graph, datum: RepDatum) -> tuple[
        dict[str, LevelMap], dict[str, SinkMap], dict[CycleClass, tuple[int, ...]]]:
    """Complete and validate a datum against a graph.

    Missing maps and tuples default to zero; foreign vertices, foreign
    cycles or arity mismatches are rejected.
    """
    isolated = {v: LevelMap.zero() for v in g.vertices if g.is_isolated(v)}
    for v, m in datum.isolated:
        if v not in isolated:
            raise DistributionError(f"{v!r} is not an isolated vertex of the graph")
        isolated[v] = m
    sinks = {w: SinkMap.zero() for w in g.vertices if g.is_sink(w) and not g.is_isolated(w)}
    for w, m in datum.sinks:
        if w not in sinks:
            raise DistributionError(f"{w!r} is not a sink of the graph")
        sinks[w] = m
    cycles = {c: (0,) * c.length for c in maximal_cycles(g)}
    for c, tup in datum.cycles:
        if c not in cycles:
            raise DistributionError(f"{c.id} is not a maximal cycle of the graph")
        if len(tup) != c.length:
            raise DistributionError(
                f"tuple arity {len(tup)} does not match cycle {c.id} of length {c.length}")
        if any(k < 0 for k in tup):
            raise DistributionError("cycle tuple entries must be natural numbers")
        cycles[c] = tuple(tup)
    return isolated, sinks, cycles


def construct_distribution(g: Graph, datum: RepDatum, lo: int) -> DimDistribution:
    """Realise a data tuple as a flow-valid distribution on a window.

    The stabilisation threshold t is the largest sink threshold (at
    least 0) and the window top is t plus the longest maximal cycle plus
    one.  Cycle rows rotate their tuples from t upward, sinks and
    isolated vertices follow their maps at every level, all remaining
    rows are zero from t upward, and levels below t are filled by the
    backward flow recursion down to `lo`.
    """
    _require_isolated_sources(g)
    isolated, sinks, cycles = _datum_for_graph(g, datum)
    t = max([m.threshold for m in sinks.values()] + [0])
    if lo > t:
        raise DistributionError(f"window start {lo} lies above the threshold {t}")
    hi = t + max([c.length for c in cycles] + [0]) + 1

    full = RepDatum.build(isolated, sinks, cycles)
    values: dict[tuple[str, int], int] = {}
    on_cycle: dict[str, tuple[CycleClass, int]] = {}
    for c in cycles:
        for j, v in enumerate(c.vertices):
            on_cycle[v] = (c, j)

    for v in g.vertices:
        if v in isolated:
            for i in range(lo, hi + 1):
                values[(v, i)] = isolated[v].at(i)
        elif v in sinks:
            for i in range(lo, hi + 1):
                values[(v, i)] = sinks[v].at(i)
        elif v in on_cycle:
            c, j = on_cycle[v]
            for s in range(t, hi + 1):
                values[(v, s)] = periodic_value(c, t, cycles[c], j, s)
        else:
            for s in range(t, hi + 1):
                values[(v, s)] = 0

    # backward flow recursion fills every non-sink, non-isolated row below t
    for s in range(t - 1, lo - 1, -1):
        for v in g.vertices:
            if v in isolated or v in sinks:
                continue
            values[(v, s)] = sum(values[(e.dst, s + 1)] for e in g.out_edges(v))

    return DimDistribution(g, lo, hi, t, values, full)


def _least_vanishing(dist: DimDistribution, v: str) -> int:
    """Least level from which the row of v is zero through the window top.

    Returns lo when the whole row vanishes and hi + 1 when the top value
    is nonzero.
    """
    cut = dist.hi + 1
    for i in range(dist.hi, dist.lo - 1, -1):
        if dist.values[(v, i)] != 0:
            break
        cut = i
    return cut


def extract_datum(dist: DimDistribution) -> RepDatum:
    """Read the classifying data back off a flow-valid distribution.

    Thresholds are normalised to the least vanishing levels visible in
    the window; cycle tuples are read along the canonical rotation at the
    normalised stabilisation threshold.  Inverse to
    `construct_distribution` up to that normalisation.
    """
    check = validate_flow(dist)
    if not check.ok:
        raise DistributionError(
            f"distribution violates the flow equation at {check.vertex}@{check.level}: "
            f"{check.lhs} != {check.rhs}")
    g = dist.graph
    cycles = maximal_cycles(g)
    on_cycle = {v for c in cycles for v in c.vertex_set}

    t = 0
    for v in g.vertices:
        if v in on_cycle or g.is_isolated(v):
            continue
        t = max(t, _least_vanishing(dist, v))
    if t > dist.hi:
        raise DistributionError(
            "no stable tail inside the window; the distribution does not vanish "
            "off the maximal cycles")

    isolated = {
        v: LevelMap.of({i: dist.values[(v, i)] for i in dist.levels()})
        for v in g.vertices if g.is_isolated(v)
    }
    sinks = {}
    for w in g.vertices:
        if not g.is_sink(w) or g.is_isolated(w):
            continue
        cut = _least_vanishing(dist, w)
        sinks[w] = SinkMap.of(
            {i: dist.values[(w, i)] for i in range(dist.lo, cut)}, threshold=cut)
    tuples = {
        c: tuple(dist.values[(v, t)] for v in c.vertices)
        for c in cycles
    }
    return RepDatum.build(isolated, sinks, tuples)


@dataclass(frozen=True)
class TrivialityReport:
    """Whether a row is witnessed to vanish from some window level onward."""

    trivial: bool
    threshold: int | None = None


def check_eventually_trivial(dist: DimDistribution, v: str) -> TrivialityReport:
    """Witness eventual triviality of the row of v inside the window.

    Applies to vertices off the maximal cycles, and to vertices based at
    more than one closed simple path; rows of the former must moreover be
    identically zero when the graph has neither sources nor sinks.
    """
    g = dist.graph
    _require_isolated_sources(g)
    g.check_vertices((v,))
    off_cycles = v not in {u for c in maximal_cycles(g) for u in c.vertex_set}
    if not off_cycles and not csp_count_exceeds_one(g, v):
        raise PreconditionError(
            f"{v!r} lies on a maximal cycle and has at most one closed simple path; "
            "its row need not be eventually trivial")
    cut = _least_vanishing(dist, v)
    no_sinks = all(not g.is_sink(u) for u in g.vertices)
    no_sources = all(not g.is_source(u) for u in g.vertices)
    if off_cycles and no_sinks and no_sources and cut != dist.lo:
        raise DistributionError(
            f"row of {v!r} should vanish identically on a graph with no sources "
            f"and no sinks, but is nonzero at level {cut - 1}")
    if cut <= dist.hi:
        return TrivialityReport(True, cut)
    return TrivialityReport(False)


@dataclass(frozen=True)
class DistributionSpace:
    """The distributions of a graph with no sources and no sinks.

    They correspond exactly to a choice of one natural tuple per maximal
    cycle, one coordinate per cycle vertex.
    """

    graph: Graph
    cycles: tuple[CycleClass, ...]

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(c.length for c in self.cycles)

    def count(self, bound: int) -> int:
        n = 1
        for a in self.arities:
            n *= (bound + 1) ** a
        return n

    def enumerate_data(self, bound: int) -> Iterator[RepDatum]:
        """All data with tuple entries between 0 and `bound`, in order."""
        if bound < 0:
            raise DistributionError("enumeration bound must be a natural number")

        def rec(idx: int, acc: dict[CycleClass, tuple[int, ...]]) -> Iterator[RepDatum]:
            if idx == len(self.cycles):
                yield RepDatum.build(cycles=dict(acc))
                return
            c = self.cycles[idx]
            for tup in _tuples(c.length, bound):
                acc[c] = tup
                yield from rec(idx + 1, acc)
            acc.pop(c, None)

        yield from rec(0, {})


def _tuples(arity: int, bound: int) -> Iterator[tuple[int, ...]]:
    if arity == 0:
        yield ()
        return
    for head in range(bound + 1):
        for rest in _tuples(arity - 1, bound):
            yield (head,) + rest


def distribution_space(g: Graph) -> DistributionSpace:
    bad = [v for v in g.vertices if g.is_source(v) or g.is_sink(v)]
    if bad:
        raise PreconditionError(f"graph must have no sources and no sinks, found {bad[0]!r}")
    return DistributionSpace(g, maximal_cycles(g))


def shift_distribution(dist: DimDistribution, k: int) -> DimDistribution:
    """The level shift d'(v_i) = d(v_{i+k}); shifting by k then -k is the
    identity, bit for bit."""
    values = {(v, i - k): c for (v, i), c in dist.values.items()}
    return DimDistribution(dist.graph, dist.lo - k, dist.hi - k, dist.t - k,
                           values, dist.datum.shifted(k))


# -- transfer along a signature matching -------------------------------------


def transfer_variant(g1: Graph, g2: Graph) -> str:
    """Which equivalence a transfer between these graphs witnesses.

    "essential" when neither graph has sources or sinks (the locally
    finite graded category transfers); otherwise "sinks-allowed" (the
    finite and finite graded categories transfer, sources must still be
    isolated).
    """
    essential = all(
        not g.is_source(v) and not g.is_sink(v)
        for g in (g1, g2) for v in g.vertices)
    return "essential" if essential else "sinks-allowed"


def transfer_datum(datum: RepDatum, match: CandidateResult) -> RepDatum:
    """Carry classifying data across a compatible signature matching.

    Maximal cycles travel along the matching; maximal sinks likewise.
    Non-maximal sinks and isolated vertices are not covered by the
    signature, so they are paired up in declaration order, which requires
    equal counts on both sides.
    """
    if not match.compatible:
        raise DistributionError(f"incompatible graphs: {match.witness}")
    g1, g2 = match.graph1, match.graph2
    sink_pairs = dict(match.sink_matching)
    max1 = set(maximal_sinks(g1))
    max2 = set(maximal_sinks(g2))
    rest1 = [w for w in g1.vertices if g1.is_sink(w) and not g1.is_isolated(w) and w not in max1]
    rest2 = [w for w in g2.vertices if g2.is_sink(w) and not g2.is_isolated(w) and w not in max2]
    if len(rest1) != len(rest2):
        raise DistributionError(
            f"non-maximal sink counts differ: {len(rest1)} vs {len(rest2)}")
    sink_pairs.update(zip(rest1, rest2))
    iso1 = [v for v in g1.vertices if g1.is_isolated(v)]
    iso2 = [v for v in g2.vertices if g2.is_isolated(v)]
    if len(iso1) != len(iso2):
        raise DistributionError(
            f"isolated vertex counts differ: {len(iso1)} vs {len(iso2)}")
    iso_pairs = dict(zip(iso1, iso2))

    cycle_pairs = dict(match.cycle_matching)
    cycles = {}
    for c, tup in datum.cycles:
        if c not in cycle_pairs:
            raise DistributionError(f"cycle {c.id} is not covered by the matching")
        cycles[cycle_pairs[c]] = tup
    sinks = {}
    for w, m in datum.sinks:
        if w not in sink_pairs:
            raise DistributionError(f"sink {w!r} is not covered by the matching")
        sinks[sink_pairs[w]] = m
    isolated = {}
    for v, m in datum.isolated:
        if v not in iso_pairs:
            raise DistributionError(f"isolated vertex {v!r} is not covered by the matching")
        isolated[iso_pairs[v]] = m
    return RepDatum.build(isolated, sinks, cycles)


def transfer(dist: DimDistribution, match: CandidateResult) -> DimDistribution:
    """Rebuild a distribution on the matched graph from transferred data.

    Transferring along a matching and then along its reverse is the
    identity on data, and the result is always flow-valid on the target.
    """
    if dist.graph != match.graph1:
        raise DistributionError("distribution lives on a different graph than the matching")
    moved = transfer_datum(dist.datum, match)
    return construct_distribution(match.graph2, moved, dist.lo)
