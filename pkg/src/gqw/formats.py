"""Text formats: graph documents, datum files, distribution tables, reps.

Everything here is line-oriented UTF-8 with `#` comments.  Parsers report
syntax errors with one-based line and column numbers; serialisers emit a
canonical form that parses back bit for bit.

Graph documents::

    graph F
    vertices: a b c
    edges:
      e1: a -> b
      e2: a -> c
      e3: b -> b

Datum files carry one section per classified object; level rules are
`const:<n>` or `abs[:<offset>]` (meaning |i + offset|)::

    [isolated x] default=abs
    [sink w] threshold=1 default=const:1
    [cycle e1.e2] tuple=(2,3)

Distribution tables list the window, threshold, tail data and one `row`
line per (vertex, level) in declaration order.  Representation files
list per-vertex dimensions and row-major exact rational matrices with an
explicit shape.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .distributions import (
    DimDistribution,
    DistributionError,
    LevelMap,
    LevelRule,
    RepDatum,
    SinkMap,
)
from .graphs import CycleClass, Graph, maximal_cycles
from .matreps import FiniteRep, Matrix


class ParseError(ValueError):
    """Syntax or reference error in a text document."""

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class GraphDocument:
    name: str
    graph: Graph


_ID = r"[A-Za-z0-9_]+"
_EDGE_RE = re.compile(rf"^({_ID})\s*:\s*({_ID})\s*->\s*({_ID})\s*$")


def _meaningful_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, line


def parse_graph(text: str) -> GraphDocument:
    """Parse a graph document; duplicate or dangling ids are rejected."""
    name = ""
    vertices: list[str] = []
    vset: set[str] = set()
    edges: list[tuple[str, str, str]] = []
    eids: set[str] = set()
    mode = "head"
    for lineno, line in _meaningful_lines(text):
        stripped = line.strip()
        col = line.index(stripped[0]) + 1
        if stripped.startswith("graph ") and mode == "head":
            name = stripped[len("graph "):].strip()
            if not re.fullmatch(_ID, name):
                raise ParseError(lineno, col + 6, f"bad graph name {name!r}")
            continue
        if stripped.startswith("vertices:"):
            mode = "vertices"
            for v in stripped[len("vertices:"):].split():
                if not re.fullmatch(_ID, v):
                    raise ParseError(lineno, line.index(v) + 1, f"bad vertex id {v!r}")
                if v in vset:
                    raise ParseError(lineno, line.index(v) + 1, f"duplicate vertex id {v!r}")
                vset.add(v)
                vertices.append(v)
            continue
        if stripped == "edges:":
            mode = "edges"
            continue
        if mode == "edges":
            m = _EDGE_RE.match(stripped)
            if not m:
                raise ParseError(lineno, col, f"expected 'id: src -> dst', got {stripped!r}")
            eid, src, dst = m.groups()
            if eid in eids:
                raise ParseError(lineno, col, f"duplicate edge id {eid!r}")
            if src not in vset:
                raise ParseError(lineno, line.index(src, line.index(":")) + 1,
                                 f"unknown vertex {src!r}")
            if dst not in vset:
                raise ParseError(lineno, line.rindex(dst) + 1, f"unknown vertex {dst!r}")
            eids.add(eid)
            edges.append((eid, src, dst))
            continue
        raise ParseError(lineno, col, f"unexpected line {stripped!r}")
    return GraphDocument(name, Graph(vertices, edges))


def serialize_graph(doc: GraphDocument) -> str:
    lines = []
    if doc.name:
        lines.append(f"graph {doc.name}")
    lines.append("vertices: " + " ".join(doc.graph.vertices))
    lines.append("edges:")
    lines.extend(f"  {e.id}: {e.src} -> {e.dst}" for e in doc.graph.edges)
    return "\n".join(lines) + "\n"


# -- level rules and maps ------------------------------------------------


def _parse_rule(token: str, lineno: int, col: int) -> LevelRule:
    if token == "abs":
        return LevelRule("abs", 0)
    if token.startswith("abs:"):
        return LevelRule("abs", _parse_int(token[4:], lineno, col))
    if token.startswith("const:"):
        value = _parse_int(token[6:], lineno, col)
        if value < 0:
            raise ParseError(lineno, col, "constant rule needs a natural value")
        return LevelRule("const", value)
    raise ParseError(lineno, col, f"unknown level rule {token!r}")


def _rule_text(rule: LevelRule) -> str:
    if rule.kind == "abs":
        return "abs" if rule.value == 0 else f"abs:{rule.value}"
    return f"const:{rule.value}"


def _parse_int(token: str, lineno: int, col: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, col, f"expected an integer, got {token!r}") from None


_SECTION_RE = re.compile(r"^\[(isolated|sink|cycle)\s+([A-Za-z0-9_.*]+)\]\s*(.*)$")
_TUPLE_RE = re.compile(r"^\(\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*\)$")


def _cycle_by_id(g: Graph, cid: str) -> CycleClass:
    for c in maximal_cycles(g):
        if c.id == cid:
            return c
    raise DistributionError(f"{cid!r} does not name a maximal cycle of the graph")


def parse_datum(text: str, g: Graph) -> RepDatum:
    """Parse a datum file against a graph.

    Sections: `[isolated v]`, `[sink w]` and `[cycle <canonical id>]`,
    each followed by key=value pairs on the same line (`threshold`,
    `default`, `tuple` and integer level entries).
    """
    isolated: dict[str, LevelMap] = {}
    sinks: dict[str, SinkMap] = {}
    cycles: dict[CycleClass, tuple[int, ...]] = {}
    for lineno, line in _meaningful_lines(text):
        stripped = line.strip()
        col = line.index(stripped[0]) + 1
        m = _SECTION_RE.match(stripped)
        if not m:
            raise ParseError(lineno, col, f"expected a [section], got {stripped!r}")
        kind, name, rest = m.groups()
        pairs = {}
        for token in rest.split():
            if "=" not in token:
                raise ParseError(lineno, line.index(token) + 1,
                                 f"expected key=value, got {token!r}")
            key, val = token.split("=", 1)
            if key in pairs:
                raise ParseError(lineno, line.index(token) + 1, f"duplicate key {key!r}")
            pairs[key] = (val, line.index(token) + 1)
        if kind == "cycle":
            if set(pairs) != {"tuple"}:
                raise ParseError(lineno, col, "a cycle section needs exactly tuple=(...)")
            val, vcol = pairs["tuple"]
            tm = _TUPLE_RE.match(val)
            if not tm:
                raise ParseError(lineno, vcol, f"bad tuple {val!r}")
            entries = tuple(int(x) for x in tm.group(1).split(",")) if tm.group(1) else ()
            try:
                cycles[_cycle_by_id(g, name)] = entries
            except DistributionError as exc:
                raise ParseError(lineno, col, str(exc)) from None
            continue
        default = LevelRule()
        if "default" in pairs:
            val, vcol = pairs.pop("default")
            default = _parse_rule(val, lineno, vcol)
        threshold = None
        if "threshold" in pairs:
            val, vcol = pairs.pop("threshold")
            threshold = _parse_int(val, lineno, vcol)
        table = {}
        for key, (val, vcol) in pairs.items():
            table[_parse_int(key, lineno, vcol)] = _parse_int(val, lineno, vcol)
        if kind == "isolated":
            if threshold is not None:
                raise ParseError(lineno, col, "isolated sections take no threshold")
            if not g.has_vertex(name) or not g.is_isolated(name):
                raise ParseError(lineno, col, f"{name!r} is not an isolated vertex")
            isolated[name] = LevelMap.of(table, default)
        else:
            if threshold is None:
                raise ParseError(lineno, col, "sink sections need threshold=<level>")
            if not g.has_vertex(name) or not g.is_sink(name) or g.is_isolated(name):
                raise ParseError(lineno, col, f"{name!r} is not a sink")
            try:
                sinks[name] = SinkMap.of(table, threshold, default)
            except DistributionError as exc:
                raise ParseError(lineno, col, str(exc)) from None
    return RepDatum.build(isolated, sinks, cycles)


def _map_entries(table: tuple[tuple[int, int], ...]) -> str:
    return "".join(f" {i}={v}" for i, v in table)


def serialize_datum(datum: RepDatum) -> str:
    lines = []
    for v, m in datum.isolated:
        lines.append(f"[isolated {v}] default={_rule_text(m.default)}{_map_entries(m.table)}")
    for w, m in datum.sinks:
        lines.append(f"[sink {w}] threshold={m.threshold} "
                     f"default={_rule_text(m.default)}{_map_entries(m.table)}")
    for c, tup in datum.cycles:
        lines.append(f"[cycle {c.id}] tuple=({','.join(str(k) for k in tup)})")
    return "\n".join(lines) + "\n" if lines else ""


# -- distribution tables ---------------------------------------------------


def serialize_distribution(dist: DimDistribution, name: str = "") -> str:
    """Canonical table form; rows ordered by vertex declaration, then level."""
    lines = ["distribution"]
    if name:
        lines.append(f"graph {name}")
    lines.append(f"window {dist.lo} {dist.hi}")
    lines.append(f"threshold {dist.t}")
    for v, m in dist.datum.isolated:
        lines.append(f"isolated {v} default={_rule_text(m.default)}{_map_entries(m.table)}")
    for w, m in dist.datum.sinks:
        lines.append(f"sink {w} threshold={m.threshold} "
                     f"default={_rule_text(m.default)}{_map_entries(m.table)}")
    for c, tup in dist.datum.cycles:
        lines.append(f"cycle {c.id} tuple=({','.join(str(k) for k in tup)})")
    for v in dist.graph.vertices:
        for i in dist.levels():
            lines.append(f"row {v} {i} {dist.values[(v, i)]}")
    return "\n".join(lines) + "\n"


def parse_distribution(text: str, g: Graph) -> DimDistribution:
    lineiter = _meaningful_lines(text)
    try:
        lineno, line = next(lineiter)
    except StopIteration:
        raise ParseError(1, 1, "empty distribution document") from None
    if line.strip() != "distribution":
        raise ParseError(lineno, 1, "a distribution document starts with 'distribution'")
    window: tuple[int, int] | None = None
    threshold: int | None = None
    isolated: dict[str, LevelMap] = {}
    sinks: dict[str, SinkMap] = {}
    cycles: dict[CycleClass, tuple[int, ...]] = {}
    values: dict[tuple[str, int], int] = {}
    for lineno, line in lineiter:
        stripped = line.strip()
        col = line.index(stripped[0]) + 1
        tokens = stripped.split()
        head = tokens[0]
        if head == "graph":
            continue
        if head == "window":
            if len(tokens) != 3:
                raise ParseError(lineno, col, "window takes two integers")
            window = (_parse_int(tokens[1], lineno, col), _parse_int(tokens[2], lineno, col))
            continue
        if head == "threshold":
            if len(tokens) != 2:
                raise ParseError(lineno, col, "threshold takes one integer")
            threshold = _parse_int(tokens[1], lineno, col)
            continue
        if head in ("isolated", "sink", "cycle"):
            section = f"[{head} {tokens[1]}] {' '.join(tokens[2:])}"
            sub = parse_datum(section, g)
            isolated.update(sub.isolated_map)
            sinks.update(sub.sink_map)
            cycles.update(sub.cycle_map)
            continue
        if head == "row":
            if len(tokens) != 4:
                raise ParseError(lineno, col, "row takes vertex, level, value")
            v = tokens[1]
            if not g.has_vertex(v):
                raise ParseError(lineno, col, f"unknown vertex {v!r}")
            i = _parse_int(tokens[2], lineno, col)
            val = _parse_int(tokens[3], lineno, col)
            if (v, i) in values:
                raise ParseError(lineno, col, f"duplicate row for {v}@{i}")
            values[(v, i)] = val
            continue
        raise ParseError(lineno, col, f"unexpected line {stripped!r}")
    if window is None or threshold is None:
        raise ParseError(1, 1, "distribution document needs window and threshold lines")
    datum = RepDatum.build(isolated, sinks, cycles)
    try:
        return DimDistribution(g, window[0], window[1], threshold, values, datum)
    except DistributionError as exc:
        raise ParseError(1, 1, str(exc)) from None


# -- representation files ----------------------------------------------------


def _fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def serialize_rep(rep: FiniteRep, name: str = "") -> str:
    lines = ["rep"]
    if name:
        lines.append(f"graph {name}")
    for v in rep.base.vertices:
        lines.append(f"dim {v} {rep.dims[v]}")
    for e in rep.base.edges:
        for label, m in (("edge", rep.real[e.id]), ("ghost", rep.ghost[e.id])):
            flat = " ".join(_fraction_text(x) for row in m.data for x in row)
            suffix = f" {flat}" if flat else ""
            lines.append(f"{label} {e.id} {m.rows} {m.cols}{suffix}")
    return "\n".join(lines) + "\n"


def parse_rep(text: str, g: Graph) -> FiniteRep:
    lineiter = _meaningful_lines(text)
    try:
        lineno, line = next(lineiter)
    except StopIteration:
        raise ParseError(1, 1, "empty representation document") from None
    if line.strip() != "rep":
        raise ParseError(lineno, 1, "a representation document starts with 'rep'")
    dims: dict[str, int] = {}
    real: dict[str, Matrix] = {}
    ghost: dict[str, Matrix] = {}
    for lineno, line in lineiter:
        stripped = line.strip()
        col = line.index(stripped[0]) + 1
        tokens = stripped.split()
        head = tokens[0]
        if head == "graph":
            continue
        if head == "dim":
            if len(tokens) != 3:
                raise ParseError(lineno, col, "dim takes vertex and value")
            if not g.has_vertex(tokens[1]):
                raise ParseError(lineno, col, f"unknown vertex {tokens[1]!r}")
            dims[tokens[1]] = _parse_int(tokens[2], lineno, col)
            continue
        if head in ("edge", "ghost"):
            if len(tokens) < 4:
                raise ParseError(lineno, col, f"{head} takes id, rows, cols, entries")
            eid = tokens[1]
            if not g.has_edge(eid):
                raise ParseError(lineno, col, f"unknown edge {eid!r}")
            rows = _parse_int(tokens[2], lineno, col)
            cols = _parse_int(tokens[3], lineno, col)
            entries = tokens[4:]
            if len(entries) != rows * cols:
                raise ParseError(lineno, col,
                                 f"expected {rows * cols} entries, got {len(entries)}")
            try:
                flat = [Fraction(x) for x in entries]
            except (ValueError, ZeroDivisionError):
                raise ParseError(lineno, col, "bad rational entry") from None
            data = tuple(tuple(flat[r * cols:(r + 1) * cols]) for r in range(rows))
            (real if head == "edge" else ghost)[eid] = Matrix(rows, cols, data)
            continue
        raise ParseError(lineno, col, f"unexpected line {stripped!r}")
    return FiniteRep(g, dims, real, ghost)
