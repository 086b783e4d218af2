"""Command line surface: JSON reports over the library, DOT exports.

Every command is a thin wrapper: it parses its input files, calls one
library operation and serialises the result.  Reports are deterministic
(fixed key order, no timestamps) and parse back as JSON.

Exit codes: 0 success, 2 parse error, 3 precondition violation, 4 a
validator found a violation, 5 an enumeration cap was exceeded.  The
GQW_MAX_VERTICES environment variable overrides the vertex cap of the
ideal lattice enumeration (default 20).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import __version__
from .covering import (
    ck_relations,
    covering_window,
    double_graph,
    dot_double_graph,
    dot_graph,
    dot_window,
    lift_relations,
)
from .distributions import (
    DimDistribution,
    DistributionError,
    construct_distribution,
    distribution_space,
    extract_datum,
    shift_distribution,
    transfer,
    transfer_variant,
    validate_flow,
)
from .formats import (
    GraphDocument,
    ParseError,
    parse_datum,
    parse_distribution,
    parse_graph,
    parse_rep,
    serialize_datum,
    serialize_distribution,
)
from .graphs import (
    CapExceededError,
    GraphError,
    PreconditionError,
    csp_gt1,
    enumerate_cycles,
    maximal_cycle_vertices,
    maximal_cycles,
    maximal_sinks,
    vertex_classes,
)
from .matreps import MatrixError, dim_vector, shape_check, validate_ck
from .monoids import (
    DEFAULT_HSAT_CAP,
    candidate_check,
    classify_quotient,
    enumerate_hsat,
    signature,
    talmax,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VIOLATION = 4
EXIT_CAP = 5


class _Violation(Exception):
    """Raised by handlers when a validator found a violation; carries the
    report that should still be printed."""

    def __init__(self, report: dict):
        super().__init__("violation found")
        self.report = report


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(0, 0, f"cannot read {path}: {exc}") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_graph(path: str) -> GraphDocument:
    return parse_graph(_read(path))


def _emit(args, result: dict) -> None:
    report = {"command": args._argv, "version": __version__, "result": result}
    print(json.dumps(report, indent=2))


def _vertices(g, vs) -> list[str]:
    return list(g.sorted_vertices(vs))


def _rows(dist: DimDistribution) -> list[list]:
    return [[v, i, dist.values[(v, i)]]
            for v in dist.graph.vertices for i in dist.levels()]


def _datum_json(datum) -> dict:
    return {
        "isolated": [
            {"vertex": v, "default": {"kind": m.default.kind, "value": m.default.value},
             "table": [[i, val] for i, val in m.table]}
            for v, m in datum.isolated],
        "sinks": [
            {"vertex": w, "threshold": m.threshold,
             "default": {"kind": m.default.kind, "value": m.default.value},
             "table": [[i, val] for i, val in m.table]}
            for w, m in datum.sinks],
        "cycles": [{"cycle": c.id, "tuple": list(tup)} for c, tup in datum.cycles],
    }


# -- handlers ----------------------------------------------------------------


def _cmd_analyze(args) -> None:
    doc = _load_graph(args.graph)
    g = doc.graph
    classes = vertex_classes(g)
    cycles = enumerate_cycles(g)
    maxi = maximal_cycles(g)
    result = {
        "graph": doc.name,
        "vertex_classes": {
            "sinks": list(classes.sinks),
            "sources": list(classes.sources),
            "isolated": list(classes.isolated),
            "regular": list(classes.regular),
        },
        "cycles": [{"id": c.id, "length": c.length, "vertices": list(c.vertices)}
                   for c in cycles],
        "maximal_cycles": [c.id for c in maxi],
        "maximal_sinks": list(maximal_sinks(g)),
        "maximal_cycle_vertices": _vertices(g, maximal_cycle_vertices(g)),
        "csp_gt1": list(csp_gt1(g)),
    }
    if args.dot:
        _write(args.dot, dot_graph(g))
        result["dot"] = args.dot
    _emit(args, result)


def _cmd_signature(args) -> None:
    doc = _load_graph(args.graph)
    sig = signature(doc.graph)
    _emit(args, {
        "graph": doc.name,
        "cycle_lengths": list(sig.cycle_lengths),
        "sink_count": sig.sink_count,
    })


def _cmd_compare(args) -> None:
    d1, d2 = _load_graph(args.graph1), _load_graph(args.graph2)
    res = candidate_check(d1.graph, d2.graph)
    _emit(args, {
        "graphs": [d1.name, d2.name],
        "compatible": res.compatible,
        "witness": res.witness,
        "cycle_matching": [[a.id, b.id] for a, b in res.cycle_matching],
        "sink_matching": [[a, b] for a, b in res.sink_matching],
    })


def _cmd_ideals(args) -> None:
    doc = _load_graph(args.graph)
    g = doc.graph
    cap = int(os.environ.get("GQW_MAX_VERTICES", DEFAULT_HSAT_CAP))
    lattice = enumerate_hsat(g, cap=cap)
    ideals = []
    for h in lattice:
        kind = classify_quotient(g, h)
        ideals.append({
            "vertices": list(h.sorted_vertices),
            "shape": kind.shape.value,
            "period": kind.period,
        })
    index = {h: n for n, h in enumerate(lattice.sets)}
    corr = talmax(g)
    _emit(args, {
        "graph": doc.name,
        "ideals": ideals,
        "hasse": [[index[a], index[b]] for a, b in lattice.hasse_pairs()],
        "cycle_correspondence": [
            {"cycle": c.id, "period": c.length, "ideal": list(h.sorted_vertices)}
            for c, h in corr.cycle_pairs],
        "sink_correspondence": [
            {"sink": z, "ideal": list(h.sorted_vertices)}
            for z, h in corr.sink_pairs],
    })


def _cmd_cover(args) -> None:
    doc = _load_graph(args.graph)
    dg = double_graph(doc.graph)
    window = covering_window(dg, args.lo, args.hi)
    rels = lift_relations(ck_relations(doc.graph), args.lo, args.hi)
    result = {
        "graph": doc.name,
        "window": [window.lo, window.hi],
        "vertices": [str(v) for v in window.vertices],
        "edges": [{"id": str(e), "src": str(e.src), "dst": str(e.dst),
                   "ghost": window.is_ghost(e.edge.id)} for e in window.edges],
        "relations": {
            "pairs": [str(r) for r in rels.pairs],
            "sums": [str(r) for r in rels.sums],
            "note": rels.note,
        },
        "boundary": [[eid, lvl] for eid, lvl in window.boundary],
    }
    if args.dot:
        _write(args.dot, dot_window(window))
        result["dot"] = args.dot
    if args.double_dot:
        _write(args.double_dot, dot_double_graph(dg))
        result["double_dot"] = args.double_dot
    _emit(args, result)


def _distribution_result(doc: GraphDocument, dist: DimDistribution) -> dict:
    flow = validate_flow(dist)
    return {
        "graph": doc.name,
        "window": [dist.lo, dist.hi],
        "threshold": dist.t,
        "flow": "valid" if flow.ok else "violation",
        "datum": _datum_json(dist.datum),
        "rows": _rows(dist),
    }


def _cmd_distribute(args) -> None:
    doc = _load_graph(args.graph)
    datum = parse_datum(_read(args.datum), doc.graph)
    dist = construct_distribution(doc.graph, datum, args.lo)
    result = _distribution_result(doc, dist)
    if args.out:
        _write(args.out, serialize_distribution(dist, doc.name))
        result["out"] = args.out
    _emit(args, result)


def _cmd_extract(args) -> None:
    doc = _load_graph(args.graph)
    dist = parse_distribution(_read(args.dist), doc.graph)
    flow = validate_flow(dist)
    if not flow.ok:
        raise _Violation({
            "graph": doc.name,
            "flow": "violation",
            "violation": {"vertex": flow.vertex, "level": flow.level,
                          "lhs": flow.lhs, "rhs": flow.rhs},
        })
    datum = extract_datum(dist)
    _emit(args, {
        "graph": doc.name,
        "flow": "valid",
        "datum": _datum_json(datum),
        "datum_text": serialize_datum(datum),
    })


def _cmd_shift(args) -> None:
    doc = _load_graph(args.graph)
    dist = parse_distribution(_read(args.dist), doc.graph)
    shifted = shift_distribution(dist, args.k)
    result = _distribution_result(doc, shifted)
    result["k"] = args.k
    if args.out:
        _write(args.out, serialize_distribution(shifted, doc.name))
        result["out"] = args.out
    _emit(args, result)


def _cmd_transfer(args) -> None:
    d1, d2 = _load_graph(args.graph1), _load_graph(args.graph2)
    datum = parse_datum(_read(args.datum), d1.graph)
    match = candidate_check(d1.graph, d2.graph)
    if not match.compatible:
        raise PreconditionError(f"incompatible graphs: {match.witness}")
    source = construct_distribution(d1.graph, datum, args.lo)
    moved = transfer(source, match)
    result = _distribution_result(d2, moved)
    result["variant"] = transfer_variant(d1.graph, d2.graph)
    result["cycle_matching"] = [[a.id, b.id] for a, b in match.cycle_matching]
    result["sink_matching"] = [[a, b] for a, b in match.sink_matching]
    if args.out:
        _write(args.out, serialize_distribution(moved, d2.name))
        result["out"] = args.out
    _emit(args, result)


def _cmd_validate_rep(args) -> None:
    doc = _load_graph(args.graph)
    rep = parse_rep(_read(args.rep), doc.graph)
    check = validate_ck(rep)
    result = {
        "graph": doc.name,
        "valid": check.ok,
        "violation": None if check.ok else {
            "relation": check.relation,
            "residual": str(check.residual),
        },
        "dims": dim_vector(rep),
    }
    if check.ok:
        shape = shape_check(rep)
        result["shape"] = {"conformant": shape.conformant, "witness": shape.witness}
        _emit(args, result)
    else:
        raise _Violation(result)


def _cmd_enumerate_dist(args) -> None:
    doc = _load_graph(args.graph)
    space = distribution_space(doc.graph)
    data = list(space.enumerate_data(args.bound))
    _emit(args, {
        "graph": doc.name,
        "cycles": [{"id": c.id, "length": c.length} for c in space.cycles],
        "bound": args.bound,
        "count": space.count(args.bound),
        "data": [{c.id: list(tup) for c, tup in datum.cycles} for datum in data],
    })


# -- argument parsing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gqw",
        description="graded invariants of finite directed graphs",
    )
    parser.add_argument("--version", action="version", version=f"gqw {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("analyze", help="vertex classes, cycles, maximal cycles and sinks")
    p.add_argument("graph")
    p.add_argument("--dot", help="write a DOT rendering of the graph")
    p.set_defaults(run=_cmd_analyze)

    p = sub.add_parser("signature", help="maximal cycle lengths and maximal sink count")
    p.add_argument("graph")
    p.set_defaults(run=_cmd_signature)

    p = sub.add_parser("compare", help="signature screen between two graphs")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.set_defaults(run=_cmd_compare)

    p = sub.add_parser("ideals", help="hereditary saturated lattice and quotient shapes")
    p.add_argument("graph")
    p.set_defaults(run=_cmd_ideals)

    p = sub.add_parser("cover", help="covering window of the double graph")
    p.add_argument("graph")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--dot", help="write a DOT rendering of the window")
    p.add_argument("--double-dot", dest="double_dot", help="write a DOT rendering of the double graph")
    p.set_defaults(run=_cmd_cover)

    p = sub.add_parser("distribute", help="construct a distribution from a datum file")
    p.add_argument("graph")
    p.add_argument("--datum", required=True)
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--out", help="write the canonical table file")
    p.set_defaults(run=_cmd_distribute)

    p = sub.add_parser("extract", help="read the datum back off a distribution table")
    p.add_argument("graph")
    p.add_argument("--dist", required=True)
    p.set_defaults(run=_cmd_extract)

    p = sub.add_parser("shift", help="shift a distribution table by k levels")
    p.add_argument("graph")
    p.add_argument("--dist", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", help="write the shifted table file")
    p.set_defaults(run=_cmd_shift)

    p = sub.add_parser("transfer", help="carry a datum across a signature matching")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--datum", required=True)
    p.add_argument("--lo", type=int, default=0)
    p.add_argument("--out", help="write the transferred table file")
    p.set_defaults(run=_cmd_transfer)

    p = sub.add_parser("validate-rep", help="check the Cuntz-Krieger relations of a matrix rep")
    p.add_argument("graph")
    p.add_argument("--rep", required=True)
    p.set_defaults(run=_cmd_validate_rep)

    p = sub.add_parser("enumerate-dist", help="enumerate distributions up to a tuple bound")
    p.add_argument("graph")
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(run=_cmd_enumerate_dist)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        args.run(args)
    except ParseError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"error: cap-exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except _Violation as exc:
        _emit(args, exc.report)
        print("error: violation: a validator reported a violation", file=sys.stderr)
        return EXIT_VIOLATION
    except (PreconditionError, GraphError, DistributionError, MatrixError) as exc:
        print(f"error: precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
