"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
Everything is exact: no tolerances anywhere.
"""

import functools
import json
import random
import time
from collections import Counter

from gqw import (
    EqResult,
    Graph,
    Matrix,
    QuotientShape,
    RepDatum,
    Signature,
    candidate_check,
    classify_quotient,
    construct_distribution,
    covering_window,
    distribution_space,
    double_graph,
    enumerate_hsat,
    eq_bounded,
    extract_datum,
    maximal_cycle_vertices,
    maximal_cycles,
    maximal_sinks,
    periodic_value,
    shift_distribution,
    shift_window,
    signature,
    talmax,
    transfer,
    validate_ck,
    validate_flow,
)
from gqw.cli import main
from gqw.matreps import FiniteRep
from gqw.monoids import TalentedElement

from _fixtures import (
    all_simple_dags,
    all_three_vertex_simple_graphs,
    comet4,
    cycle_graph,
    display_e,
    display_f,
    display_g,
    forward_cycle_rows,
    intro_line,
    intro_loop,
    random_datum,
    random_graph,
    random_no_source_graph,
    random_no_source_no_sink_graph,
    relabel,
    rose2,
    sequential_normal_form,
    two_loops,
    worked,
    worked_datum,
)


def criterion(number, label):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number:02d} FAIL  {label}")
                raise
            print(f"ACCEPTANCE {number:02d} PASS  {label}")
        return run
    return wrap


@criterion(1, "signature discrimination of the three-fan graphs and the intro pair")
def test_criterion_01_signature_discrimination():
    start = time.monotonic()
    e, f, g = display_e(), display_f(), display_g()
    assert signature(e) == Signature((1, 1), 0)
    assert signature(f) == Signature((1,), 1)
    assert signature(g) == Signature((), 2)
    for g1, g2 in ((e, f), (e, g), (f, g)):
        assert not candidate_check(g1, g2).compatible
    assert not candidate_check(intro_line(), intro_loop()).compatible
    assert time.monotonic() - start < 1.0


@criterion(2, "maximal cycle/sink counts equal comet and unique-sink ideal counts")
def test_criterion_02_ideal_correspondence():
    start = time.monotonic()
    rng = random.Random(20250)
    graphs = [random_graph(rng, max_v=6, max_e=10) for _ in range(200)]
    graphs.extend(all_three_vertex_simple_graphs())
    for g in graphs:
        comet_counts = Counter()
        aus_ideals = set()
        comet_ideals = {}
        for h in enumerate_hsat(g):
            kind = classify_quotient(g, h)
            if kind.shape is QuotientShape.COMET:
                comet_counts[kind.period] += 1
                comet_ideals.setdefault(kind.period, set()).add(h.vertices)
            elif kind.shape is QuotientShape.ACYCLIC_UNIQUE_SINK:
                aus_ideals.add(h.vertices)
        cycle_lengths = Counter(c.length for c in maximal_cycles(g))
        assert comet_counts == cycle_lengths
        assert len(aus_ideals) == len(maximal_sinks(g))
        # the explicit correspondence lands exactly on those ideals
        corr = talmax(g)
        assert {h.vertices for _z, h in corr.sink_pairs} == aus_ideals
        by_length = {}
        for c, h in corr.cycle_pairs:
            by_length.setdefault(c.length, set()).add(h.vertices)
        assert by_length == comet_ideals
    assert time.monotonic() - start < 60.0


@criterion(3, "distribute reproduces the hand-checked two-cycle example table")
def test_criterion_03_worked_table(tmp_path, monkeypatch, capsys):
    (tmp_path / "w.graph").write_text(
        "graph W\nvertices: u v w x\nedges:\n e1: u -> v\n e2: v -> u\n e3: v -> w\n")
    (tmp_path / "w.datum").write_text(
        "[isolated x] default=abs\n"
        "[sink w] threshold=1 default=const:1\n"
        "[cycle e1.e2] tuple=(2,3)\n")
    monkeypatch.chdir(tmp_path)
    code = main(["distribute", "w.graph", "--datum", "w.datum", "--lo", "-2"])
    out = capsys.readouterr().out
    assert code == 0
    report = json.loads(out)
    assert report["result"]["flow"] == "valid"
    rows = {(v, i): c for v, i, c in report["result"]["rows"]}
    expected = {
        "u": (4, 2, 3, 2, 3),
        "v": (3, 4, 2, 3, 2),
        "w": (1, 1, 1, 0, 0),
        "x": (2, 1, 0, 1, 2),
    }
    for v, want in expected.items():
        assert tuple(rows[(v, i)] for i in range(-2, 3)) == want


@criterion(4, "periodic values match forward propagation on the comet cycle")
def test_criterion_04_periodicity_oracle():
    g = comet4()
    cyc = maximal_cycles(g)[0]
    values = (1, 2, 3, 4)
    t = 1
    start = {v: values[j] for j, v in enumerate(cyc.vertices)}
    oracle = forward_cycle_rows(cyc, start, t, 21)
    for j, v in enumerate(cyc.vertices):
        for s in range(t, 22):
            assert periodic_value(cyc, t, values, j, s) == oracle[(v, s)]
    # the two spot values: vertex 1 at level 3 and vertex 4 at level 5
    assert periodic_value(cyc, t, values, 0, 3) == 3
    assert periodic_value(cyc, t, values, 3, 5) == 4


@criterion(5, "extract inverts construct on 500 random no-source graphs")
def test_criterion_05_roundtrip():
    rng = random.Random(424242)
    for _ in range(500):
        g = random_no_source_graph(rng, max_v=8)
        datum, lo = random_datum(rng, g, bound=5)
        dist = construct_distribution(g, datum, lo)
        assert extract_datum(dist) == dist.datum
        rebuilt = construct_distribution(g, extract_datum(dist), lo)
        assert rebuilt.values == dist.values
        assert (rebuilt.lo, rebuilt.hi, rebuilt.t) == (dist.lo, dist.hi, dist.t)


@criterion(6, "rows vanish off the maximal cycles; enumeration counts match")
def test_criterion_06_vanishing_and_counts():
    rng = random.Random(606)
    for _ in range(100):
        g = random_no_source_no_sink_graph(rng, max_v=8)
        space = distribution_space(g)
        datum = RepDatum.build(cycles={
            c: tuple(rng.randint(0, 4) for _ in range(c.length))
            for c in space.cycles})
        dist = construct_distribution(g, datum, lo=-3)
        assert validate_flow(dist).ok
        core = maximal_cycle_vertices(g)
        for v in g.vertices:
            if v not in core:
                assert all(x == 0 for x in dist.row(v))
        expected = 1
        for c in space.cycles:
            expected *= 3 ** c.length
        assert space.count(2) == expected
        assert sum(1 for _ in space.enumerate_data(2)) == expected


@criterion(7, "Cuntz-Krieger validation is exact on the loop representations")
def test_criterion_07_ck_validation():
    loop = Graph(["v"], [("e", "v", "v")])
    m = Matrix.from_rows([[1, 1], [0, 1]])
    rho = FiniteRep(loop, {"v": 2}, {"e": m}, {"e": m.inverse()})
    sigma = FiniteRep(loop, {"v": 2}, {"e": Matrix.identity(2)}, {"e": Matrix.identity(2)})
    assert validate_ck(rho).ok
    assert validate_ck(sigma).ok
    bad = Matrix.from_rows([[1, 0], [0, 0]])
    assert not validate_ck(FiniteRep(loop, {"v": 2}, {"e": bad}, {"e": bad})).ok
    rng = random.Random(7007)
    for _ in range(100):
        n = rng.randint(1, 3)
        mat = Matrix.from_rows([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        inv = mat.inverse()
        ghost = rng.choice([inv, mat, mat @ mat, Matrix.identity(n)])
        if ghost is None:
            ghost = mat
        rep = FiniteRep(loop, {"v": n}, {"e": mat}, {"e": ghost})
        assert validate_ck(rep).ok == (inv is not None and ghost == inv)


@criterion(8, "level shifts compose to the identity bit for bit")
def test_criterion_08_shift_coherence():
    g1 = worked()
    d1 = construct_distribution(g1, worked_datum(g1), lo=-2)
    g2 = comet4()
    d2 = construct_distribution(g2, RepDatum.build(cycles={
        maximal_cycles(g2)[0]: (1, 2, 3, 4)}), lo=-2)
    rng = random.Random(8080)
    g3 = random_no_source_graph(rng, max_v=6)
    datum3, lo3 = random_datum(rng, g3)
    d3 = construct_distribution(g3, datum3, lo3)
    for dist in (d1, d2, d3):
        for k in range(-5, 6):
            assert shift_distribution(shift_distribution(dist, k), -k) == dist
    for g in (g1, g2, rose2(), two_loops()):
        w = covering_window(double_graph(g), -2, 3)
        for k in range(-5, 6):
            assert shift_window(shift_window(w, k), -k) == w


@criterion(9, "bounded equality is decisive and matches the rewrite oracle on DAGs")
def test_criterion_09_acyclic_decidability():
    checked = 0
    for n in range(1, 6):
        for g in all_simple_dags(n):
            gens = [TalentedElement.generator(v) for v in g.vertices]
            normal = [sequential_normal_form(e, g) for e in gens]
            for i in range(len(gens)):
                for j in range(i + 1, len(gens)):
                    res = eq_bounded(gens[i], gens[j], g)
                    assert res is not EqResult.UNKNOWN
                    assert (res is EqResult.EQUAL) == (normal[i] == normal[j])
                    checked += 1
            # one composite pair per graph: an element against its expansion
            combo = gens[0] + gens[-1].shifted(1)
            res = eq_bounded(combo, sequential_normal_form(combo, g), g)
            assert res is EqResult.EQUAL
    assert checked > 250000


@criterion(10, "transfer along a matching and back is the identity on data")
def test_criterion_10_transfer():
    rng = random.Random(1010)
    fixtures = [worked(), comet4(), two_loops(), cycle_graph(3), cycle_graph(2)]
    for g in fixtures:
        h = relabel(g, "t_")
        datum, lo = random_datum(rng, g)
        if g.vertices == worked().vertices:
            datum, lo = worked_datum(g), -2
        dist = construct_distribution(g, datum, lo)
        match = candidate_check(g, h)
        assert match.compatible
        moved = transfer(dist, match)
        assert validate_flow(moved).ok
        assert moved.values == {
            ("t_" + v, i): c for (v, i), c in dist.values.items()}
        back = transfer(moved, match.reversed())
        assert back == dist
        assert back.datum == dist.datum
