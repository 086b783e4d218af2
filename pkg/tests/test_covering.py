"""Double graphs, Cuntz-Krieger relation sets, covering windows, lifts."""

import random

import pytest

from gqw import (
    Graph,
    GraphError,
    Path,
    ck_relations,
    covering_window,
    double_graph,
    is_acyclic,
    lift_path,
    lift_relations,
    lift_window,
    shift_window,
)
from gqw.covering import dot_double_graph, dot_window

from _fixtures import comet4, display_g, random_graph


def loop_graph():
    return Graph(["v"], [("e", "v", "v")])


def test_double_graph_single_loop():
    dg = double_graph(loop_graph())
    assert [e.id for e in dg.graph.edges] == ["e", "e*"]
    assert all(e.src == "v" and e.dst == "v" for e in dg.graph.edges)


def test_double_graph_reverses_ghosts():
    dg = double_graph(Graph(["a", "b"], [("e", "a", "b")]))
    ghost = dg.graph.edge("e*")
    assert (ghost.src, ghost.dst) == ("b", "a")
    assert dg.weight("e") == 1 and dg.weight("e*") == -1


def test_double_graph_edge_count():
    g = comet4()
    dg = double_graph(g)
    assert len(dg.graph.edges) == 2 * len(g.edges)


def test_double_graph_id_collision():
    with pytest.raises(GraphError):
        double_graph(Graph(["a"], [("e", "a", "a"), ("e*", "a", "a")]))


def test_ck_relations_single_loop():
    rel = ck_relations(loop_graph())
    assert [str(p) for p in rel.pairs] == ["e*.e = v"]
    assert [str(s) for s in rel.sums] == ["e.e* = v"]


def test_ck_relations_sink_only():
    rel = ck_relations(display_g().without_vertices(["a"]))
    assert rel.pairs == () and rel.sums == ()


def test_ck_relations_two_edges():
    rel = ck_relations(display_g())
    # pairs (e1,e1), (e1,e2), (e2,e1), (e2,e2); one sum at the regular vertex
    assert len(rel.pairs) == 4
    assert sum(1 for p in rel.pairs if p.is_diagonal) == 2
    assert [s.vertex for s in rel.sums] == ["a"]


def test_covering_window_single_loop():
    w = covering_window(double_graph(loop_graph()), 0, 1)
    assert [str(v) for v in w.vertices] == ["v@0", "v@1"]
    assert [(str(e), str(e.src), str(e.dst)) for e in w.edges] == [
        ("e@1", "v@0", "v@1"), ("e*@1", "v@1", "v@0")]


def test_covering_window_empty_base():
    w = covering_window(double_graph(Graph([], [])), 0, 3)
    assert w.vertices == () and w.edges == ()


def test_covering_window_single_level():
    w = covering_window(double_graph(Graph(["a", "b"], [("e", "a", "b")])), 0, 0)
    assert [str(v) for v in w.vertices] == ["a@0", "b@0"]
    assert w.edges == ()
    assert ("e", 0) in w.boundary and ("e", 1) in w.boundary


def test_covering_window_bad_bounds():
    with pytest.raises(GraphError):
        covering_window(double_graph(loop_graph()), 2, 1)


def test_window_levels_follow_weights():
    rng = random.Random(3)
    for _ in range(20):
        dg = double_graph(random_graph(rng, max_v=4, max_e=6))
        w = covering_window(dg, -2, 3)
        for we in w.edges:
            delta = we.dst.level - we.src.level
            assert delta == dg.weight(we.edge.id)
            assert w.lo <= we.src.level <= w.hi
            assert w.lo <= we.dst.level <= w.hi


def test_window_restriction_consistency():
    rng = random.Random(9)
    for _ in range(20):
        dg = double_graph(random_graph(rng, max_v=4, max_e=6))
        w = covering_window(dg, -3, 4)
        assert w.restrict(-1, 2) == covering_window(dg, -1, 2)


def test_all_real_window_is_acyclic():
    # with every weight +1, levels strictly increase along window paths
    g = comet4()
    w = lift_window(g, {e.id: 1 for e in g.edges}, 0, 6)
    assert is_acyclic(w.as_graph())


def test_lift_path_single_real_edge():
    dg = double_graph(Graph(["a", "b"], [("e", "a", "b")]))
    lp = lift_path(dg, Path((dg.graph.edge("e"),)), 0)
    assert [(e.id, i) for e, i in lp.steps] == [("e", 0)]
    assert (lp.start_level, lp.end_level) == (-1, 0)


def test_lift_path_loop_round_trip():
    dg = double_graph(loop_graph())
    p = Path((dg.graph.edge("e"), dg.graph.edge("e*")))
    lp = lift_path(dg, p, 1)
    assert [(e.id, i) for e, i in lp.steps] == [("e", 1), ("e*", 1)]
    assert (lp.start_level, lp.end_level) == (0, 0)


def test_lift_path_cycle_climbs_its_length():
    g = comet4()
    dg = double_graph(g)
    cyc = Path(tuple(g.edge(eid) for eid in ("c1", "c2", "c3", "c4")))
    lp = lift_path(dg, cyc, 2)
    assert lp.end_level - lp.start_level == 4
    weightsum = sum(dg.weight(e.id) for e, _ in lp.steps)
    assert lp.end_level == lp.start_level + weightsum


def test_lift_path_rejects_foreign_edges():
    dg = double_graph(loop_graph())
    other = Graph(["x"], [("z", "x", "x")])
    with pytest.raises(GraphError):
        lift_path(dg, Path((other.edge("z"),)), 0)


def test_lift_relations_single_loop():
    rels = lift_relations(ck_relations(loop_graph()), 0, 1)
    assert [str(p) for p in rels.pairs] == ["e*@1.e@1 = v@1"]
    assert [str(s) for s in rels.sums] == ["e@1.e*@1 = v@0"]
    assert rels.note is None


def test_lift_relations_empty_set():
    rels = lift_relations(ck_relations(Graph(["v"])), 0, 1)
    assert rels.pairs == () and rels.sums == () and rels.note is None


def test_lift_relations_window_too_small():
    rels = lift_relations(ck_relations(loop_graph()), 0, 0)
    assert rels.pairs == () and rels.sums == ()
    assert rels.note is not None


def test_lift_relations_counts_scale_with_window():
    rel = ck_relations(comet4())
    lo, hi = -2, 5
    rels = lift_relations(rel, lo, hi)
    assert len(rels.pairs) == len(rel.pairs) * (hi - lo)
    assert len(rels.sums) == len(rel.sums) * (hi - lo)


def test_shift_window_identity():
    w = covering_window(double_graph(loop_graph()), 0, 1)
    assert shift_window(w, 0) == w


def test_shift_window_relabels():
    w = covering_window(double_graph(loop_graph()), 0, 1)
    s = shift_window(w, 2)
    assert (s.lo, s.hi) == (-2, -1)
    assert len(s.vertices) == len(w.vertices)
    assert len(s.edges) == len(w.edges)


def test_shift_window_round_trip_bit_exact():
    rng = random.Random(12)
    for _ in range(15):
        dg = double_graph(random_graph(rng, max_v=4, max_e=6))
        w = covering_window(dg, rng.randint(-3, 0), rng.randint(1, 4))
        for k in range(-5, 6):
            assert shift_window(shift_window(w, k), -k) == w


def test_dot_exports():
    dg = double_graph(loop_graph())
    dd = dot_double_graph(dg)
    assert "style=dashed" in dd and '"v"' in dd
    w = covering_window(dg, 0, 1)
    dw = dot_window(w)
    assert '"v@0"' in dw and '"v@1"' in dw and "style=dashed" in dw
