"""Command surface: reports, exit codes, golden files, DOT side outputs."""

import json
import os
from pathlib import Path

import pytest

from gqw import parse_graph, signature
from gqw.cli import main

GOLDEN = Path(__file__).parent / "golden"

E_TEXT = ("graph E\nvertices: a b c\nedges:\n e1: a -> b\n e2: a -> c\n"
          " e3: b -> b\n e4: c -> c\n")
F_TEXT = "graph F\nvertices: a b c\nedges:\n e1: a -> b\n e2: a -> c\n e3: b -> b\n"
G_TEXT = "graph G\nvertices: a b c\nedges:\n e1: a -> b\n e2: a -> c\n"
WORKED_TEXT = ("graph W\nvertices: u v w x\nedges:\n e1: u -> v\n e2: v -> u\n"
               " e3: v -> w\n")
WORKED_DATUM = ("[isolated x] default=abs\n"
                "[sink w] threshold=1 default=const:1\n"
                "[cycle e1.e2] tuple=(2,3)\n")
LOOP_TEXT = "graph L\nvertices: v\nedges:\n e: v -> v\n"
RHO_REP = ("rep\ndim v 2\n"
           "edge e 2 2 1/1 1/1 0/1 1/1\n"
           "ghost e 2 2 1/1 -1/1 0/1 1/1\n")
BAD_REP = ("rep\ndim v 2\n"
           "edge e 2 2 1/1 0/1 0/1 0/1\n"
           "ghost e 2 2 1/1 0/1 0/1 0/1\n")


@pytest.fixture
def sandbox(tmp_path, monkeypatch):
    files = {
        "e.graph": E_TEXT, "f.graph": F_TEXT, "g.graph": G_TEXT,
        "w.graph": WORKED_TEXT, "w.datum": WORKED_DATUM,
        "loop.graph": LOOP_TEXT, "rho.rep": RHO_REP, "bad.rep": BAD_REP,
    }
    for name, text in files.items():
        (tmp_path / name).write_text(text)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, (json.loads(out) if out else None)


def check_golden(name: str, out: str):
    expected = (GOLDEN / name).read_text()
    assert out == expected


def test_signature_golden(sandbox, capsys):
    code, out = run(capsys, "signature", "f.graph")
    assert code == 0
    check_golden("signature_f.json", out)


def test_compare_golden(sandbox, capsys):
    code, out = run(capsys, "compare", "e.graph", "f.graph")
    assert code == 0
    check_golden("compare_e_f.json", out)


def test_ideals_golden(sandbox, capsys):
    code, out = run(capsys, "ideals", "f.graph")
    assert code == 0
    check_golden("ideals_f.json", out)


def test_compare_self_identity_matching(sandbox, capsys):
    code, report = run_json(capsys, "compare", "f.graph", "f.graph")
    assert code == 0
    res = report["result"]
    assert res["compatible"] is True
    assert res["cycle_matching"] == [["e3", "e3"]]
    assert res["sink_matching"] == [["c", "c"]]


def test_signature_is_thin_wrapper(sandbox, capsys):
    code, report = run_json(capsys, "signature", "e.graph")
    assert code == 0
    sig = signature(parse_graph(E_TEXT).graph)
    assert report["result"]["cycle_lengths"] == list(sig.cycle_lengths)
    assert report["result"]["sink_count"] == sig.sink_count


def test_analyze_report_and_dot(sandbox, capsys):
    code, report = run_json(capsys, "analyze", "f.graph", "--dot", "f.dot")
    assert code == 0
    res = report["result"]
    assert res["vertex_classes"]["sinks"] == ["c"]
    assert res["maximal_cycles"] == ["e3"]
    assert res["maximal_sinks"] == ["c"]
    assert os.path.exists("f.dot")
    assert '"a" -> "b"' in Path("f.dot").read_text()


def test_cover_report(sandbox, capsys):
    code, report = run_json(capsys, "cover", "loop.graph", "--lo", "0", "--hi", "1",
                            "--dot", "win.dot", "--double-dot", "dbl.dot")
    assert code == 0
    res = report["result"]
    assert res["vertices"] == ["v@0", "v@1"]
    assert res["relations"]["pairs"] == ["e*@1.e@1 = v@1"]
    assert res["relations"]["sums"] == ["e@1.e*@1 = v@0"]
    assert os.path.exists("win.dot") and os.path.exists("dbl.dot")


def test_distribute_worked_example(sandbox, capsys):
    code, report = run_json(capsys, "distribute", "w.graph",
                            "--datum", "w.datum", "--lo", "-2", "--out", "w.dist")
    assert code == 0
    res = report["result"]
    assert res["flow"] == "valid"
    assert res["threshold"] == 1
    rows = {(v, i): c for v, i, c in res["rows"]}
    for v, want in (("u", (4, 2, 3, 2, 3)), ("v", (3, 4, 2, 3, 2)),
                    ("w", (1, 1, 1, 0, 0)), ("x", (2, 1, 0, 1, 2))):
        assert tuple(rows[(v, i)] for i in range(-2, 3)) == want
    assert os.path.exists("w.dist")


def test_extract_inverts_distribute(sandbox, capsys):
    code, _ = run_json(capsys, "distribute", "w.graph",
                       "--datum", "w.datum", "--lo", "-2", "--out", "w.dist")
    assert code == 0
    code, report = run_json(capsys, "extract", "w.graph", "--dist", "w.dist")
    assert code == 0
    res = report["result"]
    assert res["flow"] == "valid"
    assert res["datum"]["cycles"] == [{"cycle": "e1.e2", "tuple": [2, 3]}]
    assert res["datum"]["sinks"][0]["threshold"] == 1


def test_shift_round_trip(sandbox, capsys):
    run_json(capsys, "distribute", "w.graph", "--datum", "w.datum",
             "--lo", "-2", "--out", "w.dist")
    code, once = run_json(capsys, "shift", "w.graph", "--dist", "w.dist",
                          "--k", "2", "--out", "w2.dist")
    assert code == 0
    assert once["result"]["window"] == [-4, 2]
    code, back = run_json(capsys, "shift", "w.graph", "--dist", "w2.dist", "--k", "-2")
    assert code == 0
    code, orig = run_json(capsys, "shift", "w.graph", "--dist", "w.dist", "--k", "0")
    assert code == 0
    assert back["result"]["rows"] == orig["result"]["rows"]
    assert back["result"]["window"] == orig["result"]["window"]


def test_transfer_between_relabeled_copies(sandbox, capsys):
    Path("w2.graph").write_text(
        "graph W2\nvertices: p q r s\nedges:\n f1: p -> q\n f2: q -> p\n"
        " f3: q -> r\n")
    code, report = run_json(capsys, "transfer", "w.graph", "w2.graph",
                            "--datum", "w.datum", "--lo", "-2")
    assert code == 0
    res = report["result"]
    assert res["flow"] == "valid"
    assert res["variant"] == "sinks-allowed"
    rows = {(v, i): c for v, i, c in res["rows"]}
    assert tuple(rows[("p", i)] for i in range(-2, 3)) == (4, 2, 3, 2, 3)


def test_validate_rep_valid(sandbox, capsys):
    code, report = run_json(capsys, "validate-rep", "loop.graph", "--rep", "rho.rep")
    assert code == 0
    assert report["result"]["valid"] is True
    assert report["result"]["shape"]["conformant"] is True


def test_validate_rep_violation_exit_code(sandbox, capsys):
    code, report = run_json(capsys, "validate-rep", "loop.graph", "--rep", "bad.rep")
    assert code == 4
    assert report["result"]["valid"] is False
    assert report["result"]["violation"]["relation"] == "e*.e"


def test_enumerate_dist_counts(sandbox, capsys):
    Path("loops2.graph").write_text(
        "graph T\nvertices: u v\nedges:\n e1: u -> u\n e2: v -> v\n")
    code, report = run_json(capsys, "enumerate-dist", "loops2.graph", "--bound", "1")
    assert code == 0
    res = report["result"]
    assert res["count"] == 4
    assert len(res["data"]) == 4


def test_extract_flow_violation_exit_code(sandbox, capsys):
    run_json(capsys, "distribute", "w.graph", "--datum", "w.datum",
             "--lo", "-2", "--out", "w.dist")
    table = Path("w.dist").read_text().replace("row u 0 3", "row u 0 9")
    Path("broken.dist").write_text(table)
    code, report = run_json(capsys, "extract", "w.graph", "--dist", "broken.dist")
    assert code == 4
    assert report["result"]["flow"] == "violation"
    assert report["result"]["violation"]["vertex"] == "u"


def test_exit_code_parse_error(sandbox, capsys):
    Path("broken.graph").write_text("vertices a\n")
    code, out = run(capsys, "signature", "broken.graph")
    assert code == 2 and out == ""


def test_exit_code_precondition(sandbox, capsys):
    Path("e.datum").write_text("")
    code, _ = run(capsys, "distribute", "e.graph", "--datum", "e.datum", "--lo", "0")
    assert code == 3


def test_exit_code_cap(sandbox, capsys, monkeypatch):
    monkeypatch.setenv("GQW_MAX_VERTICES", "2")
    code, _ = run(capsys, "ideals", "f.graph")
    assert code == 5


def test_env_cap_override_allows_larger(sandbox, capsys, monkeypatch):
    monkeypatch.setenv("GQW_MAX_VERTICES", "3")
    code, report = run_json(capsys, "ideals", "f.graph")
    assert code == 0
    assert len(report["result"]["ideals"]) == 4


def test_missing_file_is_parse_error(sandbox, capsys):
    code, _ = run(capsys, "signature", "nope.graph")
    assert code == 2
