"""CLI surface: grammar, workspace round-trips, exit codes, dot export."""

import json
import os

import pytest

from ssetlift.cli import Workspace, evaluate_expression, export_dot, main
from ssetlift.kernel import (
    UsageError,
    make_boundary,
    make_delta,
    make_J,
    nerve,
    poset_category,
)
from ssetlift.serialize import category_to_jsonable


@pytest.fixture()
def ws(tmp_path):
    return Workspace(str(tmp_path / "objects"))


def run(tmp_path, *argv):
    return main(["--workspace", str(tmp_path / "objects"), *argv])


# -- grammar -------------------------------------------------------------------


def test_expression_atoms(ws):
    assert evaluate_expression("delta(2)", ws, 3).payload == make_delta(2, 3)
    assert evaluate_expression("boundary(2)", ws, 3).payload == make_boundary(2, 3)
    assert evaluate_expression("J", ws, 3).payload == make_J(3)


def test_expression_nesting_and_vertex_sets(ws):
    v = evaluate_expression("widen(delta(2), {2})", ws, 3)
    assert v.kind == "inclusion"
    assert len(v.payload.domain.simplices_at(0)) == 4
    v2 = evaluate_expression("fullsub(delta(2), {0, 2})", ws, 3)
    assert len(v2.payload.domain.simplices_at(0)) == 2
    v3 = evaluate_expression("pushout_product(skeleton(delta(1), 0), isohorn(1,0))", ws, 3)
    assert v3.kind == "inclusion"


def test_expression_errors(ws):
    for expr in ("mystery(1)", "delta(2", "delta(2))", "widen(delta(1), {7})",
                 "product(delta(1), isohorn(1,0))", "delta(x)"):
        with pytest.raises(UsageError):
            evaluate_expression(expr, ws, 3)


def test_expression_workspace_reference(ws):
    ws.save("base", evaluate_expression("delta(1)", ws, 3))
    v = evaluate_expression("product(base, base)", ws, 3)
    assert len(v.payload.simplices_at(0)) == 4


# -- workspace -----------------------------------------------------------------


def test_workspace_round_trip_is_byte_identical(ws):
    value = evaluate_expression("widen(delta(2), {2})", ws, 3)
    ws.save("w2", value)
    first = open(ws.path("w2")).read()
    loaded = ws.load("w2")
    ws.save("w2", loaded, force=True)
    second = open(ws.path("w2")).read()
    assert first == second


def test_workspace_refuses_duplicates_and_bad_names(ws):
    value = evaluate_expression("delta(0)", ws, 2)
    ws.save("pt", value)
    with pytest.raises(UsageError):
        ws.save("pt", value)
    ws.save("pt", value, force=True)
    with pytest.raises(UsageError):
        ws.path("../escape")


def test_workspace_rejects_corrupted_object(ws):
    value = evaluate_expression("delta(1)", ws, 2)
    ws.save("d1", value)
    doc = json.load(open(ws.path("d1")))
    doc["object"]["face"]["1:0"][0][1] = [1]
    with open(ws.path("d1"), "w") as fh:
        json.dump(doc, fh)
    with pytest.raises(UsageError):
        ws.load("d1")


# -- commands ------------------------------------------------------------------


def test_build_and_check_exit_codes(tmp_path, capsys):
    assert run(tmp_path, "build", "delta(0)", "--name", "pt", "--dim", "2") == 0
    assert run(tmp_path, "check", "pt", "--family", "iso_horns",
               "--max-horn", "2") == 0
    assert run(tmp_path, "build", "isohorn(2,0)", "--name", "v02",
               "--dim", "4") == 0
    assert run(tmp_path, "check", "v02", "--family", "iso_horns",
               "--max-horn", "2") == 1
    out = capsys.readouterr().out
    assert "witness file" in out
    # missing object name: usage error
    assert run(tmp_path, "check", "nope", "--max-horn", "2") == 2


def test_check_writes_replayable_witness(tmp_path):
    run(tmp_path, "build", "isohorn(2,0)", "--name", "v02", "--dim", "4")
    out = tmp_path / "report.json"
    assert run(tmp_path, "check", "v02", "--family", "iso_horns",
               "--max-horn", "2", "--out", str(out)) == 1
    doc = json.loads(out.read_text())
    failing = [v for v in doc["verdicts"] if v["verdict"] == "fail"]
    assert failing
    from ssetlift.serialize import map_from_jsonable
    from ssetlift.lifting import LiftingProblem, solve_lift, NO_LIFT
    w = failing[0]["witness"]
    problem = LiftingProblem(map_from_jsonable(w["left"]),
                             map_from_jsonable(w["right"]),
                             map_from_jsonable(w["top"]),
                             map_from_jsonable(w["bottom"]))
    problem.validate()
    assert solve_lift(problem) is NO_LIFT


def test_decompose_command(tmp_path, capsys):
    assert run(tmp_path, "build", "skeleton(delta(1), 0)", "--name", "b1",
               "--dim", "4") == 0
    assert run(tmp_path, "decompose", "b1", "--vertex", "0") == 0
    out = capsys.readouterr().out
    assert "N_1 = 1" in out
    # non-narrow vertex is refused with exit 1
    assert run(tmp_path, "build", "fullsub(J, {(0,)})", "--name", "j0",
               "--dim", "3") == 0
    assert run(tmp_path, "decompose", "j0", "--vertex", "(0,)") == 1


def test_verify_command(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suite", "sec5", "--dim", "3") == 0
    out = capsys.readouterr().out
    assert "suite sec5: pass" in out


def test_nerve_from_file(tmp_path):
    cat = tmp_path / "poset2.json"
    cat.write_text(json.dumps(category_to_jsonable(poset_category(2))))
    assert run(tmp_path, "build", f"nerve({cat})", "--name", "n2",
               "--dim", "3") == 0
    ws = Workspace(str(tmp_path / "objects"))
    X = ws.load("n2").payload
    assert X == nerve(poset_category(2), 3)


# -- dot export -----------------------------------------------------------------


def test_export_dot_widening_picture(tmp_path):
    run(tmp_path, "build", "widen(delta(2), {2})", "--name", "w2", "--dim", "4")
    out = tmp_path / "w2.dot"
    assert run(tmp_path, "export-dot", "w2", "--out", str(out)) == 0
    text = out.read_text()
    nodes = [l for l in text.splitlines()
             if l.strip().endswith('";') and "->" not in l]
    edges = [l for l in text.splitlines() if "->" in l]
    marked = [l for l in edges if "color=blue" in l]
    assert len(nodes) == 4
    assert len(edges) == 7
    assert len(marked) == 2  # one iso pair


def test_export_dot_point_and_J():
    assert export_dot(make_delta(0, 2)).count("->") == 0
    text = export_dot(make_J(2))
    edges = [l for l in text.splitlines() if "->" in l]
    assert len(edges) == 2
    assert all("color=blue" in l for l in edges)  # a single iso pair


def test_export_dot_deterministic(tmp_path):
    X = make_J(3)
    assert export_dot(X) == export_dot(make_J(3))
