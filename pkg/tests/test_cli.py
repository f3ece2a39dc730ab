import json

from treecore.cli import main
from conftest import SESSIONS

TORUS = str(SESSIONS / "punctured_torus.json")
F2 = str(SESSIONS / "f2_free_product.json")
F3 = str(SESSIONS / "f3_collapse.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def fields(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_validate_ok(capsys):
    for f in (TORUS, F2, F3):
        code, out, _ = run(capsys, "validate", f)
        assert code == 0 and "ASSERTED" in out


def test_validate_failure_names_generator(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rank": 2, "splittings": {
        "X": {"kind": "amalgam", "A": ["a"], "B": ["b"], "C": ["b"]}}}))
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and "offending: b" in out


def test_malformed_and_unknown_fields(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", str(bad))[0] == 2
    bad.write_text(json.dumps({"rank": 2, "splittings": {}, "colour": 1}))
    assert run(capsys, "validate", str(bad))[0] == 2
    bad.write_text(json.dumps({"rank": 2, "splittings": {
        "X": {"kind": "amalgam", "A": ["a"], "B": ["b"], "C": [], "D": []}}}))
    assert run(capsys, "validate", str(bad))[0] == 2
    assert run(capsys, "core", TORUS, "Ta", "Nope")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_core_self_pair(capsys):
    code, out, _ = run(capsys, "core", F2, "F", "F")
    f = fields(out)
    assert code == 0
    assert f["status"] == "EXACT" and f["i"] == "0" and f["compatible"] == "TRUE"
    assert f["connected"] == "False" and int(f["twice_light"]) > 0


def test_core_torus_and_artifacts(tmp_path, capsys):
    js, dot = tmp_path / "core.json", tmp_path / "core.dot"
    code, out, _ = run(capsys, "core", TORUS, "Ta", "Tb", "--emit-json", str(js),
                       "--emit-dot", str(dot))
    f = fields(out)
    assert code == 0 and f["i"] == "1" and f["si1"] == "1" and f["si2"] == "1"
    data = json.loads(js.read_text())
    assert data["schema"] == "treecore/1" and data["counts"]["lower"] == [1, 2, 1]
    assert dot.read_text().startswith("graph")


def test_core_f3(capsys):
    f = fields(run(capsys, "core", F3, "S1", "S2")[1])
    assert f["i"] == "0" and f["compatible"] == "TRUE" and f["connected"] == "True"


def test_budget_zero_is_never_exact_without_assertions(capsys):
    for f, a, b in [(F2, "F", "F"), (F3, "S1", "S2")]:
        out = fields(run(capsys, "core", f, a, b, "--budget", "0")[1])
        assert out["status"] == "BOUNDS"


def test_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("TREECORE_BUDGET", "0")
    out = fields(run(capsys, "core", F2, "F", "F")[1])
    assert out["status"] == "BOUNDS"


def test_si(capsys):
    code, out, _ = run(capsys, "si", TORUS, "Ta", "Tb")
    assert code == 0 and fields(out) == {"si1": "1", "si2": "1"}


def test_crossing(capsys):
    code, out, _ = run(capsys, "crossing", TORUS, "Ta", "Tb", "1", "1")
    assert code == 0 and out.splitlines()[0] == "TRUE"
    code, out, _ = run(capsys, "crossing", F2, "F", "F", "1", "b")
    assert code == 0 and out.splitlines()[0] == "FALSE"
    assert run(capsys, "crossing", TORUS, "Ta", "Tb", "1", "x!")[0] == 1


def test_linecore(tmp_path, capsys):
    code, out, _ = run(capsys, "linecore", "[[1,0,2],[0,1,1]]")
    assert code == 0 and json.loads(out) == {"status": "NONEMPTY", "index": 1}
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"matrix": [[2, 0], [0, 3]]}))
    assert json.loads(run(capsys, "linecore", str(m))[1]) == {"status": "NONEMPTY", "index": 6}
    assert json.loads(run(capsys, "linecore", "[[1,0],[-2,0]]")[1])["status"] == "EMPTY"
    assert run(capsys, "linecore", "[[0,0],[1,1]]")[0] == 1
    assert run(capsys, "linecore", "[[1,0],[0")[0] == 2


def test_crosscheck_clean_and_mutated(tmp_path, capsys):
    js = tmp_path / "core.json"
    run(capsys, "core", TORUS, "Ta", "Tb", "--emit-json", str(js))
    code, out, _ = run(capsys, "crosscheck", TORUS, "Ta", "Tb", "--core", str(js))
    assert code == 0 and "FAIL" not in out
    data = json.loads(js.read_text())
    data["upper"]["squares"] = []
    mut = tmp_path / "mut.json"
    mut.write_text(json.dumps(data))
    code, out, _ = run(capsys, "crosscheck", TORUS, "Ta", "Tb", "--core", str(mut))
    assert code == 4 and "FAIL" in out


def test_round_trip_reproduces_keys(tmp_path, capsys):
    from treecore import corecomplex as CC
    from treecore.cli import load_session
    js = tmp_path / "core.json"
    run(capsys, "core", TORUS, "Ta", "Tb", "--emit-json", str(js))
    data = json.loads(js.read_text())
    core = CC.from_json(data)
    s = load_session(TORUS).splittings
    fresh = CC.compute_core(s["Ta"], s["Tb"])
    assert core.lower.cells == fresh.lower.cells
    assert CC.to_json(core)["lower"] == data["lower"]
