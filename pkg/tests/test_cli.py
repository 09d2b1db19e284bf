import io
import json
from fractions import Fraction

import pytest

from bnck import cli
from bnck import documents as dc


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def exported(tmp_path):
    code, _ = run("catalog", "--export", str(tmp_path))
    assert code == 0
    return tmp_path


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_catalog_verify_json():
    code, text = run("catalog", "--verify", "--json")
    assert code == 0
    rows = {r["name"]: r for r in json.loads(text)}
    assert rows["DIM3-ISO11"]["admissible"] is False
    assert all(r["verdict"] == "pass" for r in rows.values() if r["admissible"])


def test_exports_round_trip_and_pass(exported):
    files = sorted(exported.glob("*.json"))
    assert len(files) == 6
    for f in files:
        data = json.loads(f.read_text())
        d = dc.load(str(f), strict=True)
        again = dc.serialize(d.algebroid, d.structure, d.metric)
        assert all(again[k] == data[k] for k in again)
        code, text = run("check-kahler", str(f), "--json")
        assert code == 0
        rep = json.loads(text)
        assert rep["verdict"] == "pass"
        assert any(c["label"] == "direct and component verdicts agree" for c in rep["checks"])


@pytest.mark.parametrize("via", ["direct", "components"])
def test_check_kahler_routes(exported, via):
    code, text = run("check-kahler", str(exported / "DIM4-ADAPTED.json"), "--via", via)
    assert code == 0 and "verdict: pass" in text


def test_check_kahler_failure_exit_code(exported, tmp_path):
    data = json.loads((exported / "DIM3-ISO2.json").read_text())
    data["F"] = [{"i": 2, "j": 3, "c": "1"}]
    code, text = run("check-kahler", write(tmp_path, "bad.json", data))
    assert code == 1 and "verdict: fail" in text


def test_check_axioms(exported):
    code, text = run("check-axioms", str(exported / "DIM3-RxSOL2.json"))
    assert code == 0 and "verdict: pass (axioms)" in text


def test_levi_civita(exported):
    code, text = run("levi-civita", str(exported / "DIM3-ISO2.json"), "--json")
    assert code == 0
    out = json.loads(text)
    assert out["report"]["verdict"] == "pass" and out["christoffel"]


def test_rescale_commands(exported, tmp_path):
    code, text = run("rescale", str(exported / "DIM3-ISO2.json"), "--lambda", "3/2")
    assert code == 0
    path = write(tmp_path, "scaled.json", json.loads(text))
    assert run("check-kahler", path)[0] == 0
    code, text = run("rescale", str(exported / "DIM4-ADAPTED.json"), "--to-unit")
    assert code == 0
    assert json.loads(text)["structure"]["c_plus"] == "0"
    assert run("rescale", str(exported / "DIM4-ADAPTED.json"))[0] == 2
    assert run("rescale", str(exported / "DIM3-ISO2.json"), "--to-unit")[0] == 2


def test_input_errors_exit_2(tmp_path, capsys):
    assert run("check-axioms", str(tmp_path / "missing.json"))[0] == 2
    bad = write(tmp_path, "bad.json", {"lie_algebra": {"dimension": 2, "structure_constants": [
        {"i": 1, "j": 3, "k": 1, "c": "1"}]}})
    assert run("check-axioms", bad)[0] == 2
    assert "lie_algebra.structure_constants[0].j" in capsys.readouterr().err
    no_structure = write(tmp_path, "plain.json", {"lie_algebra": {"dimension": 2, "structure_constants": []}})
    assert run("check-kahler", no_structure)[0] == 2
    assert run("levi-civita", no_structure)[0] == 2


def test_strict_flag(tmp_path):
    path = write(tmp_path, "h.json", {"lie_algebra": {"dimension": 3, "structure_constants": [
        {"i": 1, "j": 2, "k": 3, "c": "1"}, {"i": 2, "j": 1, "k": 3, "c": "0"}]}})
    assert run("check-axioms", path)[0] == 0
    assert run("check-axioms", "--strict", path)[0] == 2


def test_usage_errors():
    assert run()[0] == 2
    assert run("bogus")[0] == 2
    assert run("search", "dim3-unimodular", "--grid", "a,b")[0] == 2
    assert run("search", "dim4-adapted", "--c-plus", "1")[0] == 2
    assert run("search", "dim4-adapted", "--eps", "1,2")[0] == 2


def test_search_dim3_small_grid():
    code, text = run("search", "dim3-unimodular", "--grid", "0,1", "--json")
    assert code == 0
    results = json.loads(text)
    assert results and all(r["report"]["verdict"] == "pass" for r in results)
    assert {"parameters", "class", "extendable", "report"} <= set(results[0])


def test_search_dim4_small():
    code, text = run("search", "dim4-adapted", "--per-class", "1", "--json")
    assert code == 0
    results = json.loads(text)
    assert {r["class"] for r in results} == set(range(1, 9))


def test_parse_grid():
    assert cli.parse_grid("-1..1,1/2", []) == [-1, 0, Fraction(1, 2), 1]


def test_numeric_env(exported, monkeypatch):
    monkeypatch.setenv("BNCK_MODE", "numeric")
    code, text = run("check-kahler", str(exported / "DIM2-ABELIAN.json"))
    assert code == 0

