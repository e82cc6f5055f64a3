import json

import pytest
from click.testing import CliRunner

from oplax3.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_MALFORMED, EXIT_OK, main, run
from oplax3.nerve import Nerve, enumerate_maps
from oplax3.oplax import identity_functor, sup_functor
from oplax3.simplicial import is_simplicial_oplax
from oplax3.strictify import SplitFreeCat


def invoke(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def write(path, doc):
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="module")
def exotic(disks, d3sharp):
    N = Nerve(disks[2])
    fixed = {y: y for k in (0, 1) for y in N.nondegenerate(k)}
    maps = list(enumerate_maps(disks[2], d3sharp, fixed=fixed))
    return next(F for F in maps if not is_simplicial_oplax(F))


def test_oriental_census():
    result = invoke("oriental", "2")
    assert result.exit_code == EXIT_OK
    doc = json.loads(result.output)
    assert doc["census"]["non_identity"] == [3, 4, 1, 0]
    assert doc["unital"] and doc["strongly_loop_free"]


def test_hom_command():
    doc = json.loads(invoke("hom", "2", "0-2", "0-1-2").output)
    assert doc["non_identity"][0] == 1
    assert invoke("hom", "2", "0-9", "0-1-2").exit_code == EXIT_MALFORMED


def test_nerve_and_budget(tmp_path, disks):
    path = write(tmp_path / "d2.json", disks[2].to_json())
    doc = json.loads(invoke("nerve", path, "--dim", "2").output)
    assert doc["nondegenerate"] == 2
    assert invoke("nerve", path, "--dim", "2", "--budget", "1").exit_code == EXIT_BUDGET


def test_validate_oplax(tmp_path, orientals3):
    path = write(tmp_path / "sup.json", sup_functor(orientals3[2], 3).to_json())
    result = invoke("validate-oplax", path)
    assert result.exit_code == EXIT_OK
    assert json.loads(result.output)["verdict"] == "pass"


def test_check_simplicial_rejects_the_exotic_map(tmp_path, exotic):
    src = write(tmp_path / "a.json", exotic.source.to_json())
    tgt = write(tmp_path / "b.json", exotic.target.to_json())
    m = write(tmp_path / "m.json", exotic.to_json())
    result = invoke("check-simplicial", src, tgt, m)
    assert result.exit_code == EXIT_FAIL
    cert = json.loads(result.output)
    assert cert["verdict"] == "fail"
    first = [v for v in cert["violations"] if v["condition"] == 1]
    assert first and first[0]["witness"] == ["alpha"]


def test_round_trip_through_the_cli(tmp_path, orientals3):
    functor = sup_functor(orientals3[2], 3)
    path = write(tmp_path / "f.json", functor.to_json())
    mapped = invoke("to-simplicial", path)
    assert mapped.exit_code == EXIT_OK
    back_path = tmp_path / "map.json"
    back_path.write_text(mapped.output, encoding="utf-8")
    back = invoke("to-cellular", str(back_path))
    assert back.exit_code == EXIT_OK
    assert json.loads(back.output) == json.loads(json.dumps(functor.to_json()))


def test_to_cellular_refuses_the_exotic_map(tmp_path, exotic):
    doc = {"source": exotic.source.to_json(), "target": exotic.target.to_json(), "map": exotic.to_json()}
    assert invoke("to-cellular", write(tmp_path / "m.json", doc)).exit_code == EXIT_FAIL


def test_compose_oplax(tmp_path, orientals3):
    F = sup_functor(orientals3[2], 3)
    f = write(tmp_path / "f.json", F.to_json())
    g = write(tmp_path / "g.json", identity_functor(orientals3[2]).to_json())
    out = tmp_path / "out"
    assert invoke("--out", str(out), "compose-oplax", g, f).exit_code == EXIT_OK
    assert json.loads((out / "composite.json").read_text()) == json.loads(json.dumps(F.to_json()))
    assert json.loads((out / "certificate.json").read_text())["verdict"] == "pass"
    # the target of f is not the source of f
    assert run(["compose-oplax", f, f]) == EXIT_MALFORMED


def test_strictify_writes_files(tmp_path):
    path = write(tmp_path / "p.json", {"elements": ["0", "1", "2"], "less": [["0", "1"], ["1", "2"]]})
    out = tmp_path / "out"
    result = invoke("--out", str(out), "strictify", path)
    assert result.exit_code == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["eta.json", "strictification.json"]
    cat = json.loads((out / "strictification.json").read_text())
    assert "(12,01)" in cat["cells"][1]


def test_strictify_input_errors(tmp_path):
    doc = SplitFreeCat.chain(1).to_json()
    assert invoke("strictify", write(tmp_path / "p.json", doc)).exit_code == EXIT_OK
    doc["composite"] = doc["composite"][:-1]
    assert run(["strictify", write(tmp_path / "q.json", doc)]) == EXIT_MALFORMED
    assert run(["strictify", str(tmp_path / "missing.json")]) == EXIT_MALFORMED


@pytest.mark.parametrize("content", ["{", "[]", '{"cells": 3}', "null"])
def test_malformed_inputs(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content, encoding="utf-8")
    assert run(["validate-oplax", str(path)]) == EXIT_MALFORMED
    assert run(["nerve", str(path)]) == EXIT_MALFORMED


def test_output_is_deterministic(tmp_path, disks):
    path = write(tmp_path / "d3.json", disks[3].to_json())
    first = invoke("nerve", path, "--dim", "3").output
    second = invoke("nerve", path, "--dim", "3").output
    assert first == second
    assert invoke("oriental", "3").output == invoke("oriental", "3").output
