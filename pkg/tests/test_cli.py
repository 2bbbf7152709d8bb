import json
import os

import pytest

from absorder.cli import main
from absorder.errors import ParameterError
from absorder.groups import parse_group_spec
from absorder.orders import build_codim_order, build_order, build_prefix_order
from absorder.poset import chain, claw, from_covers, save_poset

from conftest import group


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("posets")
    paths = {}
    for name, P in [("claw4", claw(4)), ("chain3", chain(3)),
                    ("co422", build_codim_order(group(4, 2, 2))),
                    ("co424", build_codim_order(group(4, 2, 4))),
                    ("pre1053", build_prefix_order(group(10, 5, 3))),
                    ("pendant", from_covers(["a", "b", "c"], [(0, 2)], ranks=[0, 0, 1]))]:
        paths[name] = str(d / f"{name}.json")
        save_poset(paths[name], P)
    return paths


# -- group specs -------------------------------------------------------------------

def test_parse_group_spec():
    assert parse_group_spec("g(2,1,2)") == ("gmpn", 2, 1, 2)
    assert parse_group_spec(" G(4, 2, 2) ") == ("gmpn", 4, 2, 2)
    assert parse_group_spec("a3") == ("gmpn", 1, 1, 4)
    assert parse_group_spec("b3") == ("gmpn", 2, 1, 3)
    assert parse_group_spec("d4") == ("gmpn", 2, 2, 4)
    assert parse_group_spec("i2(5)") == ("gmpn", 5, 5, 2)
    assert parse_group_spec("H3") == ("coxeter", "h3")
    for bad in ("g(4,3,2)", "g(0,1,2)", "x7", "g(2,1)", ""):
        with pytest.raises(ParameterError, match="grammar"):
            parse_group_spec(bad)


def test_group_info_examples(capsys):
    code, doc = run_json(capsys, "group", "info", "g(2,1,2)")
    assert code == 0
    assert (doc["order"], doc["reflections"], doc["exponents"]) == (8, 4, [1, 3])
    code, doc = run_json(capsys, "group", "info", "h3")
    assert code == 0 and (doc["order"], doc["reflections"]) == (120, 15)
    assert doc["exponents"] == [1, 5, 9]
    code, doc = run_json(capsys, "group", "info", "g(4,2,2)")
    assert code == 0 and doc["orders_agree"] is False and doc["exponents"] is None


def test_group_info_text(capsys):
    code, out, _ = run(capsys, "group", "info", "g(2,1,2)")
    assert code == 0 and "order 8" in out and "{1,3}" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys, "group", "info", "g(4,3,2)")
    assert code == 64 and "grammar" in err
    with pytest.raises(SystemExit) as exc:
        main(["group"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "no-such-claim"])
    assert exc.value.code == 64
    capsys.readouterr()


@pytest.mark.parametrize("kind", ["e7", "e8"])
def test_out_of_scope_group(capsys, kind):
    code, _, err = run(capsys, "group", "info", kind)
    assert code == 69 and "not supported" in err


def test_resource_budget_exit(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ABSORDER_ELEMENT_BUDGET", "100")
    code, _, err = run(capsys, "order", "build", "--group", "g(2,1,3)", "--out", str(tmp_path / "p.json"))
    assert code == 75 and "budget" in err


# -- order build / quotient / claw ----------------------------------------------------

def test_order_build_and_check(capsys, tmp_path):
    out = str(tmp_path / "abs.json")
    code, doc = run_json(capsys, "order", "build", "--group", "g(2,1,3)", "--kind", "abs", "--out", out)
    assert code == 0 and doc["rank_sizes"] == [1, 9, 23, 15]
    code, doc = run_json(capsys, "check", out, "--check", "flow")
    assert code == 0 and doc["result"] == "holds"
    code, doc = run_json(capsys, "check", out, "--check", "log-concave")
    assert code == 0
    code, _, _ = run(capsys, "order", "build", "--group", "g(4,2,2)", "--kind", "abs", "--out", out)
    assert code == 1


def test_quotient_command(capsys, tmp_path):
    out, orbits = str(tmp_path / "q.json"), str(tmp_path / "orbits.json")
    code, doc = run_json(capsys, "quotient", "--group", "g(1,1,3)", "--out", out, "--orbits-out", orbits)
    assert code == 0 and doc["orbits"] == 3 and doc["rank_sizes"] == [1, 1, 1]
    code, doc = run_json(capsys, "check", out, "--check", "flow", "--weights", "poset")
    assert code == 0
    with open(orbits) as fh:
        assert sorted(len(o) for o in json.load(fh)["orbits"]) == [1, 2, 3]
    code, _, err = run(capsys, "check", out, "--check", "flow", "--weights", "missing.json")
    assert code == 64


def test_claw_commands(capsys):
    code, doc = run_json(capsys, "claw", "embed", "g(2,1,3)")
    assert code == 0 and doc["claws"] == [2, 4, 6]
    code, doc = run_json(capsys, "claw", "search", "g(2,2,3)")
    assert code == 0 and sorted(doc["sizes"]) == [1, 2, 3]
    code, doc = run_json(capsys, "claw", "search", "g(2,2,4)")
    assert code == 1 and doc["partition"] is None
    code, _, _ = run(capsys, "claw", "embed", "g(4,2,2)")
    assert code == 64


# -- check ---------------------------------------------------------------------------

def test_check_examples(capsys, files, tmp_path):
    cert = str(tmp_path / "cert.json")
    code, _, _ = run(capsys, "check", files["claw4"], "--check", "flow", "--cert-out", cert)
    assert code == 0
    assert run(capsys, "check", files["claw4"], "--verify", cert)[0] == 0

    wit = str(tmp_path / "anti.json")
    code, doc = run_json(capsys, "check", files["co422"], "--check", "sperner", "--cert-out", wit)
    assert code == 1 and len(doc["antichain"]) == 9
    assert run(capsys, "check", files["co422"], "--verify", wit)[0] == 0

    rc = str(tmp_path / "rank.json")
    code, doc = run_json(capsys, "check", files["co424"], "--check", "ranked", "--cert-out", rc)
    assert code == 1 and doc["witness"]["kind"] == "rank-conflict"
    assert run(capsys, "check", files["co424"], "--verify", rc)[0] == 0
    capsys.readouterr()


def test_check_three_way_exit_codes(capsys, files, tmp_path):
    assert run(capsys, "check", files["pendant"], "--check", "sperner")[0] == 2
    assert run(capsys, "check", files["pendant"], "--check", "flow")[0] == 1
    assert run(capsys, "check", files["pre1053"], "--check", "sperner")[0] == 2
    cut = str(tmp_path / "cut.json")
    assert run(capsys, "check", files["pre1053"], "--check", "flow", "--cert-out", cut)[0] == 1
    assert run(capsys, "check", files["pre1053"], "--verify", cut)[0] == 0
    assert run(capsys, "check", files["co424"], "--check", "flow")[0] == 2
    assert run(capsys, "check", files["chain3"], "--check", "ranked")[0] == 0
    capsys.readouterr()


def test_verify_rejects_tampered_certificate(capsys, files, tmp_path):
    cert = str(tmp_path / "cert.json")
    run(capsys, "check", files["claw4"], "--check", "flow", "--cert-out", cert)
    with open(cert) as fh:
        doc = json.load(fh)
    doc["layers"][0]["edges"][0][2] += 1
    with open(cert, "w") as fh:
        json.dump(doc, fh)
    assert run(capsys, "check", files["claw4"], "--verify", cert)[0] == 1


def test_schema_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "elements": ["a", "b"],\n  "covers": [[0, 1],\n}')
    code, _, err = run(capsys, "check", str(bad))
    assert code == 65 and "line 4" in err
    bad.write_text('{"elements": ["a", "b"], "covers": [[0, 5]]}')
    code, _, err = run(capsys, "check", str(bad))
    assert code == 65 and "covers" in err


# -- reproduce -------------------------------------------------------------------------

def test_reproduce_codim_counterexample(capsys, tmp_path):
    code, doc = run_json(capsys, "reproduce", "codim-counterexample", "--out-dir", str(tmp_path))
    assert code == 0 and doc["status"] == "PASS"
    code, out, _ = run(capsys, "reproduce", "codim-counterexample", "--out-dir", str(tmp_path))
    assert "PASS" in out and "antichain" in out


def test_reproduce_type_d_small(capsys, tmp_path):
    code, doc = run_json(capsys, "reproduce", "type-d-conjecture", "--n", "4", "--out-dir", str(tmp_path))
    assert code == 0 and doc["status"] == "PASS"
    assert doc["artifacts"]


def test_reproduce_type_d_over_budget(capsys, tmp_path):
    code, doc = run_json(capsys, "reproduce", "type-d-conjecture", "--n", "7", "--out-dir", str(tmp_path))
    assert code == 75 and doc["status"] == "ERROR"
    assert doc["error"]["type"] == "ResourceError" and "budget" in doc["error"]["message"]


def test_reproduce_all_deterministic_and_reverified(capsys, tmp_path):
    outputs = []
    for sub in ("a", "b"):
        code, out, _ = run(capsys, "reproduce", "all", "--json", "--out-dir", str(tmp_path / sub))
        assert code == 0
        outputs.append(out.replace(str(tmp_path / sub), "<out>"))
    assert outputs[0] == outputs[1]
    doc = json.loads(outputs[0])
    assert all(c["status"] == "PASS" for c in doc["claims"])
    artifacts = [a for c in doc["claims"] for a in c["artifacts"]]
    assert len(artifacts) >= 20
    for art in artifacts:
        poset, evidence = (p.replace("<out>", str(tmp_path / "a")) for p in (art["poset"], art["evidence"]))
        assert os.path.exists(poset) and os.path.exists(evidence)
        argv = ["check", poset, "--verify", evidence]
        if art["weights"] != "unit":
            argv += ["--weights", art["weights"]]
        assert run(capsys, *argv)[0] == 0, art
    capsys.readouterr()
    # Evidence files are byte-identical across the two runs.
    for art in artifacts:
        a, b = (art["evidence"].replace("<out>", str(tmp_path / s)) for s in ("a", "b"))
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()


def test_prefix_counterexample_reports_deviation(capsys, tmp_path):
    code, doc = run_json(capsys, "reproduce", "prefix-counterexample", "--out-dir", str(tmp_path))
    assert code == 0 and doc["status"] == "PASS"
    assert doc["deviations"]
    assert sum(doc["data"]["computed_coefficients"]) == 1200
