import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from runge_modular.cli import COMPARE_COLUMNS, main, render_text

DATA = Path(__file__).resolve().parent.parent / "data"


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_analyze_borel5(capsys):
    code, out = run_json(capsys, "analyze", "--input", str(DATA / "borel5.json"))
    assert code == 0
    assert out["command"] == "analyze" and len(out["config_hash"]) == 16
    assert out["runge_condition"] is True and out["m"] == 1


def test_analyze_runge_fails(capsys):
    code, out = run_json(capsys, "analyze", "--input", str(DATA / "gl3.json"))
    assert code == 2 and out["runge_condition"] is False


@pytest.mark.parametrize(
    "payload",
    ['{"N": 2, "generators": [[1,1,0,1]]}', '{"N": 5}', "{not json", '[1, 2]', "/no/such/file.json"],
)
def test_bad_input_exits_1(capsys, payload):
    assert main(["analyze", "--input", payload]) == 1
    assert "error" in capsys.readouterr().err


def test_bad_options_exit_1(capsys):
    assert main(["analyze", "--input", str(DATA / "borel5.json"), "--s", "0"]) == 1
    assert main(["analyze", "--input", str(DATA / "borel5.json"), "--sigma", "9"]) == 1
    assert main(["nope"]) == 1
    capsys.readouterr()


def test_construct_is_deterministic_and_reverifies(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"cert{i}.json"
        assert main(["construct", "--input", str(DATA / "borel4.json"), "--out", str(path), "--format", "json"]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
    code, res = run_json(capsys, "verify", "--input", str(tmp_path / "cert0.json"))
    assert code == 0 and res["certificate_checks"]["all"]


def test_construct_refuses_without_runge(capsys):
    assert main(["construct", "--input", str(DATA / "gl3.json")]) == 2
    capsys.readouterr()


def test_tampered_certificate_exit_3(tmp_path, capsys):
    path = tmp_path / "cert.json"
    assert main(["construct", "--input", str(DATA / "borel4.json"), "--out", str(path), "--skip-q"]) == 0
    data = json.loads(path.read_text())
    cert = data["certificate"]
    cert["cusps"] = [dict(c, ord_phi=c["ord_phi"] + 1) for c in cert["cusps"]]
    path.write_text(json.dumps(data))
    assert main(["verify", "--input", str(path), "--skip-q"]) == 3
    capsys.readouterr()


def test_verify_bounds_suites(capsys):
    code, out = run_json(capsys, "verify", "--tags", "bounds")
    assert code == 0 and out["all_passed"]
    assert {r["name"] for r in out["results"]} == {"combinatorial lemma oracles", "height bound chain"}


def test_unknown_tag(capsys):
    assert main(["verify", "--tags", "nonsense"]) == 1
    capsys.readouterr()


def test_compare_columns_and_csv(tmp_path, capsys):
    path = tmp_path / "cmp.csv"
    code = main(["compare", "--input", str(DATA / "borel5.json"), "--s-values", "1,2,3", "--out", str(path)])
    capsys.readouterr()
    assert code == 0
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == COMPARE_COLUMNS
    assert [r["runge"] for r in rows] == ["True", "False", "False"]
    bp = [float(r["bilu_parent"]) for r in rows]
    assert bp == sorted(bp)


def test_text_format_matches_json():
    obj = {"a": 1, "b": {"c": [1, 2], "d": [{"e": None}]}}
    assert render_text(obj) == ["a: 1", "b.c: [1, 2]", "b.d[0].e: null"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "runge_modular", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()


def test_certificate_with_pole_on_sigma_exit_3(tmp_path, capsys):
    path = tmp_path / "cert.json"
    assert main(["construct", "--input", str(DATA / "borel4.json"), "--out", str(path), "--skip-q"]) == 0
    data = json.loads(path.read_text())
    cert = data["certificate"]
    # move sigma onto a cusp where phi has its pole
    pole = next(c["index"] for c in cert["cusps"] if c["ord_phi"] < 0)
    cert["sigma"] = [pole]
    path.write_text(json.dumps(data))
    assert main(["verify", "--input", str(path), "--skip-q"]) == 3
    capsys.readouterr()


@pytest.mark.parametrize("seed", range(5))
def test_seed_changes_samples_not_verdicts(capsys, seed):
    code, out = run_json(capsys, "verify", "--tags", "eisenstein", "--seed", str(seed))
    assert code == 0 and out["seed"] == seed and out["all_passed"]
