import csv
import io
import json
import subprocess
import sys

import pytest

from synchrony_lab.cli import build_parser, main

SUBCOMMANDS = ["synchrony", "automorphisms", "exotic", "bounds", "equilibria", "simulate",
               "table1", "verify"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exotic_g6(capsys):
    code, out, _ = run(capsys, "exotic", "--graph", "fixture:g6")
    assert code == 0 and "0 exotic patterns" in out


def test_exotic_fig1(capsys):
    code, out, _ = run(capsys, "exotic", "--graph", "fixture:fig1", "--format", "json")
    doc = json.loads(out)["result"]
    assert code == 0 and doc["automorphism_order"] == 2 and doc["expectation_met"]
    assert {"pattern": "1,4|2,5|3,6", "verdict": "exotic", "witness": []} in doc["patterns"]


def test_synchrony_json(capsys):
    code, out, _ = run(capsys, "synchrony", "--graph", "fixture:ring3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == "1" and doc["command"] == "synchrony"
    assert [p["classes"] for p in doc["result"]["patterns"]] == \
        [[[1, 2, 3]], [[1, 2], [3]], [[1, 3], [2]], [[1], [2, 3]]]
    code, out, _ = run(capsys, "synchrony", "--graph", "fixture:ring3", "--include-trivial",
                       "--format", "json")
    assert json.loads(out)["result"]["patterns"][-1]["trivial"] is True


def test_automorphisms(capsys):
    code, out, _ = run(capsys, "automorphisms", "--graph", "fixture:fig5", "--elements")
    assert code == 0 and "|Aut| = 12" in out and "(1 5)(2 4)" in out


def test_graph_file(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"cells": 4, "edges": [
        {"u": i + 1, "v": (i + 1) % 4 + 1, "class": "a"} for i in range(4)]}))
    code, out, _ = run(capsys, "automorphisms", "--graph", str(path))
    assert code == 0 and "|Aut| = 8" in out


def test_bounds_ok(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"n": 2, "rows": [[-1, 1], [1, -1]]}))
    code, out, _ = run(capsys, "bounds", "--matrix", str(path), "--format", "json")
    doc = json.loads(out)["result"]
    assert code == 0 and doc["signature"] == {"n_plus": 0, "n_zero": 1, "n_minus": 1}


def test_bounds_bad_matrix(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "rows": [[1, 1], [1, -1]]}))
    code, _, err = run(capsys, "bounds", "--matrix", str(path))
    assert code == 2 and "RowSumNonzero" in err


@pytest.mark.parametrize("argv", [
    ["synchrony", "--graph", "fixture:nope"],
    ["synchrony", "--graph", "/no/such/file.json"],
    ["exotic", "--graph", "fixture:g6", "--pattern", "1,2|3,4,5,6"],
    ["simulate", "--system", "fixture:kuramoto-g6", "--x0", "1,2"],
    ["equilibria", "--system", "fixture:g6-tilde", "--pattern", "1,2|3|4|5|6"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error: ")


def test_unknown_flag_is_an_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["table1", "--bogus"])
    assert exc.value.code == 2


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_for_every_subcommand(capsys, sub):
    with pytest.raises(SystemExit) as exc:
        main([sub, "--help"])
    assert exc.value.code == 0 and "--format" in capsys.readouterr().out


def test_equilibria_tilde(capsys):
    code, out, _ = run(capsys, "equilibria", "--system", "fixture:g6-tilde", "--pattern",
                       "1,5|2,4|3|6", "--format", "json")
    doc = json.loads(out)["result"]
    assert code == 0 and len(doc["equilibria"]) == 5 and doc["torus"] is False
    code, out, _ = run(capsys, "equilibria", "--system", "fixture:g6-tilde", "--pattern", "1,5|2,4|3|6")
    assert "1.0000π" in out and "5 equilibria" in out


def test_simulate_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--system", "fixture:kuramoto-g6", "--x0",
                       "0,0.1,0.2,0,0.1,0.3", "--t-end", "1", "--dt", "0.1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["t", "x1", "x2", "x3", "x4", "x5", "x6", "potential"]
    assert len(rows) == 12
    energy = [float(r[-1]) for r in rows[1:]]
    assert all(b <= a for a, b in zip(energy, energy[1:]))
    out_path = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", "--system", "fixture:kuramoto-g6", "--x0",
                       "0,0.1,0.2,0,0.1,0.3", "--t-end", "1", "--dt", "0.1", "--out", str(out_path))
    assert code == 0 and out_path.read_text().splitlines()[0].startswith("t,x1")


def test_table1_reports_mismatch(capsys):
    code, out, _ = run(capsys, "table1")
    assert code == 1
    assert "row 8: match" in out and "row 4: MISMATCH" in out


@pytest.mark.parametrize("argv", [["exotic", "--graph", "fixture:g6"], ["table1"],
                                  ["verify"]])
def test_json_is_deterministic(capsys, argv):
    outs = [run(capsys, *argv, "--format", "json", "--threads", t)[1] for t in ("1", "4")]
    assert outs[0] == outs[1]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SYNCHRONY_LAB_SEED", "oops")
    code, _, err = run(capsys, "synchrony", "--graph", "fixture:ring3")
    assert code == 2 and "SYNCHRONY_LAB_SEED" in err


def test_fixture_listing(capsys):
    code, out, _ = run(capsys, "--fixtures", "--format", "json")
    assert code == 0 and "kuramoto-g6" in json.loads(out)["result"]["systems"]


def test_parser_lists_all_subcommands():
    text = build_parser().format_help()
    assert all(s in text for s in SUBCOMMANDS)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "synchrony_lab", "exotic", "--graph", "fixture:ring5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0 exotic patterns" in proc.stdout
