import json
import subprocess
import sys

import pytest

from degnet.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, main
from degnet.verify import data_files


def path(name):
    return str(next(p for p in data_files("") if p.name == name))


def td_path(name):
    p = data_files("")[0].parent / name
    return str(p)


def test_snd_relax_triangle(tmp_path):
    out = tmp_path / "r.json"
    lp = tmp_path / "lp.txt"
    assert main(["snd-relax", "--instance", path("snd_01_triangle.json"), "--out", str(out),
                 "--dump-lp", str(lp)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["command"] == "snd-relax" and rep["seed"] == 0 and "eps" in rep["config"]
    assert all(line["ok"] for line in rep["lines"])
    assert lp.read_text().strip()


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["snd-round", "--instance", path("snd_02_random_p1.json"), "--runs", "20",
                     "--seed", "5", "--out", str(out)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert len(rep["result"]["runs"]) == 20


def test_treelabel_and_gst(tmp_path):
    out = tmp_path / "t.json"
    assert main(["treelabel", "--instance", path("tl_01_small.json"), "--trials", "200",
                 "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["result"]["supertree_size"] > 1
    assert main(["gst", "--instance", path("gst_01_three_bags.json"),
                 "--decomposition", td_path("gst_01_three_bags_td.json"), "--reps", "5",
                 "--out", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["result"]["reps"] == 5


def test_oracles(tmp_path):
    assert main(["oracle", "snd", "--instance", path("snd_01_triangle.json")]) == EXIT_OK
    assert main(["oracle", "tl", "--instance", path("tl_01_small.json")]) == EXIT_OK
    assert main(["oracle", "gst", "--instance", path("gst_01_three_bags.json")]) == EXIT_OK


def test_missing_file(capsys):
    assert main(["snd-relax", "--instance", "/nonexistent/x.json"]) == EXIT_INPUT
    assert "no such file" in capsys.readouterr().err


def test_schema_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": [0, 1], "edges": [{"id": 0, "u": 0, "v": 1, "cost": "x"}]}))
    assert main(["snd-relax", "--instance", str(bad)]) == EXIT_INPUT
    assert "edges/0/cost" in capsys.readouterr().err


def test_infeasible_exit_code(tmp_path):
    inst = {"vertices": [0, 1, 2], "edges": [{"id": 0, "u": 0, "v": 1}, {"id": 1, "u": 1, "v": 2}],
            "requirements": [{"u": 0, "v": 2, "r": 1}], "p": 1, "Ap": "1"}
    f = tmp_path / "inf.json"
    f.write_text(json.dumps(inst))
    assert main(["snd-relax", "--instance", str(f)]) == EXIT_INFEASIBLE
    assert main(["oracle", "snd", "--instance", str(f)]) == EXIT_INFEASIBLE


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_console_script_verify(tmp_path):
    out = tmp_path / "v.json"
    proc = subprocess.run([sys.executable, "-m", "degnet.cli", "verify", "--suite", "all", "--seed", "7",
                           "--out", str(out)], capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    rep = json.loads(out.read_text())
    assert rep["config"]["suite"] == "all" and rep["seed"] == 7
    assert all(l["ok"] for l in rep["lines"] if l["kind"] == "hard")
