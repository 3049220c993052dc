"""Command line: exit codes, formats, determinism and table contents."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from conftest import SQ3
from tripole.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_verify_passes(capsys):
    code, out, err = run(capsys, "verify", "--kmax", "3")
    assert code == 0
    d = json.loads(out)
    assert d["result"]["status"] == "pass" and d["result"]["n_failures"] == 0
    assert "0 failures" in err


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--kmax", "1", "--format", "csv")
    assert code == 0
    table = rows(out)
    assert {r["status"] for r in table} == {"pass"}
    assert {"rank_one", "hadamard", "continuity", "well_inclusion"} <= {r["name"] for r in table}


def test_mutation_exits_2(capsys):
    code, out, err = run(capsys, "verify", "--kmax", "2", "--mutate", "skew-B0")
    assert code == 2
    failures = json.loads(out)["result"]["failures"]
    assert "hadamard:BA0" in failures and "continuity:EB0" in failures


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--kmax", "-1"],
        ["verify", "--L", "0"],
        ["verify", "--epsilon", "banana"],
        ["grid", "--grid", "1"],
        ["jump"],
        ["jump", "--normal", "1,1,1"],
        ["jump", "--normal", "1,1"],  # not a unit vector
        ["profile", "--from", "2,0"],
        ["report", "--format", "csv"],
        ["verify", "--params", "/nonexistent/landau.txt"],
        ["areas", "--kmax", "0"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "error" in err


def test_argparse_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["grid", "--format", "xml"])
    assert exc.value.code == 1


def test_jump_worked_solutions(capsys):
    code, out, _ = run(capsys, "jump", "--enumerate", "--epsilon", "0.156")
    assert code == 0
    sols = {s["w_exact"]: s for s in json.loads(out)["solutions"]}
    assert set(sols) == {"√3", "-√3"}
    assert sols["√3"]["a_over_eps"]["x_exact"] == "√3" and sols["√3"]["a_over_eps"]["y_exact"] == "3"
    assert sols["√3"]["n"]["x_exact"] == "-√3/2" and sols["√3"]["n"]["y_exact"] == "1/2"
    assert sols["-√3"]["a_over_eps"]["x_exact"] == "-3"
    assert sols["-√3"]["n"]["y_exact"] == "√3/2"
    assert sols["√3"]["a"]["x"] == pytest.approx(0.156 * SQ3, rel=1e-15)


def test_jump_given_normal_and_no_solution(capsys):
    code, out, _ = run(capsys, "jump", "--normal=-sqrt3/2,1/2", "--format", "csv")
    assert code == 0
    (r,) = rows(out)
    assert r["w_exact"] == "√3" and float(r["a2"]) == 3.0
    code, _, err = run(capsys, "jump", "--normal", "1,0")
    assert code == 2 and "no skew part" in err


def test_grid_contents(capsys):
    code, out, _ = run(capsys, "grid", "--grid", "101", "--epsilon", "0.156")
    assert code == 0
    table = rows(out)
    assert len(table) == 101 * 101
    inside = [r for r in table if r["well_index"] != "0"]
    assert all(abs(float(r["eps1"])) < 1e-15 for r in inside)
    # uniform grid cells inside the disk: each well covers about a third
    n = len(inside)
    for w in "123":
        share = sum(r["well_index"] == w for r in inside) / n
        assert abs(share - 1 / 3) < 0.02
    for r in inside:
        w = int(r["well_index"])
        e2, e3 = float(r["eps2"]), float(r["eps3"])
        want = [(0.156, 0.0), (-0.078, 0.078 * SQ3), (-0.078, -0.078 * SQ3)][w - 1]
        assert (e2, e3) == pytest.approx(want, abs=1e-15)


def test_csv_and_json_carry_the_same_numbers(capsys):
    _, c, _ = run(capsys, "grid", "--grid", "16", "--format", "csv")
    _, j, _ = run(capsys, "grid", "--grid", "16", "--format", "json")
    d = json.loads(j)
    table = rows(c)
    assert d["columns"] == list(table[0].keys())
    assert len(d["rows"]) == len(table)
    for rj, rc in zip(d["rows"], table):
        for col, v in zip(d["columns"], rj):
            if v is None:
                assert rc[col] == ""
            else:
                assert float(rc[col]) == v  # shortest round-trip floats


def test_profile_steps(capsys):
    code, out, _ = run(capsys, "profile", "--samples", "41", "--epsilon", "39/250")
    assert code == 0
    eps = 39 / 250
    for r in rows(out):
        assert float(r["eps1"]) == 0.0
        if r["region"] == "B0":
            assert float(r["e1"]) == pytest.approx(2 * eps * eps, abs=1e-12)


def test_areas(capsys):
    code, out, _ = run(capsys, "areas", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["area_ratio_k01"] == pytest.approx(0.998857741822044, rel=1e-12)
    assert abs(d["tiling"]["defect"]) < 1e-13
    assert d["area_beyond_k01_exact"] == "-84+97√3/2"
    code, out, _ = run(capsys, "areas")
    assert {r["quantity"] for r in rows(out)} >= {"disk_area", "well_1_area", "area_ratio_k01"}


def test_report(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "report", "--kmax", "2", "--out", str(out_file))
    assert code == 0 and out == ""
    d = json.loads(out_file.read_text())
    s = d["summaries"]
    assert s["max_displacement_location"] == "rim of C0"
    assert s["xi_2"]["region"] == "B3"
    assert len(s["extrema"]) == 6


def test_rigid_and_params(capsys, tmp_path):
    p = tmp_path / "landau.txt"
    p.write_text("B = -20\nT = 0.9\n")
    code, out, _ = run(capsys, "verify", "--kmax", "2", "--rigid", "1/2,1,-1", "--params", str(p))
    assert code == 0
    d = json.loads(out)
    assert d["config"]["rigid"] == ["1/2", "1", "-1"]
    assert d["config"]["landau"]["B"] == -20.0


def test_output_is_deterministic(tmp_path):
    """Two separate processes write byte-identical files."""
    outs = []
    for i in range(2):
        f = tmp_path / f"v{i}.json"
        subprocess.run(
            [sys.executable, "-m", "tripole", "verify", "--kmax", "2", "--out", str(f)],
            check=True,
            capture_output=True,
        )
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]
    g = tmp_path / "g.csv"
    subprocess.run([sys.executable, "-m", "tripole", "grid", "--grid", "32", "--out", str(g)], check=True)
    assert not math.isnan(float(rows(g.read_text())[32 * 16 + 16]["u1"]))
