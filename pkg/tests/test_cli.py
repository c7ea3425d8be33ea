import json
import subprocess
import sys

import pytest

from trajsim.cli import _num, main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "a.csv").write_text("t,x,y\n0,0,0\n1,1,0\n2,2,0\n")
    (tmp_path / "b.csv").write_text("t,x,y\n0,0,1\n1,1,1\n2,2,1\n")
    (tmp_path / "s1.txt").write_text("abc\n")
    (tmp_path / "s2.txt").write_text("adc\n")
    (tmp_path / "metric.json").write_text(json.dumps(
        {"locations": {"a": [0, 0], "b": [1, 0], "c": [2, 0], "d": [1, 1]}}))
    (tmp_path / "data.json").write_text(json.dumps({"trajectories": [
        {"id": f"t{i}", "samples": [[0, i, 0], [1, i, 1], [2, i + 0.5, 2]]} for i in range(5)
    ]}))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dist_frechet(files, capsys):
    code, out, _ = run(capsys, "dist", "--measure", "frechet", files / "a.csv", files / "b.csv")
    assert code == 0
    res = json.loads(out)
    assert res["schema"] == 1 and res["value"] == pytest.approx(1.0)


def test_dist_tw_needs_sigma(files, capsys):
    code, _, err = run(capsys, "dist", "--measure", "tw-frechet", files / "a.csv", files / "b.csv")
    assert code == 2 and "sigma" in err


def test_dist_tw(files, capsys):
    code, out, _ = run(capsys, "dist", "--measure", "tw-frechet", "--sigma", "0.1", "--speed", "varying",
                       files / "a.csv", files / "b.csv")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1.0)


def test_dist_metric_edit(files, capsys):
    code, out, _ = run(capsys, "dist", "--measure", "metric-edit", "--metric", files / "metric.json",
                       files / "s1.txt", files / "s2.txt")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(2 * 2 ** 0.5 - 2)


def test_dist_literal_strings(capsys):
    code, out, _ = run(capsys, "dist", "--measure", "edit", "--strings", "abc", "ab")
    assert code == 0 and json.loads(out)["value"] == 1.0


def test_csv_for_symbolic_measure_rejected(files, capsys):
    code, _, err = run(capsys, "dist", "--measure", "edit", files / "a.csv", files / "b.csv")
    assert code == 3 and "symbol" in err


def test_all_pairs_json_and_csv(files, capsys):
    code, out, _ = run(capsys, "dist", "--measure", "discrete-frechet", "--all-pairs", files / "data.json")
    res = json.loads(out)
    assert code == 0 and res["ids"][0] == "t0" and len(res["matrix"]) == 5
    code, out, _ = run(capsys, "dist", "--measure", "dtw", "--all-pairs", files / "data.json", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "id,t0,t1,t2,t3,t4"


def test_disjoint_shingles(capsys):
    code, out, _ = run(capsys, "dist", "--measure", "jaccard", "--shingle-w", "2", "--strings", "ab", "cd")
    assert code == 0 and json.loads(out)["value"] == 1.0


def test_infinity_written_as_string():
    assert _num(float("inf")) == "inf"
    assert _num(2.5) == 2.5


def test_cluster(files, capsys):
    code, out, _ = run(capsys, "cluster", "--measure", "discrete-frechet", "--k", "2", files / "data.json")
    res = json.loads(out)
    assert code == 0 and all(len(c["members"]) >= 2 for c in res["clusters"])
    code, out, _ = run(capsys, "cluster", "--measure", "discrete-frechet", "--k", "2", "--exact", files / "data.json")
    assert json.loads(out)["radius"] <= res["radius"]


def test_cluster_k_too_large(files, capsys):
    code, _, _ = run(capsys, "cluster", "--measure", "dtw", "--k", "9", files / "data.json")
    assert code == 2


def test_missing_file(files, capsys):
    code, _, err = run(capsys, "dist", "--measure", "dtw", files / "nope.csv", files / "a.csv")
    assert code == 3


def test_malformed_csv(files, capsys):
    (files / "bad.csv").write_text("0,0\n")
    code, _, err = run(capsys, "dist", "--measure", "dtw", files / "bad.csv", files / "a.csv")
    assert code == 3 and "parse error" in err


def test_size_guard_exit(files, capsys):
    code, _, _ = run(capsys, "dist", "--measure", "metric-edit", "--metric", files / "metric.json",
                     "--strings", "abcdabcdabcda", "ab")
    assert code == 4


def test_bad_flag(capsys):
    assert run(capsys, "dist", "--measure", "bogus")[0] == 2


def test_gadget_ov(files, capsys):
    code, out, _ = run(capsys, "gadget", "ov", "--n", "3", "--d", "2", "--seed", "4", "--verify",
                       "--out-prefix", files / "ov_")
    res = json.loads(out)
    assert code == 0 and res["report"]["separated"]
    assert (files / "ov_P.csv").exists()


def test_gadget_sat(files, capsys):
    (files / "f.cnf").write_text("p cnf 3 1\n1 -2 3 0\n")
    code, out, _ = run(capsys, "gadget", "sat", "--formula", files / "f.cnf", "--verify",
                       "--dataset-out", files / "sat.json")
    res = json.loads(out)
    assert code == 0 and res["report"]["forward_ok"] and res["trajectories"] == 2 * 3 + 11 * 3 + 3
    assert (files / "sat.metric.json").exists()
    code, out, _ = run(capsys, "dist", "--measure", "edit", "--all-pairs", files / "sat.json")
    assert code == 0


def test_gadget_sat_needs_input(capsys):
    assert run(capsys, "gadget", "sat")[0] == 2


def test_out_file(files, capsys):
    code, out, _ = run(capsys, "dist", "--measure", "edit", "--strings", "a", "b", "--out", files / "r.json")
    assert code == 0 and out == ""
    assert json.loads((files / "r.json").read_text())["value"] == 2.0


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "trajsim.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "dist" in res.stdout
