import csv
import io
import json
import subprocess
import sys

import pytest

from intmatcount.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_predict_gaussian():
    code, out = run("predict", "--poly", "1,0,1")
    assert code == 0 and json.loads(out)["C_P"] == pytest.approx(3.0, rel=1e-12)


def test_predict_golden_csv():
    code, out = run("predict", "--poly", "1,-1,-1", "--format", "csv")
    rec = next(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(rec["C_P"]) == pytest.approx(1.644041, rel=1e-6)


def test_predict_with_invariants(tmp_path):
    f = tmp_path / "cubic.json"
    f.write_text(json.dumps([{"disc": -23, "conductor": 1, "h": 1, "R": 0.2811995743, "w": 2}]))
    code, out = run("predict", "--poly", "1,0,-1,-1", "--invariants", str(f))
    d = json.loads(out)
    assert code == 0 and d["orders"][0]["h"] == 1 and d["orders"][0]["R"] == 0.2811995743


def test_exit_codes(tmp_path):
    assert run("predict", "--poly", "1,0,-1,-1")[0] == 2
    assert run("predict", "--poly", "1,0,-1,-1", "--invariants", str(tmp_path / "none.json"))[0] == 2
    assert run("predict", "--poly", "2,0,1")[0] == 1
    assert run("count", "--poly", "1,0,1", "--radius", "1e9")[0] == 3
    assert run("verify", "sandwich", "--poly", "1,0,100", "--radius", "30", "--rule", "unit",
               "--samples", "5000")[0] == 4
    with pytest.raises(SystemExit) as e:
        run("count", "--poly", "1,0,1", "--radius", "-1")
    assert e.value.code == 1


def test_count_and_stream(tmp_path):
    code, out = run("count", "--poly", "1,0,1", "--radius", "3")
    assert code == 0 and json.loads(out)[0]["count"] == 10
    m = tmp_path / "m.txt"
    code, out = run("count", "--poly", "1,0,1", "--radius", "2", "--stream", str(m))
    assert len(m.read_text().splitlines()) == 2


def test_count_sweep_csv():
    code, out = run("count", "--poly", "1,0,3", "--radius-sweep", "50,100", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "T,count,count_over_T_m,C_P_poly,C_P_field,ratio,closer"
    assert len(lines) == 3 and lines[-1].endswith("poly")


def test_orbits():
    code, out = run("orbits", "--poly", "1,0,5", "--radius", "20")
    d = json.loads(out)
    assert d["num_orbits"] == 2 and sum(o["size"] for o in d["orbits"]) == d["total"]
    code, out = run("orbits", "--poly", "1,0,3", "--radius", "20", "--cross-check")
    d = json.loads(out)
    assert sorted(o["conductor"] for o in d["orbits"]) == ["1", "2"]
    assert d["cross_check"]["contradictions"] == 0
    assert run("orbits", "--poly", "1,0,0,-1,-1", "--radius", "3")[0] == 1


def test_verify_commands():
    code, out = run("verify", "jacobian", "--poly", "1,0,-1,-1")
    d = json.loads(out)[0]
    assert code == 0 and d["rhs"] == pytest.approx(2 / 23 ** 0.5)
    code, out = run("verify", "minkowski2", "--grid", "500")
    assert code == 0
    code, out = run("verify", "haar", "--identity", "iwasawa-knk", "--samples", "1048576", "--seed", "1",
                    "--f", "gauss", "--negative-control")
    assert code == 0 and len(json.loads(out)) == 2


def test_deterministic_output():
    args = ("verify", "ceta", "--poly", "1,0,1", "--samples", "65536", "--seed", "4")
    assert run(*args) == run(*args)
    assert run("count", "--poly", "1,-1,-1", "--radius-sweep", "40,80") == \
        run("count", "--poly", "1,-1,-1", "--radius-sweep", "40,80")


def test_threads_flag_does_not_change_output():
    a = run("--threads", "1", "count", "--poly", "1,0,5", "--radius", "30")
    b = run("--threads", "4", "count", "--poly", "1,0,5", "--radius", "30")
    assert a == b


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "intmatcount.cli", "count", "--poly", "1,0,1", "--radius", "3",
                        "--format", "csv"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[1].startswith("3,10,")
