import hashlib
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qutrit_kcbs.cli import main, parse_angle
from qutrit_kcbs.ngon import compatibility_angle
from qutrit_kcbs.shotfile import write_shots
from qutrit_kcbs.records import ShotTable
from qutrit_kcbs.theory import SQRT5
from conftest import THETA5
from tablei import synthetic_table


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return np.loadtxt(io.StringIO(text), ndmin=2)


def test_parse_angle():
    assert parse_angle("compat", 5) == THETA5
    assert parse_angle("48deg", 5) == pytest.approx(math.radians(48))
    assert parse_angle("0.5rad", 5) == 0.5
    assert parse_angle("compat-0.3rad", 5) == pytest.approx(THETA5 - 0.3)
    assert parse_angle("compat+2deg", 7) == pytest.approx(compatibility_angle(7) + math.radians(2))


def test_bounds(capsys):
    code, out, _ = call(capsys, "bounds", "--n-obs", "5", "17")
    rows = table(out)
    assert code == 0
    assert rows[0, 4] == pytest.approx(-3.828, abs=1e-3)
    assert rows[0, 5] == pytest.approx(0.472, abs=1e-3)
    assert rows[1, 2] == pytest.approx(-16.708, abs=5e-4)
    code, out, _ = call(capsys, "bounds", "--n-obs", "5", "--format", "doc")
    doc = json.loads(out)
    assert doc["rows"][0]["nc"] == -3 and "version" in doc["provenance"]


def test_theory_rows(capsys):
    code, out, _ = call(capsys, "theory", "--n-obs", "5", "--theta-range", "0rad:compat:5")
    rows = table(out)
    assert rows[-1, 0] == pytest.approx(THETA5, abs=1e-6)
    assert rows[-1, 1] == pytest.approx(-3.944, abs=5e-4)
    assert rows[-1, 3] == pytest.approx(-3.944, abs=5e-4)
    assert rows[-1, 4] == pytest.approx(-3.888, abs=5e-4)
    assert rows[0, 1] == 5
    _, out, _ = call(capsys, "theory", "--n-obs", "7", "--theta", "0rad")
    assert table(out)[0, 1] == 7
    # The closed form reaches -4.045 at pi/4, not at pi/2.
    _, out, _ = call(capsys, "theory", "--theta", "45deg")
    assert table(out)[0, 1] == pytest.approx(-1.25 * (1 + SQRT5), abs=1e-6)


def test_simulate_and_determinism(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("KCBS_OUTPUT_DIR", str(tmp_path / "outdir"))
    code, out, _ = call(capsys, "simulate", "--n-obs", "5", "--theta", "compat", "--reps", "10000", "--seed", "7")
    assert code == 0
    path = tmp_path / "outdir" / "shots_N5_seed7.csv"
    assert str(path) in out and "seed 7" in out
    first = path.read_bytes()
    assert len(first.splitlines()) == 2 + 5 * 10000
    call(capsys, "simulate", "--n-obs", "5", "--theta", "compat", "--reps", "10000", "--seed", "7")
    assert path.read_bytes() == first
    other = tmp_path / "both.csv"
    call(capsys, "simulate", "--order", "both", "--reps", "10", "--out", str(other))
    assert len(other.read_text().splitlines()) == 2 + 100


def test_analyze_ideal(capsys, tmp_path):
    path = tmp_path / "a.csv"
    call(capsys, "simulate", "--reps", "10000", "--seed", "1", "--out", str(path))
    code, out, _ = call(capsys, "analyze", str(path), "--format", "doc")
    assert code == 0
    doc = json.loads(out)
    (r,) = doc["reports"]
    assert abs(r["S"]["value"] - (5 - 4 * SQRT5)) < 4 * r["S"]["se"]
    assert 55 < r["significance_sigma"]["bare"] < 75
    assert r["theta_est"]["unit"] == "rad"
    assert doc["provenance"]["input"]["sha256"] == hashlib.sha256(path.read_bytes()).hexdigest()
    assert call(capsys, "analyze", str(path), "--expect-contextual")[0] == 0


def test_analyze_all_plus(capsys, tmp_path):
    n, N = 20, 5
    i = np.repeat(np.arange(1, N + 1), n)
    t = ShotTable(N, 0.0, i, i % N + 1, np.zeros(i.size), np.tile(np.arange(n), N), np.ones(i.size), np.ones(i.size))
    path = tmp_path / "plus.csv"
    write_shots(t, path)
    code, out, err = call(capsys, "analyze", str(path), "--format", "doc", "--expect-contextual")
    assert code == 3 and "expectation failed" in err
    (r,) = json.loads(out)["reports"]
    assert r["S"]["value"] == N
    assert r["CF"]["value"] == pytest.approx((N - (-N + 2)) / -2)
    assert not r["contextual"]


def test_analyze_published_table(capsys, tmp_path):
    path = tmp_path / "t1.csv"
    write_shots(synthetic_table(), path)
    code, out, _ = call(capsys, "analyze", str(path), "--format", "doc")
    (r,) = json.loads(out)["reports"]
    assert r["S"]["value"] == pytest.approx(-3.915, abs=1e-3)
    assert r["S_ext"]["value"] == pytest.approx(-3.864, abs=1e-3)


def test_analyze_data_errors(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    call(capsys, "simulate", "--reps", "5", "--out", str(bad))
    lines = bad.read_text().splitlines()
    lines[4] = "2,3,0,1,1,2"
    bad.write_text("\n".join(lines) + "\n")
    code, _, err = call(capsys, "analyze", str(bad))
    assert code == 2 and "line 5" in err
    partial = tmp_path / "partial.csv"
    t = synthetic_table()
    write_shots(t.select(t.i != 2), partial)
    code, _, err = call(capsys, "analyze", str(partial))
    assert code == 2 and "(2, 3)" in err
    assert call(capsys, "analyze", str(tmp_path / "missing.csv"))[0] == 2


@pytest.mark.parametrize("argv", [
    ["theory", "--theta", "48"],
    ["bounds", "--n-obs", "6"],
    ["simulate", "--reps", "0"],
    ["simulate", "--noise", "no-such-preset"],
    ["theory", "--theta-range", "0rad:1rad"],
    ["theory", "--theta", "100deg"],
])
def test_usage_errors_return_1(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 1 and "error" in err


@pytest.mark.parametrize("argv", [["launch"], ["simulate", "--order", "sideways"], ["analyze"]])
def test_parser_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_ngon_sweep_ideal(capsys):
    code, out, _ = call(capsys, "ngon-sweep", "--n-obs", "5", "11", "31", "--reps", "20000", "--seed", "3")
    rows = table(out)
    assert code == 0
    cf = rows[:, 8]
    assert np.all(np.diff(cf) > 0) and cf[-1] < 1


def test_ngon_sweep_consistent_with_analyze(capsys, tmp_path):
    path = tmp_path / "s.csv"
    flags = ["--reps", "2000", "--seed", "5", "--mode", "block"]
    call(capsys, "simulate", "--n-obs", "5", "--out", str(path), *flags)
    _, a, _ = call(capsys, "analyze", str(path), "--format", "doc")
    _, s, _ = call(capsys, "ngon-sweep", "--n-obs", "5", "--format", "doc", *flags)
    ra, rs = json.loads(a)["reports"][0], json.loads(s)["reports"][0]
    for key in ("S", "S_ext", "CF", "epsilon", "theta_est"):
        assert ra[key] == rs[key]


def test_analyze_deterministic(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    path = tmp_path / "d.csv"
    outs = []
    for _ in range(2):
        call(capsys, "simulate", "--reps", "300", "--seed", "9", "--noise", "calibrated", "--out", str(path))
        outs.append(call(capsys, "analyze", str(path), "--format", "doc")[1])
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["provenance"]["timestamp"].startswith("2023-11-14")


def test_console_script(tmp_path):
    res = subprocess.run([sys.executable, "-m", "qutrit_kcbs.cli", "bounds", "--n-obs", "7"],
                         capture_output=True, text=True, check=True)
    assert "-6.270669" in res.stdout
