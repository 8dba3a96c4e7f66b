import numpy as np
import pytest

from qutrit_kcbs.ngon import NgonConfig, Order
from qutrit_kcbs.records import ShotTable
from qutrit_kcbs.shotfile import ADAPTERS, ShotFileError, dumps, loads, read_shots, register_adapter, write_shots
from qutrit_kcbs.simulator import NoiseModel, RunPlan, run


def random_table(rng):
    N = int(rng.choice([5, 7, 9, 11]))
    orders = [Order.NORMAL, Order.REVERSE][: int(rng.integers(1, 3))]
    n = int(rng.integers(1, 6))
    theta = float(rng.uniform(0, np.pi / 2))
    i = np.tile(np.repeat(np.arange(1, N + 1), n), len(orders))
    code = np.repeat([0 if o is Order.NORMAL else 1 for o in orders], N * n)
    j = (i - 1 + np.where(code == 1, -1, 1)) % N + 1
    rep = np.tile(np.arange(n), N * len(orders))
    a1 = rng.choice([-1, 1], i.size)
    a2 = rng.choice([-1, 1], i.size)
    return ShotTable(N, theta, i, j, code, rep, a1, a2, meta={"seed": int(rng.integers(0, 2**63))})


def test_round_trip_random(rng):
    for _ in range(1000):
        t = random_table(rng)
        back = loads(dumps(t))
        assert back.equals(t)
        assert back.theta_set == t.theta_set
        assert dumps(back) == dumps(t)


def test_round_trip_file(tmp_path):
    t = run(RunPlan(NgonConfig.compatible(5), (Order.NORMAL, Order.REVERSE), 200, 1, NoiseModel.preset("calibrated")))
    path = tmp_path / "s.csv"
    write_shots(t, path)
    back = read_shots(path)
    assert back.equals(t)
    assert back.meta["noise"]["name"] == "calibrated"
    assert back.meta["orders"] == ["normal", "reverse"]


def _good():
    return dumps(run(RunPlan(NgonConfig(5, 0.5), n_per_pair=3, seed=0)))


@pytest.mark.parametrize(
    "mutate, line",
    [
        (lambda ls: ls.__setitem__(4, "2,3,0,1,1,0"), 5),
        (lambda ls: ls.__setitem__(6, "2,4,0,0,1,1"), 7),
        (lambda ls: ls.__setitem__(3, "1,2,0,1,x,1"), 4),
        (lambda ls: ls.__setitem__(8, "3,4,0,0"), 9),
        (lambda ls: ls.__setitem__(5, "9,10,0,0,1,1"), 6),
        (lambda ls: ls.__setitem__(5, "2,3,7,0,1,1"), 6),
        (lambda ls: ls.__setitem__(1, "a,b"), 2),
        (lambda ls: ls.__setitem__(0, "# not json"), 1),
        (lambda ls: ls.__setitem__(0, ls[0].replace('"format_version": 1, ', "")), 1),
        (lambda ls: ls.__setitem__(0, ls[0].replace('"format_version": 1', '"format_version": 9')), 1),
        (lambda ls: ls.__setitem__(0, ls[0][1:]), 1),
    ],
)
def test_schema_errors_carry_line_numbers(mutate, line):
    lines = _good().splitlines()
    mutate(lines)
    with pytest.raises(ShotFileError) as exc:
        loads("\n".join(lines) + "\n")
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_record_count_mismatch():
    text = _good()
    with pytest.raises(ShotFileError):
        loads(text.rsplit("\n", 2)[0] + "\n")


def test_empty_body_and_empty_file():
    t = ShotTable(5, 0.3, [], [], [], [], [], [])
    assert len(loads(dumps(t))) == 0
    with pytest.raises(ShotFileError):
        loads("")


def test_adapter_registry(tmp_path):
    @register_adapter("plain-test")
    def _plain(path):
        rows = np.loadtxt(path, delimiter=" ", dtype=int, ndmin=2)
        n = len(rows)
        return ShotTable(5, 0.4, rows[:, 0], rows[:, 1], np.zeros(n), np.arange(n), rows[:, 2], rows[:, 3])

    p = tmp_path / "x.txt"
    p.write_text("1 2 1 -1\n5 1 -1 -1\n")
    t = read_shots(p, adapter="plain-test")
    assert t.a1.tolist() == [1, -1]
    with pytest.raises(ValueError):
        read_shots(p, adapter="missing")
    del ADAPTERS["plain-test"]
