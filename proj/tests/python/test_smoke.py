import json
import math
import os
import subprocess

import pytest

import rangecap

Z3 = rangecap.lattice(3)
WATSON = 1.516386059151978


def test_simulate_replays():
    a = rangecap.simulate(Z3, 50, seed=4)
    b = rangecap.simulate(Z3, 50, seed=4)
    assert a == b
    assert len(a["positions"]) == 51
    assert a["positions"][0] == [0, 0, 0]


def test_growth_heisenberg():
    g = rangecap.growth({"backend": "heisenberg"}, 10)
    assert 3.4 <= g["fitted_index"] <= 4.6


def test_green_values():
    assert rangecap.green(Z3, (0, 0, 0)) == pytest.approx(WATSON, rel=1e-9)
    truncated = rangecap.green(Z3, (0, 0, 0), horizon=400)
    assert 1.45 <= truncated["value"] <= 1.52


def test_capacity_methods_agree_on_singleton():
    solve = rangecap.capacity(Z3, [(0, 0, 0)], method="green-solve")
    assert solve["point"] == pytest.approx(1.0 / WATSON, rel=1e-6)
    mc = rangecap.capacity(Z3, [(0, 0, 0)], horizon=10000, trials=2000, seed=3)
    assert abs(mc["point"] - 1.0 / WATSON) < 4 * mc["stderr"] + 0.02
    br = rangecap.capacity(Z3, [(0, 0, 0)], method="harmonic-bracket", radius=10)
    low, high = br["bracket"]
    assert low <= 1.0 / WATSON <= high


def test_equilibrium_symmetric_pair():
    r = rangecap.equilibrium(Z3, [(0, 0, 0), (2, 1, 0)])
    assert r["measure"]["weights"] == pytest.approx([0.5, 0.5], abs=1e-6)


def test_validation_error():
    with pytest.raises(rangecap.ValidationError):
        rangecap.simulate({"backend": "lattice", "dim": 1, "generators": [[2], [3]]}, 5, seed=1)


def test_run_matches_cli_binary():
    args = ["capacity", "--group", json.dumps(Z3), "--n", "64", "--seed", "7", "--trials", "8"]
    code, out, _ = rangecap.run(*args)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1
    assert math.isfinite(report["result"]["point"])
    cli = os.environ.get("RANGECAP_CLI")
    if cli:
        proc = subprocess.run([cli, *args], capture_output=True, text=True, check=True)
        assert proc.stdout == out


def test_run_invalid_json_exit_code():
    code, _, err = rangecap.run("walk", "--group", "{oops")
    assert code == 2
    assert "invalid JSON" in err
