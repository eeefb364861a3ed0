import json

import pytest

from ringmarch import cli, io, verify


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_forced_conflict(capsys):
    code, out, _ = run(capsys, "run", "--n", "4", "--k", "1", "--init", "explicit", "--grid", "><..", "--seed", "7", "--mode", "local")
    assert code == 0 and out.splitlines()[0] == "t_stable=1"


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--n", "4", "--m", "2", "--grid", ">.<.")
    assert code == 0 and out.splitlines()[0] == "expected_t_stable=2.0"


def test_oracle_too_large(capsys):
    code, _, err = run(capsys, "oracle", "--n", "12", "--m", "6", "--grid", "><><><......", "--cap", "1000")
    assert code == 1 and "exceed" in err


def test_run_trace(tmp_path, capsys):
    trace = tmp_path / "trace.txt"
    code, out, _ = run(capsys, "run", "--n", "10", "--k", "2", "--init", "dense", "--seed", "3", "--trace", str(trace))
    assert code == 0
    frames = io.parse_trace(trace.read_text())
    t_stable = int(out.splitlines()[0].split("=")[1])
    assert len(frames) == t_stable + 1
    assert [f.time for f in frames] == list(range(t_stable + 1))


def test_run_generated_starts(capsys):
    for init in ("dense", "sparse"):
        code, out, _ = run(capsys, "run", "--n", "12", "--k", "3", "--init", init, "--seed", "1")
        assert code == 0 and out.startswith("t_stable=")
    code, out, _ = run(capsys, "run", "--n", "20", "--k", "1", "--init", "two_segment", "--m", "10", "--seed", "1")
    assert code == 0 and out.startswith("t_stable=")


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["run", "--bogus"], "--bogus"),
        (["run", "--n", "4", "--k", "1", "--init", "explicit"], "--grid"),
        (["run", "--grid", ">.<."], "--init explicit"),
        (["run", "--n", "10", "--k", "2", "--r", "2"], "probability"),
        (["run", "--n", "10", "--k", "2", "--policy", "probabilistic"], "--q"),
        (["run", "--n", "10", "--k", "2", "--q", "0.5"], "--q"),
        (["run", "--n", "4", "--k", "2", "--init", "explicit", "--grid", "><../....", "--mode", "local"], "track"),
        (["sweep", "d", "--out", "x.csv"], "column"),
        (["sweep", "a", "--trials", "0", "--out", "x.csv"], "--trials"),
        (["oracle", "--n", "4", "--m", "2", "--grid", ">x<."], "glyph"),
        ([], "required"),
    ],
)
def test_usage_errors(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert needle in err


def test_sweep_a(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, _ = run(capsys, "sweep", "a", "--density", "sparse", "--policy", "eager", "--trials", "20", "--seed", "1", "--out", str(out))
    assert code == 0
    rows = io.read_csv(out)
    assert len(rows) == 30 and [int(r["k"]) for r in rows] == list(range(1, 31))
    assert all(r["sweep"] == "fig4a" and r["timeouts"] == "0" for r in rows)


def test_sweep_c_custom_grid(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "sweep", "c", "--density", "dense", "--policy", "never", "--trials", "3", "--p-grid", "0.5,1.0", "--out", str(out))
    assert code == 0
    rows = io.read_csv(out)
    assert [r["p"] for r in rows] == ["0.5", "1.0"] and all(r["mode"] == "global" for r in rows)


def test_experiment(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "n": 10, "k": 2, "init": {"type": "dense"},
        "params": {"r": 0.0, "p": 0.0, "policy": {"type": "never"}, "guard": True},
        "mode": "local", "trials": 30, "seed": 4, "max_steps": 10000,
    }))
    out = tmp_path / "exp.csv"
    code, _, _ = run(capsys, "experiment", str(cfg), "--out", str(out))
    assert code == 0
    rows = io.read_csv(out)
    assert len(rows) == 1 and rows[0]["m"] == "10" and rows[0]["policy"] == "never" and rows[0]["trials"] == "30"


def test_experiment_bad_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 10, "k": 2, "init": {"type": "dense"}, "extra": 1}))
    code, _, err = run(capsys, "experiment", str(cfg), "--out", str(tmp_path / "x.csv"))
    assert code == 1 and "extra" in err


def test_verify_passing_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "invariants", "--suite", "oracle", "--runs", "20", "--trials", "5000")
    assert code == 0
    assert out.splitlines()[0].startswith("invariants: PASS")


def test_verify_failure_exit_code(capsys, monkeypatch):
    failing = verify.SuiteResult("potentials", checks={"F_monotone": 1}, failures={"F_monotone": 1})
    monkeypatch.setattr(verify, "run_suites", lambda *a, **k: [failing])
    code, out, _ = run(capsys, "verify")
    assert code == 2 and "FAIL" in out
