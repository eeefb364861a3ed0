from ringmarch import engine, verify
from ringmarch.io import parse
from ringmarch.model import ModelParams, SwitchPolicy, make_rng
from ringmarch.properties import RunMonitor, check_step, in_deadlock


def test_check_step_flags_tampering():
    config = parse(">.<.....")
    params = ModelParams()
    after, report = engine.step(config, make_rng(0), params)
    assert check_step(config, report, after, params) == []
    tampered = after.copy()
    tampered.heading[0] = -tampered.heading[0]
    assert check_step(config, report, tampered, params)


def test_deadlock_persists_over_a_run(deadlocked):
    monitor = RunMonitor(ModelParams(policy=SwitchPolicy.never()))
    monitor.start(deadlocked)
    rng = make_rng(1)
    cur = deadlocked
    while not engine.is_stable(cur):
        nxt, report = engine.step(cur, rng, monitor.params)
        monitor.observe(cur, report, nxt)
        cur = nxt
    monitor.finish(cur)
    assert monitor.violations == []
    assert monitor.checked["deadlock_persistence"] > 0


def test_in_deadlock(deadlocked):
    assert in_deadlock(deadlocked, 0, [0, 1, 2], [3, 4, 5])
    assert not in_deadlock(deadlocked, 0, [0, 1], [3, 4, 5])


def test_gap_sum_can_stall_with_heads_in_conflict():
    # C1 = {0}, C2 = {4, 6}, W = {7}, L = 4 + 1. When the counterclockwise
    # locust wins the conflict, C1 and C2 advance together and the inner gap
    # stays at one, so L stays at 5; otherwise the track becomes uniform.
    config = parse(">...>.><..")
    params = ModelParams()
    outcomes = set()
    for seed in range(16):
        monitor = RunMonitor(params)
        monitor.start(config)
        after, report = engine.step(config, make_rng(seed), params)
        monitor.observe(config, report, after)
        if report.conflicts[0].winner == 3:
            assert monitor.failures == {"L_strict": 1}
        else:
            assert monitor.failures == {} and engine.is_stable(after)
        outcomes.add(report.conflicts[0].winner)
    assert outcomes == {2, 3}


def test_structural_runs_small():
    results = verify.structural_runs(runs=40, seed=3)
    assert results["invariants"].passed
    assert results["deadlock"].passed
    assert results["potentials"].failures["F_monotone"] == 0
    assert results["potentials"].failures["L_departure"] == 0
    assert results["invariants"].checks["step"] > 0


def test_oracle_suite():
    assert verify.oracle_consistency(trials=5000).passed
