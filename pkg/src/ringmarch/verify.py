"""Property suites run by ``ringmarch verify`` and the acceptance tests.

Each suite returns a :class:`SuiteResult` with per-property check and
failure counts, so a single broken property is visible on its own.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy import stats

from . import engine, experiments, oracle
from .errors import InfeasibleGuard
from .model import Configuration, ModelParams, SwitchPolicy, make_rng
from .properties import RunMonitor

SUITES = ("invariants", "deadlock", "potentials", "oracle", "theorem1")
_CATEGORIES = {
    "invariants": ("step", "stable_tracks", "segment_count"),
    "deadlock": ("deadlock_persistence", "time_to_deadlock"),
    "potentials": ("F_monotone", "L_strict", "L_departure"),
}
# monitor counters that stand for several properties
_COUNTED_BY = {
    "step": _CATEGORIES["invariants"],
    "potentials": _CATEGORIES["potentials"],
}
_POLICIES = (SwitchPolicy.never(), SwitchPolicy.eager(), SwitchPolicy.probabilistic(0.5))


@dataclass
class SuiteResult:
    name: str
    checks: Dict[str, int] = field(default_factory=dict)
    failures: Dict[str, int] = field(default_factory=dict)
    examples: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def summary(self) -> str:
        parts = [f"{key}: {self.failures.get(key, 0)} failures" for key in sorted(set(self.checks) | set(self.failures))]
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({'; '.join(parts)})"


def random_structural_start(rng: np.random.Generator, index: int):
    """Start and parameters for run ``index``: alternating dense/sparse, cycling policies."""
    while True:
        n = int(rng.integers(4, 21))
        k = int(rng.integers(1, 7))
        try:
            if index % 2:
                config = experiments.gen_dense(n, k, rng)
            else:
                config = experiments.gen_sparse(n, k, rng)
        except InfeasibleGuard:
            continue
        return config, ModelParams(policy=_POLICIES[index % len(_POLICIES)])


def structural_runs(runs: int = 1000, seed: int = 0, max_steps: int = 20_000) -> Dict[str, SuiteResult]:
    """Monitor ``runs`` random multi-track runs (p = r = 0) at every step.

    Returns one result per suite name in ``invariants``, ``deadlock`` and
    ``potentials``; a run that hits ``max_steps`` counts as an invariant failure.
    """
    results = {name: SuiteResult(name) for name in _CATEGORIES}
    owner = {cat: name for name, cats in _CATEGORIES.items() for cat in cats}
    for i in range(runs):
        rng = make_rng(seed + i)
        config, params = random_structural_start(rng, i)
        monitor = RunMonitor(params)
        monitor.start(config)
        cur = config
        for _ in range(max_steps):
            if engine.is_stable(cur):
                break
            nxt, report = engine.step(cur, rng, params)
            monitor.observe(cur, report, nxt)
            cur = nxt
        else:
            monitor._fail("step", f"run {i} did not stabilize in {max_steps} steps")
        monitor.finish(cur)
        for counter, count in monitor.checked.items():
            for cat in _COUNTED_BY.get(counter, (counter,)):
                res = results[owner[cat]]
                res.checks[cat] = res.checks.get(cat, 0) + count
        for msg in monitor.violations:
            cat = msg[1 : msg.index("]")]
            res = results[owner[cat]]
            res.failures[cat] = res.failures.get(cat, 0) + 1
            if len(res.examples) < 20:
                res.examples.append(f"run {i} (seed {seed + i}): {msg}")
    for name, res in results.items():
        for cat in _CATEGORIES[name]:
            res.checks.setdefault(cat, 0)
            res.failures.setdefault(cat, 0)
    return results


ORACLE_STATES = (">.<.", "><..", ">.<..", ">><<.", "><><.", ">.<.<.", ">>.<.", "><.<..", ">.>.<<", ".><>.<")


def oracle_consistency(states=ORACLE_STATES, trials: int = 20_000, seed: int = 0, alpha: float = 1e-3) -> SuiteResult:
    """Chi-square test of simulated one-step successors against the exact distribution."""
    res = SuiteResult("oracle", checks={"one_step_distribution": 0}, failures={"one_step_distribution": 0})
    params = ModelParams()
    level = alpha / len(states)
    for i, state in enumerate(states):
        config = Configuration.from_locusts(
            len(state), 1, [(x, 0, 1 if g == ">" else -1) for x, g in enumerate(state) if g != "."]
        )
        exact = oracle.transition_distribution(state)
        seen = engine.sample_successors(config, make_rng(seed + i), params, trials)
        res.checks["one_step_distribution"] += 1
        unknown = set(seen) - set(exact)
        if unknown:
            res.failures["one_step_distribution"] += 1
            res.examples.append(f"{state}: impossible successors {sorted(unknown)}")
            continue
        keys = sorted(exact)
        if len(keys) == 1:
            continue
        observed = np.array([seen.get(s, 0) for s in keys], dtype=float)
        expected = np.array([exact[s] for s in keys]) * trials
        pvalue = stats.chisquare(observed, expected).pvalue
        if pvalue < level:
            res.failures["one_step_distribution"] += 1
            res.examples.append(f"{state}: chi-square p={pvalue:.2e}")
    return res


def theorem1_suite(samples: int = 10, trials: int = 200, seed: int = 0) -> SuiteResult:
    """Single-track mean stabilization time against m^2 + 2(n-m)."""
    rng = make_rng(seed)
    configs = []
    for _ in range(samples):
        n = int(rng.integers(3, 21))
        m = int(rng.integers(1, n + 1))
        configs.append(experiments.random_single_track(n, m, rng))
    rows = experiments.check_theorem1_bound(configs, trials=trials, seed=seed, workers=1)
    res = SuiteResult("theorem1", checks={"bound": len(rows)}, failures={"bound": 0})
    for row in rows:
        if not row["ok"]:
            res.failures["bound"] += 1
            res.examples.append(f"n={row['n']} m={row['m']}: mean {row['mean']:.2f} vs bound {row['bound']}")
    return res


def run_suites(names=SUITES, runs: int = 1000, seed: int = 0, trials: Optional[int] = None) -> List[SuiteResult]:
    out = []
    structural = None
    for name in names:
        if name in _CATEGORIES:
            if structural is None:
                structural = structural_runs(runs, seed)
            out.append(structural[name])
        elif name == "oracle":
            out.append(oracle_consistency(trials=trials or 20_000, seed=seed))
        elif name == "theorem1":
            out.append(theorem1_suite(trials=trials or 200, seed=seed))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
