"""Initial-configuration generators, Monte Carlo trials and sweep drivers."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .engine import GLOBAL, LOCAL, run_until_stable
from .errors import InfeasibleGuard, OddM, TooFull
from .model import Configuration, ModelParams, SwitchPolicy, make_rng

DENSE, SPARSE, TWO_SEGMENT, EXPLICIT = "dense", "sparse", "two_segment", "explicit"
FIG4_P_GRID = (0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0)
_MAX_RESAMPLES = 10_000


def _with_headings(n: int, k: int, flat_cells: np.ndarray, rng: np.random.Generator) -> Configuration:
    flat_cells = np.sort(flat_cells)
    grid = np.full(k * n, -1, dtype=np.int32)
    grid[flat_cells] = np.arange(len(flat_cells), dtype=np.int32)
    heading = np.where(rng.random(len(flat_cells)) < 0.5, 1, -1).astype(np.int8)
    return Configuration(grid.reshape(k, n), heading)


def dense_count(n: int, k: int, density: float = 0.5) -> int:
    return int(math.floor(density * n * k))


def sparse_count(n: int, k: int, density: float = 0.1) -> int:
    """Fewest locusts a sparse start can hold."""
    return max(int(math.floor(density * n * k)), 2 * k)


def gen_dense(n: int, k: int, rng: np.random.Generator, density: float = 0.5) -> Configuration:
    """``floor(density*n*k)`` locusts on uniform distinct cells, fair-coin headings.

    Placements leaving a track with fewer than two locusts are redrawn.
    """
    m = dense_count(n, k, density)
    if n < 3 or m < 2 * k:
        raise InfeasibleGuard(f"cannot seat 2 locusts per track with n={n}, k={k}, m={m}")
    for _ in range(_MAX_RESAMPLES):
        cells = rng.choice(n * k, size=m, replace=False)
        if np.all(np.bincount(cells // n, minlength=k) >= 2):
            return _with_headings(n, k, cells, rng)
    raise InfeasibleGuard(f"no guard-satisfying placement found for n={n}, k={k}")


def gen_sparse(n: int, k: int, rng: np.random.Generator, density: float = 0.1) -> Configuration:
    """``floor(density*n*k)`` uniform locusts, then each short track topped up to two.

    The top-up draws uniformly among the free cells of the deficient track,
    so the final count is ``floor(density*n*k)`` plus the total shortfall.
    """
    if n < 3:
        raise InfeasibleGuard(f"n={n} is too short for the model")
    cells = rng.choice(n * k, size=int(math.floor(density * n * k)), replace=False)
    counts = np.bincount(cells // n, minlength=k)
    extra = []
    for y in np.flatnonzero(counts < 2):
        free = np.setdiff1d(np.arange(y * n, (y + 1) * n), cells)
        extra.append(rng.choice(free, size=2 - counts[y], replace=False))
    return _with_headings(n, k, np.concatenate([cells, *extra]), rng)


def gen_two_segment(n: int, m: int) -> Configuration:
    """Two back-to-back blocks of m/2 locusts whose heads face an empty arc of n-m cells."""
    if m % 2:
        raise OddM(f"m={m} must be even")
    if m >= n:
        raise TooFull(f"m={m} leaves no empty cell on a ring of {n}")
    half = m // 2
    locusts = [(x, 0, 1) for x in range(half)] + [(-1 - i, 0, -1) for i in range(half)]
    return Configuration.from_locusts(n, 1, locusts)


@dataclass(frozen=True)
class ExperimentSpec:
    n: int
    k: int
    init: str = SPARSE
    params: ModelParams = field(default_factory=ModelParams)
    mode: str = LOCAL
    trials: int = 1000
    base_seed: int = 0
    max_steps: int = 10**6
    density: Optional[float] = None
    m: Optional[int] = None
    explicit: Optional[Configuration] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.init not in (DENSE, SPARSE, TWO_SEGMENT, EXPLICIT):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == EXPLICIT and self.explicit is None:
            raise ValueError("explicit init needs a configuration")
        if self.init == TWO_SEGMENT and self.m is None:
            raise ValueError("two_segment init needs m")
        if self.mode not in (LOCAL, GLOBAL):
            raise ValueError(f"unknown mode {self.mode!r}")

    def locust_count(self) -> Optional[int]:
        """Locust count when the start type fixes it; sparse starts vary per trial."""
        if self.init == DENSE:
            return dense_count(self.n, self.k, self.density or 0.5)
        if self.init == SPARSE:
            return None
        if self.init == TWO_SEGMENT:
            return self.m
        return self.explicit.m


@dataclass
class ExperimentResult:
    mean_t_stable: float
    stderr: float
    timeouts: int
    trials: int
    mean_conflicts: float
    conflicts_stderr: float
    mean_m: float
    per_trial: Optional[List[Tuple[int, Optional[int], int, int]]] = None

    def ci95(self) -> Tuple[float, float]:
        return self.mean_t_stable - 1.96 * self.stderr, self.mean_t_stable + 1.96 * self.stderr


def initial_configuration(spec: ExperimentSpec, rng: np.random.Generator) -> Configuration:
    if spec.init == DENSE:
        return gen_dense(spec.n, spec.k, rng, spec.density or 0.5)
    if spec.init == SPARSE:
        return gen_sparse(spec.n, spec.k, rng, spec.density or 0.1)
    if spec.init == TWO_SEGMENT:
        return gen_two_segment(spec.n, spec.m)
    return spec.explicit.copy()


def run_trial(spec: ExperimentSpec, seed: int) -> Tuple[int, Optional[int], int, int]:
    """One seeded trial: (seed, t_stable or None, total conflicts, locust count)."""
    rng = make_rng(seed)
    config = initial_configuration(spec, rng)
    result = run_until_stable(config, rng, spec.params, spec.mode, spec.max_steps)
    return seed, result.t_stable, result.total_conflicts, config.m


def _run_chunk(args):
    spec, seeds = args
    return [run_trial(spec, s) for s in seeds]


def worker_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get("RING_MARCH_THREADS")
    workers = requested or os.cpu_count() or 1
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, workers)


def _mean_stderr(values: np.ndarray) -> Tuple[float, float]:
    if values.size == 0:
        return float("nan"), float("nan")
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return mean, stderr


def monte_carlo(spec: ExperimentSpec, workers: Optional[int] = None, keep_trials: bool = False) -> ExperimentResult:
    """Run ``spec.trials`` independent trials; trial i uses seed ``base_seed + i``.

    Results are sorted by seed before aggregation, so the worker count never
    changes the output.
    """
    seeds = [spec.base_seed + i for i in range(spec.trials)]
    workers = worker_count(workers)
    if workers == 1 or spec.trials < 2 * workers:
        rows = _run_chunk((spec, seeds))
    else:
        chunks = [seeds[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for part in pool.map(_run_chunk, [(spec, c) for c in chunks]) for row in part]
    rows.sort(key=lambda row: row[0])
    finished = np.array([row[1] for row in rows if row[1] is not None], dtype=float)
    conflicts = np.array([row[2] for row in rows if row[1] is not None], dtype=float)
    mean, stderr = _mean_stderr(finished)
    cmean, cstderr = _mean_stderr(conflicts)
    return ExperimentResult(
        mean_t_stable=mean,
        stderr=stderr,
        timeouts=len(rows) - finished.size,
        trials=spec.trials,
        mean_conflicts=cmean,
        conflicts_stderr=cstderr,
        mean_m=float(np.mean([row[3] for row in rows])),
        per_trial=rows if keep_trials else None,
    )


def _policy(name: str) -> SwitchPolicy:
    return SwitchPolicy.eager() if name == "eager" else SwitchPolicy.never()


def fig4_points(column: str, p_grid: Sequence[float] = FIG4_P_GRID):
    """(point value, n, k, p, mode) for each point of a Figure-4 column."""
    if column == "a":
        return [(k, 30, k, 0.0, LOCAL) for k in range(1, 31)]
    if column == "b":
        return [(n, n, 5, 0.0, LOCAL) for n in range(1, 61)]
    if column == "c":
        return [(p, 30, 5, p, GLOBAL) for p in p_grid]
    raise ValueError(f"unknown column {column!r}")


def fig4_spec(
    n: int,
    k: int,
    density: str,
    policy: str,
    p: float = 0.0,
    mode: str = LOCAL,
    trials: int = 1000,
    seed: int = 0,
    max_steps: int = 10**6,
) -> ExperimentSpec:
    """One Figure-4 point. Tracks start with two locusts each but may thin out."""
    params = ModelParams(r=0.0, p=p, policy=_policy(policy), guard=False)
    return ExperimentSpec(
        n=n, k=k, init=density, params=params, mode=mode, trials=trials, base_seed=seed, max_steps=max_steps
    )


def sweep_fig4(
    column: str,
    density: str,
    policy: str,
    trials: int = 1000,
    seed: int = 0,
    max_steps: int = 10**6,
    workers: Optional[int] = None,
    p_grid: Sequence[float] = FIG4_P_GRID,
) -> List[dict]:
    """One CSV row per sweep point. Infeasible points report every trial as a timeout."""
    rows = []
    for point, n, k, p, mode in fig4_points(column, p_grid):
        spec = fig4_spec(n, k, density, policy, p, mode, trials, seed, max_steps)
        row = spec_row(spec, sweep=f"fig4{column}", point=point)
        try:
            if n < 3:
                raise InfeasibleGuard(f"n={n} is too short")
            initial_configuration(spec, make_rng(seed))
        except InfeasibleGuard:
            row.update(mean_t_stable=None, stderr=None, timeouts=trials)
            rows.append(row)
            continue
        rows.append(result_row(spec, monte_carlo(spec, workers), sweep=f"fig4{column}", point=point))
    return rows


def result_row(spec: ExperimentSpec, result: ExperimentResult, sweep: str = "experiment", point="") -> dict:
    """CSV row for a finished experiment; sparse starts report their mean locust count."""
    row = spec_row(spec, sweep, point)
    if row["m"] is None:
        row["m"] = result.mean_m
    mean = None if math.isnan(result.mean_t_stable) else result.mean_t_stable
    stderr = None if math.isnan(result.stderr) else result.stderr
    row.update(mean_t_stable=mean, stderr=stderr, timeouts=result.timeouts)
    return row


def spec_row(spec: ExperimentSpec, sweep: str = "experiment", point="") -> dict:
    m = spec.locust_count() if spec.init != SPARSE else None
    return {
        "sweep": sweep,
        "point": point,
        "n": spec.n,
        "k": spec.k,
        "m": m,
        "density": spec.init,
        "policy": spec.params.policy.kind,
        "q": spec.params.policy.q,
        "p": spec.params.p,
        "r": spec.params.r,
        "mode": spec.mode,
        "trials": spec.trials,
        "seed": spec.base_seed,
    }


def theorem1_bound(n: int, m: int) -> int:
    return m * m + 2 * (n - m)


def mn_bound(n: int, m: int) -> float:
    """Local-stability bound ``3/2 mn + pi^2/24 m^2`` with the constant the argument supports."""
    return 1.5 * m * n + math.pi ** 2 / 24 * m * m


def check_theorem1_bound(samples: Sequence[Configuration], trials: int = 1000, seed: int = 0, workers=None):
    """Empirical mean + 3 stderr against m^2 + 2(n-m) for single-track starts.

    ``samples`` are configurations (k=1). Returns one dict per sample with
    its bound, mean, stderr, margin and verdict. ``ok3`` applies the same
    test to :func:`mn_bound`.
    """
    report = []
    for i, config in enumerate(samples):
        spec = ExperimentSpec(
            n=config.n, k=1, init=EXPLICIT, explicit=config, trials=trials, base_seed=seed + i * trials,
            params=ModelParams(policy=SwitchPolicy.never()),
        )
        result = monte_carlo(spec, workers)
        bound = theorem1_bound(config.n, config.m)
        upper = result.mean_t_stable + 3 * result.stderr
        report.append(
            {
                "n": config.n,
                "m": config.m,
                "bound": bound,
                "mean": result.mean_t_stable,
                "stderr": result.stderr,
                "margin": bound - upper,
                "ok": upper <= bound and result.timeouts == 0,
                "bound3": mn_bound(config.n, config.m),
                "ok3": upper <= mn_bound(config.n, config.m) and result.timeouts == 0,
            }
        )
    return report


def random_single_track(n: int, m: int, rng: np.random.Generator) -> Configuration:
    cells = rng.choice(n, size=m, replace=False)
    return _with_headings(n, 1, cells, rng)


def with_policy(spec: ExperimentSpec, policy: SwitchPolicy) -> ExperimentSpec:
    return replace(spec, params=replace(spec.params, policy=policy))
