"""Synchronous time steps and runs to stabilization.

A step is: conflicts detected on the beginning-of-step grid, horizontal
moves, conflict heading flips, then vertical (track-switching) moves.
The phase functions below are thin wrappers over the compiled kernel so the
audited path and the fast Monte Carlo path cannot drift apart.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from . import _kernel
from .model import Configuration, Coord, ModelParams, validate

LOCAL, GLOBAL = "local", "global"
_MODES = {LOCAL: _kernel.LOCAL, GLOBAL: _kernel.GLOBAL}


class Conflict(NamedTuple):
    left: int
    right: int
    winner: Optional[int] = None


class HorizontalMove(NamedTuple):
    locust: int
    src: Coord
    dst: Coord


class ContestedCell(NamedTuple):
    cell: Coord
    winner: int
    loser: int


class VerticalMove(NamedTuple):
    locust: int
    src: Coord
    dst: Coord
    erratic: bool


@dataclass
class StepReport:
    time: int
    conflicts: List[Conflict] = field(default_factory=list)
    horizontal_moves: List[HorizontalMove] = field(default_factory=list)
    contested_cells: List[ContestedCell] = field(default_factory=list)
    vertical_moves: List[VerticalMove] = field(default_factory=list)
    erratic_rests: List[int] = field(default_factory=list)


@dataclass
class RunResult:
    t_stable: Optional[int]
    timed_out: bool
    total_conflicts: int
    final: Configuration
    reports: Optional[List[StepReport]] = None


def _policy_args(params: ModelParams):
    q = params.policy.q if params.policy.q is not None else 0.0
    return float(params.r), float(params.p), params.policy.code, float(q), bool(params.guard)


def detect_conflicts(config: Configuration) -> List[Conflict]:
    """Clockwise locust at (x, y) facing a counterclockwise one at (x+1, y)."""
    pairs = _kernel.detect_conflicts(config.grid, config.heading)
    return [Conflict(int(a), int(b)) for a, b in pairs]


def horizontal_phase(config: Configuration, rng: np.random.Generator, params: ModelParams):
    """Horizontal moves only; returns a new configuration and a partial report.

    Occupancy is judged on the grid as it stood at the start of the phase,
    contested empty cells go to a fair coin and all moves apply at once.
    """
    out = config.copy()
    rests, moves, contests = _kernel.horizontal_phase(
        out.grid, out.xs, out.ys, out.heading, float(params.r), rng
    )
    report = StepReport(time=config.time)
    report.erratic_rests = [int(a) for a in rests]
    report.horizontal_moves = [
        HorizontalMove(int(a), Coord(int(fx), int(y)), Coord(int(tx), int(y))) for a, fx, tx, y in moves
    ]
    report.contested_cells = [
        ContestedCell(Coord(int(x), int(y)), int(w), int(l)) for y, x, w, l in contests
    ]
    return out, report


def apply_conflict_flips(config: Configuration, conflicts: List[Conflict], rng: np.random.Generator):
    """Resolve each conflict by a fair coin. Returns (configuration, resolved conflicts)."""
    out = config.copy()
    pairs = np.array([(c.left, c.right) for c in conflicts], dtype=np.int32).reshape(-1, 2)
    winners = _kernel.apply_conflict_flips(pairs, out.heading, rng)
    resolved = [Conflict(c.left, c.right, int(w)) for c, w in zip(conflicts, winners)]
    return out, resolved


def vertical_eligibility(begin: Configuration, post: Configuration, a: int, params: Optional[ModelParams] = None) -> set:
    """Cells ``a`` may switch into under conditions (1)-(3) and the guard.

    Condition (1) is read from ``begin``; conditions (2) and (3) and the
    guard from ``post`` (the grid after horizontal moves and flips).
    """
    guard = True if params is None else params.guard
    begin._check_id(a)
    post._check_id(a)
    imminent = _kernel.imminent_conflict(begin.grid, begin.xs, begin.ys, begin.heading)
    x, y = int(post.xs[a]), int(post.ys[a])
    counts = post.track_counts().astype(np.int64)
    down, up = _kernel.eligible_sides(post.grid, post.heading, counts, a, x, y, imminent[a], guard)
    cells = set()
    if down:
        cells.add(Coord(x, y - 1))
    if up:
        cells.add(Coord(x, y + 1))
    return cells


def vertical_phase(begin: Configuration, config: Configuration, rng: np.random.Generator, params: ModelParams):
    """Track switches on the post-horizontal, post-flip ``config``."""
    out = config.copy()
    imminent = _kernel.imminent_conflict(begin.grid, begin.xs, begin.ys, begin.heading)
    r, p, policy, q, guard = _policy_args(params)
    vmoves = _kernel.vertical_phase(out.grid, out.xs, out.ys, out.heading, imminent, p, policy, q, guard, rng)
    report = StepReport(time=config.time)
    report.vertical_moves = _vertical_moves(vmoves)
    return out, report


def _vertical_moves(vmoves) -> List[VerticalMove]:
    return [VerticalMove(int(a), Coord(int(x), int(y)), Coord(int(x), int(ty)), bool(e)) for a, x, y, ty, e in vmoves]


def _step_in_place(config: Configuration, rng, args) -> StepReport:
    conflicts, winners, rests, moves, contests, vmoves = _kernel.step(
        config.grid, config.xs, config.ys, config.heading, *args, rng
    )
    report = StepReport(
        time=config.time,
        conflicts=[Conflict(int(a), int(b), int(w)) for (a, b), w in zip(conflicts, winners)],
        horizontal_moves=[
            HorizontalMove(int(a), Coord(int(fx), int(y)), Coord(int(tx), int(y))) for a, fx, tx, y in moves
        ],
        contested_cells=[ContestedCell(Coord(int(x), int(y)), int(w), int(l)) for y, x, w, l in contests],
        vertical_moves=_vertical_moves(vmoves),
        erratic_rests=[int(a) for a in rests],
    )
    config.time += 1
    return report


def step(config: Configuration, rng: np.random.Generator, params: ModelParams, check: bool = False):
    """Advance one time step. Returns (new configuration, StepReport)."""
    if check:
        validate(config, params)
    out = config.copy()
    report = _step_in_place(out, rng, _policy_args(params))
    return out, report


def is_stable(config: Configuration, mode: str = LOCAL) -> bool:
    return bool(_kernel.is_stable(config.grid, config.heading, _MODES[mode]))


def run_until_stable(
    config: Configuration,
    rng: np.random.Generator,
    params: ModelParams,
    mode: str = LOCAL,
    max_steps: int = 10**6,
    keep_reports: bool = False,
) -> RunResult:
    """Step until every track (local) or every locust (global) agrees on a heading.

    ``t_stable`` is the time at whose beginning the predicate first holds.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    mode_code = _MODES[mode]
    args = _policy_args(params)
    cur = config.copy()
    if not keep_reports:
        steps, conflicts, timed_out = _kernel.run(
            cur.grid, cur.xs, cur.ys, cur.heading, *args, mode_code, int(max_steps), rng
        )
        cur.time += int(steps)
        return RunResult(
            t_stable=None if timed_out else cur.time,
            timed_out=bool(timed_out),
            total_conflicts=int(conflicts),
            final=cur,
        )
    reports = []
    conflicts = 0
    taken = 0
    while True:
        if _kernel.is_stable(cur.grid, cur.heading, mode_code):
            return RunResult(cur.time, False, conflicts, cur, reports)
        if taken >= max_steps:
            return RunResult(None, True, conflicts, cur, reports)
        report = _step_in_place(cur, rng, args)
        conflicts += len(report.conflicts)
        reports.append(report)
        taken += 1


def iterate(config: Configuration, rng: np.random.Generator, params: ModelParams, steps: int):
    """Yield (configuration at step start, report) for ``steps`` steps."""
    cur = config.copy()
    args = _policy_args(params)
    for _ in range(steps):
        before = cur.copy()
        report = _step_in_place(cur, rng, args)
        yield before, report
    yield cur, None


def replay(initial: Configuration, reports: List[StepReport]) -> Configuration:
    """Re-apply recorded moves and flips without drawing any randomness."""
    cur = initial.copy()
    for report in reports:
        for mv in report.horizontal_moves:
            cur.grid[mv.src.y, mv.src.x] = -1
        for mv in report.horizontal_moves:
            cur.grid[mv.dst.y, mv.dst.x] = mv.locust
            cur.xs[mv.locust] = mv.dst.x
        for c in report.conflicts:
            loser = c.right if c.winner == c.left else c.left
            cur.heading[loser] = cur.heading[c.winner]
        for mv in report.vertical_moves:
            cur.grid[mv.src.y, mv.src.x] = -1
            cur.grid[mv.dst.y, mv.dst.x] = mv.locust
            cur.ys[mv.locust] = mv.dst.y
        cur.time += 1
    return cur


def sample_t_stable(
    config: Configuration,
    rng: np.random.Generator,
    params: ModelParams,
    trials: int,
    mode: str = LOCAL,
    max_steps: int = 10**6,
) -> np.ndarray:
    """Many independent runs from one start on a single stream.

    Returns an int array of rows (t_stable, conflicts, timed_out).
    """
    out = _kernel.sample_runs(
        config.grid, config.heading, config.xs, config.ys, *_policy_args(params),
        _MODES[mode], int(max_steps), int(trials), rng,
    )
    out[:, 0] += config.time
    return out


def sample_successors(config: Configuration, rng: np.random.Generator, params: ModelParams, trials: int) -> dict:
    """Counts of one-step successors of a single-track start, keyed by glyph string."""
    if config.k != 1:
        raise ValueError("successor sampling needs a single track")
    keys = _kernel.sample_successors(
        config.grid, config.heading, config.xs, config.ys, *_policy_args(params), int(trials), rng
    )
    values, counts = np.unique(keys, return_counts=True)
    out = {}
    for key, count in zip(values.tolist(), counts.tolist()):
        digits = []
        for _ in range(config.n):
            key, d = divmod(key, 3)
            digits.append(".><"[d])
        out["".join(reversed(digits))] = int(count)
    return out
