"""Runtime-checkable structural properties of simulated runs.

:func:`check_step` audits a single step against its report, and
:class:`RunMonitor` follows a run to check the multi-step properties:
deadlock persistence, the two-segment potentials and time-to-deadlock.
Every check returns human-readable violation strings rather than raising,
so a suite can count and report them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import analysis
from .engine import StepReport, replay
from .model import Configuration, ModelParams


def _post_horizontal(before: Configuration, report: StepReport) -> Configuration:
    partial = StepReport(
        time=report.time,
        conflicts=report.conflicts,
        horizontal_moves=report.horizontal_moves,
        contested_cells=report.contested_cells,
    )
    out = replay(before, [partial])
    out.time = before.time
    return out


def _neighbour(grid: np.ndarray, y: int, x: int, direction: int) -> int:
    n = grid.shape[1]
    for i in range(1, n + 1):
        a = grid[y, (x + direction * i) % n]
        if a >= 0:
            return int(a)
    return -1


def check_step(before: Configuration, report: StepReport, after: Configuration, params: ModelParams) -> List[str]:
    """Single-step invariants. ``after`` is the configuration the engine produced."""
    bad = []
    t = before.time
    n = before.n
    # one locust per cell, identities preserved
    ids = after.grid[after.grid >= 0]
    if len(ids) != before.m or sorted(ids.tolist()) != list(range(before.m)):
        bad.append(f"t={t}: locust ids not preserved")
    if after.m != before.m:
        bad.append(f"t={t}: locust count changed")
    # each locust in at most one conflict
    seen: Dict[int, int] = {}
    for c in report.conflicts:
        for a in (c.left, c.right):
            seen[a] = seen.get(a, 0) + 1
        if before.heading[c.left] != 1 or before.heading[c.right] != -1:
            bad.append(f"t={t}: conflict {c} has wrong headings")
        if (before.xs[c.right] - before.xs[c.left]) % n != 1 or before.ys[c.left] != before.ys[c.right]:
            bad.append(f"t={t}: conflict {c} is not adjacent")
    if any(v > 1 for v in seen.values()):
        bad.append(f"t={t}: a locust took part in two conflicts")
    # headings change only through lost conflicts
    losers = {c.right if c.winner == c.left else c.left for c in report.conflicts}
    changed = set(np.flatnonzero(before.heading != after.heading).tolist())
    if changed != losers:
        bad.append(f"t={t}: heading changes {sorted(changed)} differ from conflict losers {sorted(losers)}")
    # conflicting locusts never move horizontally
    movers = {mv.locust for mv in report.horizontal_moves}
    if movers & set(seen):
        bad.append(f"t={t}: conflicting locust moved horizontally")
    # horizontal targets empty at step start and distinct
    targets = [mv.dst for mv in report.horizontal_moves]
    if len(set(targets)) != len(targets):
        bad.append(f"t={t}: two horizontal moves share a target")
    for mv in report.horizontal_moves:
        if before.grid[mv.dst.y, mv.dst.x] >= 0:
            bad.append(f"t={t}: locust {mv.locust} moved into occupied {mv.dst}")
        if (mv.dst.x - mv.src.x) % n != before.heading[mv.locust] % n:
            bad.append(f"t={t}: locust {mv.locust} moved against its heading")
    # vertical moves, replayed in order on the post-horizontal grid
    post = _post_horizontal(before, report)
    grid = post.grid.copy()
    counts = (grid >= 0).sum(axis=1)
    for mv in report.vertical_moves:
        a, (x, y), ty = mv.locust, mv.src, mv.dst.y
        if abs(ty - y) != 1 or mv.dst.x != x:
            bad.append(f"t={t}: vertical move {mv} is not to an adjacent track")
            continue
        if grid[ty, x] >= 0:
            bad.append(f"t={t}: vertical move into occupied {mv.dst}")
        if params.guard and counts[y] <= 2:
            bad.append(f"t={t}: vertical move leaves track {y} with fewer than 2 locusts")
        if not mv.erratic:
            h = int(post.heading[a])
            front = _neighbour(before.grid, int(before.ys[a]), int(before.xs[a]), int(before.heading[a]))
            bx = int(before.xs[a])
            adjacent = before.grid[int(before.ys[a]), (bx + int(before.heading[a])) % n] == front
            if front == a or adjacent or before.heading[front] == before.heading[a]:
                bad.append(f"t={t}: non-erratic move of {a} without an imminent conflict")
            left, right = grid[ty, (x - 1) % n], grid[ty, (x + 1) % n]
            if (left >= 0 and post.heading[left] == 1) or (right >= 0 and post.heading[right] == -1):
                bad.append(f"t={t}: locust {a} entered {mv.dst} where a neighbour would step next")
            f = _neighbour(grid, ty, x, h)
            b = _neighbour(grid, ty, x, -h)
            if f >= 0 and (post.heading[f] != h or post.heading[b] != h):
                bad.append(f"t={t}: locust {a} entered {mv.dst} between opposite-heading neighbours")
        grid[y, x] = -1
        grid[ty, x] = a
        counts[y] -= 1
        counts[ty] += 1
    if not np.array_equal(grid, after.grid):
        bad.append(f"t={t}: replayed grid differs from the engine's")
    if params.guard and np.any(after.track_counts() < 2) and np.all(before.track_counts() >= 2):
        bad.append(f"t={t}: a track dropped below 2 locusts")
    return bad


def _compact_sequence(config: Configuration, track: int, members: List[int], heading: int) -> Optional[List[int]]:
    """Order ``members`` as a compact sequence on ``track`` or return None."""
    ids = [int(a) for a in config.track(track)]
    if not members or any(int(config.ys[a]) != track for a in members):
        return None
    if any(int(config.heading[a]) != heading for a in members):
        return None
    pos = {a: i for i, a in enumerate(ids)}
    size = len(ids)
    idx = sorted(pos[a] for a in members)
    if len(members) == size:
        start = idx[0]
    else:
        # the member indices must be cyclically contiguous
        start = None
        for i in idx:
            if (i - 1) % size not in idx:
                if start is not None:
                    return None
                start = i
    order = [ids[(start + j) % size] for j in range(len(members))]
    if set(order) != set(members):
        return None
    if heading == -1:
        order.reverse()
    n = config.n
    for a, b in zip(order, order[1:]):
        if ((int(config.xs[b]) - int(config.xs[a])) * heading) % n > 2:
            return None
    return order


def in_deadlock(config: Configuration, track: int, cw: List[int], ccw: List[int]) -> bool:
    x = _compact_sequence(config, track, cw, 1)
    y = _compact_sequence(config, track, ccw, -1)
    if x is None or y is None:
        return False
    return (int(config.xs[y[-1]]) - int(config.xs[x[-1]])) % config.n == 1


@dataclass
class _Watch:
    t0: int
    d: int
    p_tail: int
    q_tail: int
    resolved: bool = False


@dataclass
class RunMonitor:
    """Multi-step properties of a run with ``p = 0``."""

    params: ModelParams
    violations: List[str] = field(default_factory=list)
    failures: Dict[str, int] = field(default_factory=dict)
    watches: Dict[int, _Watch] = field(default_factory=dict)
    _prev_segments: Optional[List[int]] = None
    checked: Dict[str, int] = field(default_factory=dict)

    def _count(self, name: str) -> None:
        self.checked[name] = self.checked.get(name, 0) + 1

    def _fail(self, name: str, msg: str) -> None:
        self.failures[name] = self.failures.get(name, 0) + 1
        self.violations.append(f"[{name}] {msg}")

    def _two_segments(self, config: Configuration, y: int) -> Optional[Tuple[int, int]]:
        if len(config.track(y)) == 0:
            return None
        segs = analysis.extract_segments(config, y)
        if len(segs) != 2:
            return None
        tails = {int(s.heading): s.tail for s in segs}
        return tails[1], tails[-1]

    def start(self, config: Configuration) -> None:
        self._prev_segments = [analysis.segment_count(config, y) for y in range(config.k)]
        self._open_watches(config, [0] * config.k)

    def _open_watches(self, config: Configuration, previous: List[int]) -> None:
        for y in range(config.k):
            tails = self._two_segments(config, y)
            if tails and previous[y] != 2 and y not in self.watches:
                d = analysis.tail_distance(config, *tails)
                self.watches[y] = _Watch(config.time, d, *tails)
            if tails is None and y in self.watches and not self.watches[y].resolved:
                if analysis.is_track_stable(config, y):
                    self.watches[y].resolved = True

    def _settle_watches(self, config: Configuration) -> None:
        for y, w in self.watches.items():
            if w.resolved:
                continue
            stable = analysis.is_track_stable(config, y)
            tails = self._two_segments(config, y)
            deadlocked = False
            if tails == (w.p_tail, w.q_tail):
                deadlocked = analysis.compute_potentials(config, y, *tails).L == 1
            if stable or deadlocked:
                w.resolved = True
                self._count("time_to_deadlock")
            elif config.time > w.t0 + 3 * w.d:
                w.resolved = True
                self._fail(
                    "time_to_deadlock",
                    f"track {y}: two segments from t={w.t0} (d={w.d}) neither deadlocked nor stable by t={config.time}"
                )

    def observe(self, before: Configuration, report: StepReport, after: Configuration) -> None:
        """Check the transition ``before -> after``."""
        t = before.time
        k = before.k
        for msg in check_step(before, report, after, self.params):
            self._fail("step", msg)
        self._count("step")
        departures = [0] * k
        for mv in report.vertical_moves:
            departures[mv.src.y] += 1
        segs_after = [analysis.segment_count(after, y) for y in range(k)]
        if self.params.p == 0:
            for y in range(k):
                if analysis.is_track_stable(before, y) and not analysis.is_track_stable(after, y):
                    self._fail("stable_tracks", f"t={t}: stable track {y} became unstable")
                if segs_after[y] > self._prev_segments[y]:
                    self._fail(
                        "segment_count",
                        f"t={t}: track {y} segments rose {self._prev_segments[y]} -> {segs_after[y]}"
                    )
            for y in range(k):
                self._deadlock_persistence(before, after, y, t)
                self._potentials(before, after, y, t, departures[y])
        self._open_watches(after, self._prev_segments)
        self._prev_segments = segs_after
        self._settle_watches(after)

    def _deadlock_persistence(self, before, after, y, t) -> None:
        if len(before.track(y)) == 0:
            return
        for X, Y in analysis.detect_deadlocks(before, y):
            union = list(X.members) + list(Y.members)
            h = after.heading[union]
            self._count("deadlock_persistence")
            if np.all(h == h[0]):
                continue
            cw = [a for a in union if after.heading[a] == 1]
            ccw = [a for a in union if after.heading[a] == -1]
            if not in_deadlock(after, y, cw, ccw):
                self._fail("deadlock_persistence", f"t={t}: deadlock on track {y} between {X.members} and {Y.members} broke")

    def _potentials(self, before, after, y, t, departures) -> None:
        tails = self._two_segments(before, y)
        if tails is None or self._two_segments(after, y) != tails:
            return
        pb = analysis.compute_potentials(before, y, *tails)
        pa = analysis.compute_potentials(after, y, *tails)
        self._count("potentials")
        if pa.F > pb.F - departures:
            self._fail("F_monotone", f"t={t}: track {y} F went {pb.F} -> {pa.F} with {departures} departure(s)")
        if departures == 0 and pb.L > 1 and pa.L >= pb.L:
            self._fail("L_strict", f"t={t}: track {y} L did not decrease ({pb.L} -> {pa.L}, L3={pb.L3})")
        if departures > 0 and pa.L > pb.L + 2 * departures:
            self._fail("L_departure", f"t={t}: track {y} L rose {pb.L} -> {pa.L} with {departures} departure(s)")

    def finish(self, final: Configuration) -> None:
        """Close watches at the end of a run; a stable end resolves them."""
        for y, w in self.watches.items():
            if not w.resolved and analysis.is_track_stable(final, y):
                w.resolved = True
                self._count("time_to_deadlock")
