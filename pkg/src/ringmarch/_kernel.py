"""Compiled step kernel.

Every random draw happens here, in a fixed order, so that the audited
Python-level step and the compiled run loops consume identical streams.
Arrays are mutated in place; callers copy when they need snapshots.

Draw order within one step:
  1. erratic rests, one draw per locust (only when r > 0), scan order;
  2. contested empty cells, one coin each, scan order of the cell;
  3. conflicts, one coin each, scan order of the clockwise locust;
  4. vertical intents per locust in scan order of its post-horizontal cell:
     erratic draw (only when p > 0), then the policy coin (probabilistic
     policy only), then a side coin when both tracks are available;
  5. vertical contention, one coin per doubly claimed cell, scan order.
"""
import numpy as np
from numba import njit

NEVER, EAGER, PROBABILISTIC = 0, 1, 2
LOCAL, GLOBAL = 0, 1


@njit(cache=True)
def first_locust(grid, y, x, direction):
    """First occupied cell strictly after ``x`` in ``direction``; -1 if none."""
    n = grid.shape[1]
    for i in range(1, n + 1):
        a = grid[y, (x + direction * i) % n]
        if a >= 0:
            return a
    return -1


@njit(cache=True)
def detect_conflicts(grid, heading):
    k, n = grid.shape
    out = np.empty((k * n, 2), dtype=np.int32)
    c = 0
    for y in range(k):
        for x in range(n):
            a = grid[y, x]
            if a >= 0 and heading[a] == 1:
                b = grid[y, (x + 1) % n]
                if b >= 0 and heading[b] == -1:
                    out[c, 0] = a
                    out[c, 1] = b
                    c += 1
    return out[:c].copy()


@njit(cache=True)
def imminent_conflict(grid, xs, ys, heading):
    """Flag per locust: its front is not adjacent and heads the other way."""
    n = grid.shape[1]
    m = heading.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    for a in range(m):
        h = heading[a]
        f = first_locust(grid, ys[a], xs[a], h)
        if f != a and heading[f] != h and grid[ys[a], (xs[a] + h) % n] != f:
            out[a] = True
    return out


@njit(cache=True)
def horizontal_phase(grid, xs, ys, heading, r, rng):
    """Move every non-resting locust whose target was empty at step start.

    Returns (rests, moves, contests): ``moves`` rows are (id, from_x, to_x, y),
    ``contests`` rows are (y, x, winner, loser).
    """
    k, n = grid.shape
    m = heading.shape[0]
    resting = np.zeros(m, dtype=np.bool_)
    rests = np.empty(m, dtype=np.int32)
    nr = 0
    if r > 0.0:
        for y in range(k):
            for x in range(n):
                a = grid[y, x]
                if a >= 0 and rng.random() < r:
                    resting[a] = True
                    rests[nr] = a
                    nr += 1
    moves = np.empty((m, 4), dtype=np.int32)
    contests = np.empty((m, 4), dtype=np.int32)
    nm = 0
    nc = 0
    for y in range(k):
        for x in range(n):
            if grid[y, x] >= 0:
                continue
            left = grid[y, (x - 1) % n]
            right = grid[y, (x + 1) % n]
            cw = -1
            ccw = -1
            if left >= 0 and heading[left] == 1 and not resting[left]:
                cw = left
            if right >= 0 and heading[right] == -1 and not resting[right]:
                ccw = right
            mover = -1
            if cw >= 0 and ccw >= 0:
                if rng.random() < 0.5:
                    mover, loser = cw, ccw
                else:
                    mover, loser = ccw, cw
                contests[nc, 0] = y
                contests[nc, 1] = x
                contests[nc, 2] = mover
                contests[nc, 3] = loser
                nc += 1
            elif cw >= 0:
                mover = cw
            elif ccw >= 0:
                mover = ccw
            if mover >= 0:
                moves[nm, 0] = mover
                moves[nm, 1] = xs[mover]
                moves[nm, 2] = x
                moves[nm, 3] = y
                nm += 1
    for i in range(nm):
        grid[moves[i, 3], moves[i, 1]] = -1
    for i in range(nm):
        a = moves[i, 0]
        grid[moves[i, 3], moves[i, 2]] = a
        xs[a] = moves[i, 2]
    return rests[:nr].copy(), moves[:nm].copy(), contests[:nc].copy()


@njit(cache=True)
def apply_conflict_flips(conflicts, heading, rng):
    """Fair coin per conflict; the loser takes the winner's heading. Returns winners."""
    c = conflicts.shape[0]
    winners = np.empty(c, dtype=np.int32)
    for i in range(c):
        a = conflicts[i, 0]
        b = conflicts[i, 1]
        if rng.random() < 0.5:
            winners[i] = a
            heading[b] = heading[a]
        else:
            winners[i] = b
            heading[a] = heading[b]
    return winners


@njit(cache=True)
def can_enter(grid, heading, a, x, ty):
    """Conditions (2) and (3) for locust ``a`` entering ``(x, ty)``."""
    n = grid.shape[1]
    if grid[ty, x] >= 0:
        return False
    left = grid[ty, (x - 1) % n]
    if left >= 0 and heading[left] == 1:
        return False
    right = grid[ty, (x + 1) % n]
    if right >= 0 and heading[right] == -1:
        return False
    h = heading[a]
    f = first_locust(grid, ty, x, h)
    if f >= 0:
        if heading[f] != h:
            return False
        b = first_locust(grid, ty, x, -h)
        if heading[b] != h:
            return False
    return True


@njit(cache=True)
def eligible_sides(grid, heading, counts, a, x, y, imminent, guard):
    """(down, up) availability for a non-erratic switch of ``a`` at (x, y)."""
    k = grid.shape[0]
    if not imminent or (guard and counts[y] <= 2):
        return False, False
    down = y > 0 and can_enter(grid, heading, a, x, y - 1)
    up = y < k - 1 and can_enter(grid, heading, a, x, y + 1)
    return down, up


@njit(cache=True)
def vertical_phase(grid, xs, ys, heading, imminent, p, policy, q, guard, rng):
    """Track switches. Returns rows (id, x, from_y, to_y, erratic).

    Intents are formed against the post-horizontal grid, doubly claimed
    cells go to a fair coin, and winners are applied in scan order against
    the evolving grid after re-checking the guard and, for non-erratic
    movers, conditions (2) and (3).
    """
    k, n = grid.shape
    m = heading.shape[0]
    counts = np.zeros(k, dtype=np.int64)
    for y in range(k):
        for x in range(n):
            if grid[y, x] >= 0:
                counts[y] += 1
    want = np.empty((m, 4), dtype=np.int32)  # id, x, y, ty
    werr = np.zeros(m, dtype=np.bool_)
    nw = 0
    for y in range(k):
        for x in range(n):
            a = grid[y, x]
            if a < 0:
                continue
            erratic = False
            if p > 0.0:
                erratic = rng.random() < p
            if not erratic and policy == NEVER:
                continue
            if guard and counts[y] <= 2:
                continue
            if erratic:
                down = y > 0 and grid[y - 1, x] < 0
                up = y < k - 1 and grid[y + 1, x] < 0
            else:
                down, up = eligible_sides(grid, heading, counts, a, x, y, imminent[a], guard)
            if not (down or up):
                continue
            if not erratic and policy == PROBABILISTIC:
                if not rng.random() < q:
                    continue
            if down and up:
                ty = y - 1 if rng.random() < 0.5 else y + 1
            elif down:
                ty = y - 1
            else:
                ty = y + 1
            want[nw, 0] = a
            want[nw, 1] = x
            want[nw, 2] = y
            want[nw, 3] = ty
            werr[nw] = erratic
            nw += 1

    claim = np.full((k, n), -1, dtype=np.int32)
    dropped = np.zeros(nw, dtype=np.bool_)
    doubled = np.empty(nw, dtype=np.int64)
    nd = 0
    for i in range(nw):
        x = want[i, 1]
        ty = want[i, 3]
        if claim[ty, x] < 0:
            claim[ty, x] = i
        else:
            doubled[nd] = ty * n + x
            nd += 1
    if nd > 0:
        keys = np.sort(doubled[:nd])
        for j in range(nd):
            ty = keys[j] // n
            x = keys[j] % n
            first = claim[ty, x]
            second = -1
            for i in range(first + 1, nw):
                if want[i, 1] == x and want[i, 3] == ty:
                    second = i
                    break
            if rng.random() < 0.5:
                dropped[second] = True
            else:
                dropped[first] = True

    out = np.empty((nw, 5), dtype=np.int32)
    nv = 0
    for i in range(nw):
        if dropped[i]:
            continue
        a = want[i, 0]
        x = want[i, 1]
        y = want[i, 2]
        ty = want[i, 3]
        if grid[ty, x] >= 0:
            continue
        if guard and counts[y] <= 2:
            continue
        if not werr[i] and not can_enter(grid, heading, a, x, ty):
            continue
        grid[y, x] = -1
        grid[ty, x] = a
        ys[a] = ty
        counts[y] -= 1
        counts[ty] += 1
        out[nv, 0] = a
        out[nv, 1] = x
        out[nv, 2] = y
        out[nv, 3] = ty
        out[nv, 4] = 1 if werr[i] else 0
        nv += 1
    return out[:nv].copy()


@njit(cache=True)
def step(grid, xs, ys, heading, r, p, policy, q, guard, rng):
    """One full time step in place. Returns the audit arrays."""
    imminent = imminent_conflict(grid, xs, ys, heading)
    conflicts = detect_conflicts(grid, heading)
    rests, moves, contests = horizontal_phase(grid, xs, ys, heading, r, rng)
    winners = apply_conflict_flips(conflicts, heading, rng)
    vmoves = vertical_phase(grid, xs, ys, heading, imminent, p, policy, q, guard, rng)
    return conflicts, winners, rests, moves, contests, vmoves


@njit(cache=True)
def track_stable(grid, heading, y):
    n = grid.shape[1]
    h = 0
    for x in range(n):
        a = grid[y, x]
        if a >= 0:
            if h == 0:
                h = heading[a]
            elif heading[a] != h:
                return False
    return True


@njit(cache=True)
def is_stable(grid, heading, mode):
    if mode == GLOBAL:
        for a in range(1, heading.shape[0]):
            if heading[a] != heading[0]:
                return False
        return True
    for y in range(grid.shape[0]):
        if not track_stable(grid, heading, y):
            return False
    return True


@njit(cache=True)
def run(grid, xs, ys, heading, r, p, policy, q, guard, mode, max_steps, rng):
    """Step until stable. Returns (steps_taken, total_conflicts, timed_out)."""
    conflicts_total = 0
    t = 0
    while True:
        if is_stable(grid, heading, mode):
            return t, conflicts_total, False
        if t >= max_steps:
            return t, conflicts_total, True
        conflicts, winners, rests, moves, contests, vmoves = step(
            grid, xs, ys, heading, r, p, policy, q, guard, rng
        )
        conflicts_total += conflicts.shape[0]
        t += 1


@njit(cache=True)
def sample_runs(grid, heading, xs, ys, r, p, policy, q, guard, mode, max_steps, trials, rng):
    """Independent runs from one start sharing a single stream.

    Returns an array of rows (steps, conflicts, timed_out).
    """
    out = np.empty((trials, 3), dtype=np.int64)
    for i in range(trials):
        g = grid.copy()
        h = heading.copy()
        gx = xs.copy()
        gy = ys.copy()
        t, c, timed_out = run(g, gx, gy, h, r, p, policy, q, guard, mode, max_steps, rng)
        out[i, 0] = t
        out[i, 1] = c
        out[i, 2] = 1 if timed_out else 0
    return out


@njit(cache=True)
def encode_single_track(grid, heading):
    """Base-3 key of track 0: 0 empty, 1 clockwise, 2 counterclockwise."""
    n = grid.shape[1]
    key = 0
    for x in range(n):
        a = grid[0, x]
        d = 0
        if a >= 0:
            d = 1 if heading[a] == 1 else 2
        key = key * 3 + d
    return key


@njit(cache=True)
def sample_successors(grid, heading, xs, ys, r, p, policy, q, guard, trials, rng):
    """Keys of the one-step successors of a single-track start over many trials."""
    out = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        g = grid.copy()
        h = heading.copy()
        gx = xs.copy()
        gy = ys.copy()
        step(g, gx, gy, h, r, p, policy, q, guard, rng)
        out[i] = encode_single_track(g, h)
    return out
