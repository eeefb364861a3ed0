"""Exact expectations for tiny single-track instances, and random-walk references.

The one-step dynamics here are written from scratch on glyph strings and
share no code with the simulation kernel, so agreement between the two is
a genuine cross-check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, List

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BadBarriers, NonpositiveSize, NotSingleTrack, StateSpaceTooLarge
from .model import Configuration, heading_string

DEFAULT_STATE_CAP = 10**5


@dataclass
class OracleResult:
    expected_t_stable: float
    state_count: int
    expectations: Dict[str, float]


def is_absorbing(state: str) -> bool:
    return not ("<" in state and ">" in state)


def enumerate_states(n: int, m: int) -> List[str]:
    """Every placement of ``m`` headed locusts on a ring of ``n`` cells."""
    states = []
    for cells in itertools.combinations(range(n), m):
        for heads in itertools.product("><", repeat=m):
            s = ["."] * n
            for x, g in zip(cells, heads):
                s[x] = g
            states.append("".join(s))
    return states


def transition_distribution(state: str) -> Dict[str, float]:
    """Successor states of one synchronous step with their probabilities."""
    n = len(state)
    conflicts = [x for x in range(n) if state[x] == ">" and state[(x + 1) % n] == "<"]
    contested = [x for x in range(n) if state[x] == "." and state[x - 1] == ">" and state[(x + 1) % n] == "<"]
    outcomes: Dict[str, float] = {}
    total = 2 ** (len(conflicts) + len(contested))
    for bits in itertools.product((0, 1), repeat=len(contested) + len(conflicts)):
        contest_bits = dict(zip(contested, bits[: len(contested)]))
        nxt = ["."] * n
        moved = set()
        for x in range(n):
            if state[x] != ".":
                continue
            from_left = state[x - 1] == ">"
            from_right = state[(x + 1) % n] == "<"
            if from_left and from_right:
                src = x - 1 if contest_bits[x] == 0 else (x + 1) % n
            elif from_left:
                src = x - 1
            elif from_right:
                src = (x + 1) % n
            else:
                continue
            src %= n
            nxt[x] = state[src]
            moved.add(src)
        for x in range(n):
            if state[x] != "." and x not in moved:
                nxt[x] = state[x]
        # conflicting locusts never move, so their cells are unchanged
        for x, bit in zip(conflicts, bits[len(contested):]):
            winner = state[x] if bit == 0 else state[(x + 1) % n]
            nxt[x] = winner
            nxt[(x + 1) % n] = winner
        key = "".join(nxt)
        outcomes[key] = outcomes.get(key, 0.0) + 1.0 / total
    return outcomes


def _start_string(start) -> str:
    if isinstance(start, Configuration):
        if start.k != 1:
            raise NotSingleTrack(f"oracle handles k=1 only, got k={start.k}")
        return heading_string(start, 0)
    return str(start)


def exact_expected_stabilization(n: int, m: int, start, cap: int = DEFAULT_STATE_CAP) -> OracleResult:
    """Expected time to a heading-uniform track from ``start`` (k=1, r=p=0)."""
    s0 = _start_string(start)
    if len(s0) != n or sum(ch != "." for ch in s0) != m:
        raise ValueError(f"start {s0!r} does not match n={n}, m={m}")
    size = comb(n, m) * 2**m
    if size > cap:
        raise StateSpaceTooLarge(f"{size} states exceed the cap of {cap}")
    states = enumerate_states(n, m)
    index = {s: i for i, s in enumerate(states)}
    transient = [s for s in states if not is_absorbing(s)]
    tindex = {s: i for i, s in enumerate(transient)}
    rows, cols, vals = [], [], []
    for s in transient:
        i = tindex[s]
        rows.append(i)
        cols.append(i)
        vals.append(1.0)
        for nxt, prob in transition_distribution(s).items():
            j = tindex.get(nxt)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(-prob)
    expectations = {s: 0.0 for s in states}
    if transient:
        A = sp.csc_matrix((vals, (rows, cols)), shape=(len(transient), len(transient)))
        t = spla.spsolve(A, np.ones(len(transient)))
        t = np.atleast_1d(t)
        for s, value in zip(transient, t):
            expectations[s] = float(value)
    return OracleResult(expectations[s0], len(index), expectations)


def gamblers_ruin_expected(a: int, b: int) -> int:
    """Expected conflicts until one of two deadlocked segments of sizes a, b vanishes."""
    if a < 1 or b < 1:
        raise NonpositiveSize(f"segment sizes must be positive, got {a}, {b}")
    return a * b


def multi_walk_max_absorption(k_walks: int, n: int, start: int, trials: int, rng: np.random.Generator):
    """Mean and standard error of the time until all ``k_walks`` walks hit 0 or 2n."""
    if not 0 <= start <= 2 * n or n < 1:
        raise BadBarriers(f"start {start} outside [0, {2 * n}]")
    if trials < 1 or k_walks < 1:
        raise ValueError("trials and k_walks must be positive")
    pos = np.full((trials, k_walks), start, dtype=np.int64)
    alive = (pos > 0) & (pos < 2 * n)
    finish = np.zeros(trials, dtype=np.int64)
    live_trials = np.flatnonzero(alive.any(axis=1))
    t = 0
    while live_trials.size:
        t += 1
        sub = pos[live_trials]
        sub_alive = alive[live_trials]
        steps = rng.integers(0, 2, size=sub.shape, dtype=np.int64) * 2 - 1
        sub += steps * sub_alive
        sub_alive &= (sub > 0) & (sub < 2 * n)
        pos[live_trials] = sub
        alive[live_trials] = sub_alive
        done = ~sub_alive.any(axis=1)
        finish[live_trials[done]] = t
        live_trials = live_trials[~done]
    mean = float(finish.mean())
    stderr = float(finish.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr
