"""Derived per-track structure: segments, compact sets, deadlocks, potentials.

All functions are read-only views of a :class:`Configuration`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import EmptyTrack, NotTwoSegments, WrongTails
from .model import Configuration, Heading


@dataclass(frozen=True)
class Segment:
    """Maximal run of same-heading locusts, ordered tail to head."""

    track: int
    members: Tuple[int, ...]
    heading: Heading

    @property
    def tail(self) -> int:
        return self.members[0]

    @property
    def head(self) -> int:
        return self.members[-1]

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class CompactSet:
    """Maximal compact set, ordered rear to front in its heading direction."""

    track: int
    members: Tuple[int, ...]
    heading: Heading

    @property
    def head(self) -> int:
        return self.members[-1]

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class Potentials:
    L1: int
    L2: int
    L3: int
    F: int
    c: int
    w: int

    @property
    def L(self) -> int:
        return self.L1 + self.L2 + self.L3


def _nonempty_track(config: Configuration, track: int) -> np.ndarray:
    ids = config.track(track)
    if len(ids) == 0:
        raise EmptyTrack(f"track {track} is empty")
    return ids


def _runs(config: Configuration, ids: np.ndarray, breaks: np.ndarray) -> List[List[int]]:
    """Split the cyclic id list at positions where ``breaks[i]`` separates i and i+1."""
    size = len(ids)
    if not breaks.any():
        return [list(ids)]
    start = (int(np.flatnonzero(breaks)[0]) + 1) % size
    runs, current = [], []
    for off in range(size):
        i = (start + off) % size
        current.append(int(ids[i]))
        if breaks[i]:
            runs.append(current)
            current = []
    return runs


def _orient(config: Configuration, track: int, run: List[int], heading: int) -> Tuple[int, ...]:
    # runs are listed in increasing x; counterclockwise ones walk the other way
    return tuple(run) if heading == 1 else tuple(reversed(run))


def extract_segments(config: Configuration, track: int) -> List[Segment]:
    """Partition a track into segments in ring order (increasing x of the run start).

    A heading-uniform track is one segment whose tail is its lowest id.
    """
    ids = _nonempty_track(config, track)
    h = config.heading[ids]
    breaks = h != np.roll(h, -1)
    if not breaks.any():
        tail = int(ids.min())
        heading = int(h[0])
        members = list(ids) if heading == 1 else list(ids[::-1])
        i = members.index(tail)
        members = members[i:] + members[:i]
        return [Segment(track, tuple(members), Heading(heading))]
    out = []
    for run in _runs(config, ids, breaks):
        heading = int(config.heading[run[0]])
        out.append(Segment(track, _orient(config, track, run, heading), Heading(heading)))
    return out


def segment_with_tail(config: Configuration, tail: int) -> Optional[Segment]:
    """The segment whose tail is ``tail``, or None once it has dissolved."""
    y = int(config.ys[tail])
    for seg in extract_segments(config, y):
        if seg.tail == tail:
            return seg
    return None


def segment_count(config: Configuration, track: int) -> int:
    ids = config.track(track)
    if len(ids) == 0:
        return 0
    h = config.heading[ids]
    changes = int(np.count_nonzero(h != np.roll(h, -1)))
    return max(changes, 1)


def is_track_stable(config: Configuration, track: int) -> bool:
    h = config.heading[config.track(track)]
    return bool(np.all(h == h[0])) if len(h) else True


def is_locally_stable(config: Configuration) -> bool:
    return all(is_track_stable(config, y) for y in range(config.k))


def is_globally_stable(config: Configuration) -> bool:
    return bool(np.all(config.heading == config.heading[0])) if config.m else True


def maximal_compact_partition(config: Configuration, track: int) -> List[CompactSet]:
    """Unique partition of a track into maximal compact sets."""
    ids = _nonempty_track(config, track)
    n = config.n
    x = config.xs[ids]
    h = config.heading[ids]
    gaps = (np.roll(x, -1) - x) % n
    if len(ids) == 1:
        gaps = np.array([n])
    breaks = (h != np.roll(h, -1)) | (gaps > 2)
    out = []
    for run in _runs(config, ids, breaks):
        heading = int(config.heading[run[0]])
        members = _orient(config, track, run, heading)
        if not breaks.any():
            # whole ring is one compact set; start after the lowest id's predecessor
            i = members.index(min(members))
            members = members[i:] + members[:i]
        out.append(CompactSet(track, members, Heading(heading)))
    return out


def detect_deadlocks(config: Configuration, track: int) -> List[Tuple[CompactSet, CompactSet]]:
    """Pairs (clockwise set, counterclockwise set) whose heads are one step apart."""
    if len(config.track(track)) == 0:
        return []
    sets = maximal_compact_partition(config, track)
    by_head = {s.head: s for s in sets}
    n = config.n
    out = []
    for s in sets:
        if s.heading is not Heading.CW:
            continue
        x = int(config.xs[s.head])
        other = config.grid[track, (x + 1) % n]
        if other >= 0 and config.heading[other] == -1 and int(other) in by_head:
            out.append((s, by_head[int(other)]))
    return out


def compute_potentials(config: Configuration, track: int, p_tail: int, q_tail: int) -> Potentials:
    """Gap-sum potentials of a track holding exactly two segments.

    ``p_tail`` must be the tail of the clockwise segment and ``q_tail`` the
    tail of the counterclockwise one.  Positions are measured clockwise
    from ``p_tail``, so every locust of the track lies in ``[0, d]``.
    """
    segs = extract_segments(config, track)
    if len(segs) != 2:
        raise NotTwoSegments(f"track {track} holds {len(segs)} segment(s)")
    tails = {s.heading: s.tail for s in segs}
    if tails.get(Heading.CW) != p_tail or tails.get(Heading.CCW) != q_tail:
        raise WrongTails(f"tails are {tails}, got p={p_tail}, q={q_tail}")
    n = config.n
    origin = int(config.xs[p_tail])
    sets = maximal_compact_partition(config, track)

    def span(s):
        u = [(int(config.xs[a]) - origin) % n for a in s.members]
        return min(u), max(u)

    cw = sorted((span(s) for s in sets if s.heading is Heading.CW))
    ccw = sorted((span(s) for s in sets if s.heading is Heading.CCW), reverse=True)
    L1 = sum(cw[i + 1][0] - cw[i][1] for i in range(len(cw) - 1))
    L2 = sum(ccw[i][0] - ccw[i + 1][1] for i in range(len(ccw) - 1))
    L3 = ccw[-1][0] - cw[-1][1]
    size = len(config.track(track))
    F = (L1 - (len(cw) - 1)) + (L2 - (len(ccw) - 1)) + size
    return Potentials(L1, L2, L3, F, len(cw), len(ccw))


def tail_distance(config: Configuration, p_tail: int, q_tail: int) -> int:
    return (int(config.xs[q_tail]) - int(config.xs[p_tail])) % config.n
