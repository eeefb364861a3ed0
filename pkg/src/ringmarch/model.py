"""Lattice geometry, locust state and model parameters.

The cylinder has ``k`` tracks of ``n`` cells each.  Cell ``(x, y)`` is the
``x``-th location of track ``y``; ``x`` wraps modulo ``n`` while ``y`` is
confined to ``0 .. k-1`` (track 0 is the bottom track).

A :class:`Configuration` stores the occupancy grid as a ``(k, n)`` integer
array holding a locust id or ``-1`` for an empty cell, together with the
per-locust heading (+1 clockwise, -1 counterclockwise) and position arrays.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    BadDimensions,
    DifferentTracks,
    DuplicateOccupancy,
    EmptyTrack,
    UnderpopulatedTrack,
    UnknownLocust,
)

EMPTY = -1


class Heading(enum.IntEnum):
    CW = 1
    CCW = -1

    @property
    def flipped(self) -> "Heading":
        return Heading(-int(self))

    @property
    def glyph(self) -> str:
        return ">" if self is Heading.CW else "<"


class Coord(NamedTuple):
    x: int
    y: int

    def normalized(self, n: int) -> "Coord":
        return Coord(self.x % n, self.y)


class SwitchPolicy(NamedTuple):
    """When an eligible locust actually switches tracks.

    ``kind`` is one of ``"never"``, ``"eager"`` or ``"probabilistic"``;
    ``q`` is only meaningful for the probabilistic policy.
    """

    kind: str = "eager"
    q: Optional[float] = None

    @classmethod
    def never(cls) -> "SwitchPolicy":
        return cls("never")

    @classmethod
    def eager(cls) -> "SwitchPolicy":
        return cls("eager")

    @classmethod
    def probabilistic(cls, q: float) -> "SwitchPolicy":
        return cls("probabilistic", float(q))

    @property
    def code(self) -> int:
        return POLICY_CODES[self.kind]

    def __str__(self) -> str:
        if self.kind == "probabilistic":
            return f"probabilistic({self.q:g})"
        return self.kind


POLICY_CODES = {"never": 0, "eager": 1, "probabilistic": 2}


@dataclass(frozen=True)
class ModelParams:
    """Erratic-behaviour probabilities, switching policy and population guard.

    r : probability that a locust rests instead of moving horizontally.
    p : probability that a locust attempts an erratic vertical move.
    """

    r: float = 0.0
    p: float = 0.0
    policy: SwitchPolicy = field(default_factory=SwitchPolicy.eager)
    guard: bool = True

    def __post_init__(self):
        for name in ("r", "p"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} is not a probability")
        if self.policy.kind not in POLICY_CODES:
            raise ValueError(f"unknown switch policy {self.policy.kind!r}")
        if self.policy.kind == "probabilistic":
            if self.policy.q is None or not 0.0 <= self.policy.q <= 1.0:
                raise ValueError(f"probabilistic policy needs q in [0, 1], got {self.policy.q}")
        elif self.policy.q is not None:
            raise ValueError(f"policy {self.policy.kind!r} takes no q")


def make_rng(seed: int) -> np.random.Generator:
    """The package's random stream: numpy's PCG64 seeded with ``seed``."""
    return np.random.default_rng(seed)


class Configuration:
    """Full lattice state at the beginning of a time step.

    Parameters
    ----------
    grid : array_like, shape (k, n)
        Locust id per cell, ``-1`` when empty.
    heading : array_like, shape (m,)
        +1 for clockwise, -1 for counterclockwise, indexed by locust id.
    time : int
        Step counter.
    """

    def __init__(self, grid, heading, time: int = 0):
        self.grid = np.ascontiguousarray(grid, dtype=np.int32)
        self.heading = np.ascontiguousarray(heading, dtype=np.int8)
        self.time = int(time)
        if self.grid.ndim != 2:
            raise BadDimensions(f"grid must be 2-D, got shape {self.grid.shape}")
        m = len(self.heading)
        self.xs = np.full(m, -1, dtype=np.int32)
        self.ys = np.full(m, -1, dtype=np.int32)
        ys, xs = np.nonzero(self.grid >= 0)
        ids = self.grid[ys, xs]
        if ids.size and (ids.max() >= m):
            raise UnknownLocust(f"grid refers to locust {ids.max()} but only {m} headings given")
        seen = np.bincount(ids, minlength=m) if ids.size else np.zeros(m, dtype=int)
        if np.any(seen > 1):
            dup = int(np.flatnonzero(seen > 1)[0])
            raise DuplicateOccupancy(f"locust {dup} occupies more than one cell")
        self.xs[ids] = xs
        self.ys[ids] = ys

    @classmethod
    def from_locusts(cls, n: int, k: int, locusts: Iterable[tuple[int, int, int]], time: int = 0):
        """Build from ``(x, y, heading)`` triples; ids follow scan order (y, then x)."""
        locusts = [(x % n, y, int(h)) for x, y, h in locusts]
        if n < 1 or k < 1:
            raise BadDimensions(f"n={n}, k={k}")
        cells = {}
        for x, y, h in locusts:
            if not 0 <= y < k:
                raise BadDimensions(f"track {y} outside 0..{k - 1}")
            if h not in (1, -1):
                raise ValueError(f"heading must be +1 or -1, got {h}")
            if (x, y) in cells:
                raise DuplicateOccupancy(f"two locusts at {Coord(x, y)}")
            cells[(x, y)] = h
        grid = np.full((k, n), EMPTY, dtype=np.int32)
        heading = np.empty(len(cells), dtype=np.int8)
        for i, (x, y) in enumerate(sorted(cells, key=lambda c: (c[1], c[0]))):
            grid[y, x] = i
            heading[i] = cells[(x, y)]
        return cls(grid, heading, time)

    @property
    def k(self) -> int:
        return self.grid.shape[0]

    @property
    def n(self) -> int:
        return self.grid.shape[1]

    @property
    def m(self) -> int:
        return len(self.heading)

    def copy(self) -> "Configuration":
        return Configuration(self.grid.copy(), self.heading.copy(), self.time)

    def position(self, a: int) -> Coord:
        self._check_id(a)
        return Coord(int(self.xs[a]), int(self.ys[a]))

    def locust_at(self, c: Coord) -> Optional[int]:
        a = int(self.grid[c.y, c.x % self.n])
        return None if a == EMPTY else a

    def heading_of(self, a: int) -> Heading:
        self._check_id(a)
        return Heading(int(self.heading[a]))

    def track(self, y: int) -> np.ndarray:
        """Locust ids on track ``y`` in increasing x order."""
        row = self.grid[y]
        return row[row >= 0]

    def track_counts(self) -> np.ndarray:
        return (self.grid >= 0).sum(axis=1)

    def relabeled(self) -> "Configuration":
        """Same occupancy with ids reassigned in scan order."""
        ys, xs = np.nonzero(self.grid >= 0)
        old = self.grid[ys, xs]
        grid = np.full_like(self.grid, EMPTY)
        grid[ys, xs] = np.arange(len(old), dtype=np.int32)
        return Configuration(grid, self.heading[old], self.time)

    def _check_id(self, a: int) -> None:
        if not 0 <= a < self.m:
            raise UnknownLocust(f"no locust with id {a}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.time == other.time
            and np.array_equal(self.grid, other.grid)
            and np.array_equal(self.heading, other.heading)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Configuration(n={self.n}, k={self.k}, m={self.m}, time={self.time})"


def validate(config: Configuration, params: Optional[ModelParams] = None) -> None:
    """Raise if ``config`` breaks an occupancy or population invariant."""
    if config.n < 3 or config.k < 1:
        raise BadDimensions(f"need n >= 3 and k >= 1, got n={config.n}, k={config.k}")
    ids = config.grid[config.grid >= 0]
    if len(ids) != config.m or len(np.unique(ids)) != config.m:
        raise DuplicateOccupancy("occupancy grid does not hold every locust exactly once")
    coords = set()
    for a in range(config.m):
        c = Coord(int(config.xs[a]), int(config.ys[a]))
        if c in coords:
            raise DuplicateOccupancy(f"two locusts at {c}")
        coords.add(c)
        if config.grid[c.y, c.x] != a:
            raise DuplicateOccupancy(f"locust {a} is recorded at {c} but the cell holds {config.grid[c.y, c.x]}")
    if not np.all(np.abs(config.heading) == 1):
        raise ValueError("headings must be +1 or -1")
    guard = True if params is None else params.guard
    if guard:
        counts = config.track_counts()
        for y, count in enumerate(counts):
            if count < 2:
                raise UnderpopulatedTrack(f"track {y} holds {count} locust(s), need at least 2")


def _scan_from(config: Configuration, a: int, direction: int) -> int:
    x, y = int(config.xs[a]), int(config.ys[a])
    row = config.grid[y]
    n = config.n
    for i in range(1, n + 1):
        b = row[(x + direction * i) % n]
        if b != EMPTY:
            return int(b)
    raise EmptyTrack(f"track {y} is empty")  # unreachable: a itself is on the track


def front_of(config: Configuration, a: int) -> int:
    """First locust met from ``a`` stepping in its heading direction (``a`` itself if alone)."""
    config._check_id(a)
    return _scan_from(config, a, int(config.heading[a]))


def back_of(config: Configuration, a: int) -> int:
    """First locust met from ``a`` stepping against its heading."""
    config._check_id(a)
    return _scan_from(config, a, -int(config.heading[a]))


def dist_c(a: Coord, b: Coord, n: int) -> int:
    """Clockwise steps from ``a`` to ``b`` on the same track."""
    if a.y != b.y:
        raise DifferentTracks(f"{a} and {b} lie on different tracks")
    return (b.x - a.x) % n


def dist_cc(a: Coord, b: Coord, n: int) -> int:
    return dist_c(b, a, n)


def scan_order(config: Configuration) -> list[int]:
    """Locust ids sorted by track, then x."""
    return [int(a) for a in config.grid[config.grid >= 0]]


def heading_string(config: Configuration, y: int) -> str:
    """One track as a glyph string, ``x`` increasing left to right."""
    row = config.grid[y]
    return "".join("." if a == EMPTY else Heading(int(config.heading[a])).glyph for a in row)


def same_occupancy(a: Configuration, b: Configuration) -> bool:
    """Equal up to relabeling of locust ids."""
    if a.grid.shape != b.grid.shape:
        return False
    occ_a, occ_b = a.grid >= 0, b.grid >= 0
    if not np.array_equal(occ_a, occ_b):
        return False
    return np.array_equal(a.heading[a.grid[occ_a]], b.heading[b.grid[occ_b]])


def positions(config: Configuration, ids: Sequence[int]) -> list[Coord]:
    return [config.position(int(a)) for a in ids]
