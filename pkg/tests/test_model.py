import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringmarch.errors import (
    BadDimensions, DifferentTracks, DuplicateOccupancy, UnderpopulatedTrack, UnknownLocust,
)
from ringmarch.io import parse
from ringmarch.model import (
    Configuration, Coord, Heading, ModelParams, SwitchPolicy, back_of, dist_c, dist_cc, front_of, validate,
)


def test_step_figure_validates(step_left):
    validate(step_left, ModelParams())
    assert (step_left.n, step_left.k, step_left.m) == (8, 3, 8)


def test_duplicate_occupancy():
    grid = np.full((1, 4), -1)
    grid[0, 0] = 0
    grid[0, 1] = 0
    with pytest.raises(DuplicateOccupancy):
        Configuration(grid, [1, 1])
    with pytest.raises(DuplicateOccupancy):
        Configuration.from_locusts(4, 1, [(0, 0, 1), (4, 0, -1)])


def test_underpopulated_track_with_guard():
    config = Configuration.from_locusts(5, 2, [(0, 0, 1), (2, 0, 1), (1, 1, -1)])
    with pytest.raises(UnderpopulatedTrack, match="track 1"):
        validate(config, ModelParams())
    validate(config, ModelParams(guard=False))


def test_short_ring_rejected():
    with pytest.raises(BadDimensions):
        validate(Configuration.from_locusts(2, 1, [(0, 0, 1), (1, 0, 1)]), ModelParams())


def test_front_and_back_three_cells():
    config = parse(">.<")
    assert front_of(config, 0) == 1
    assert back_of(config, 0) == 1


def test_single_locust_is_its_own_front_and_back():
    config = parse(">....")
    assert front_of(config, 0) == 0
    assert back_of(config, 0) == 0


def test_front_wraps_around():
    config = parse(">...>...")
    assert front_of(config, 0) == 1
    assert front_of(config, 1) == 0


def test_two_locust_track_front_equals_back():
    config = parse(">..<.")
    for a in range(2):
        assert front_of(config, a) == back_of(config, a)


def test_unknown_locust():
    with pytest.raises(UnknownLocust):
        front_of(parse(">.<"), 5)


def test_distances():
    assert dist_c(Coord(0, 1), Coord(3, 1), 8) == 3
    assert dist_cc(Coord(0, 1), Coord(3, 1), 8) == 5
    assert dist_c(Coord(2, 0), Coord(2, 0), 8) == 0
    with pytest.raises(DifferentTracks):
        dist_c(Coord(0, 0), Coord(0, 1), 8)


@given(st.integers(3, 40), st.integers(0, 39), st.integers(0, 39))
def test_distances_sum_to_n(n, a, b):
    a, b = a % n, b % n
    if a != b:
        assert dist_c(Coord(a, 0), Coord(b, 0), n) + dist_cc(Coord(a, 0), Coord(b, 0), n) == n
    assert dist_cc(Coord(a, 0), Coord(b, 0), n) == dist_c(Coord(b, 0), Coord(a, 0), n)


@settings(max_examples=200)
@given(st.text(alphabet=".><", min_size=3, max_size=16))
def test_front_minimizes_directed_distance(track):
    config = parse(track)
    n = config.n
    for a in range(config.m):
        f = front_of(config, a)
        h = int(config.heading[a])
        others = [b for b in range(config.m) if b != a]
        if not others:
            assert f == a
            continue
        d = lambda b: ((int(config.xs[b]) - int(config.xs[a])) * h) % n
        assert d(f) == min(d(b) for b in others)
        if len(set(config.heading.tolist())) == 1 and config.m >= 2:
            assert back_of(config, f) == a


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(r=1.5)
    with pytest.raises(ValueError):
        ModelParams(policy=SwitchPolicy("probabilistic", None))
    with pytest.raises(ValueError):
        ModelParams(policy=SwitchPolicy("eager", 0.3))
    assert ModelParams().guard


def test_heading_glyphs():
    assert Heading.CW.glyph == ">" and Heading.CCW.glyph == "<"
    assert Heading.CW.flipped is Heading.CCW
