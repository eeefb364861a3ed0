import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringmarch import analysis
from ringmarch.errors import EmptyTrack, NotTwoSegments, WrongTails
from ringmarch.io import parse, parse_rows
from ringmarch.model import Heading


def members(config, track):
    return [s.members for s in analysis.extract_segments(config, track)]


def test_wraparound_joins_segments():
    # the trailing '>' continues the leading '>>' across the seam; a ring
    # always carries an even number of heading changes
    config = parse(">><.<.>")
    segs = analysis.extract_segments(config, 0)
    assert len(segs) == 2
    cw = next(s for s in segs if s.heading is Heading.CW)
    assert cw.members == (4, 0, 1)
    assert cw.tail == 4 and cw.head == 1
    ccw = next(s for s in segs if s.heading is Heading.CCW)
    assert ccw.members == (3, 2)


def test_uniform_track_is_one_segment():
    config = parse(".>.>>..>")
    segs = analysis.extract_segments(config, 0)
    assert len(segs) == 1 and segs[0].tail == 0 and set(segs[0].members) == {0, 1, 2, 3}


def test_step_figure_segments(step_left):
    assert [analysis.segment_count(step_left, y) for y in range(3)] == [1, 2, 2]
    top = analysis.extract_segments(step_left, 2)
    assert sorted(s.members for s in top) == [(5, 6), (7,)]


def test_empty_track():
    config = parse_rows("....../>.<...")
    with pytest.raises(EmptyTrack):
        analysis.extract_segments(config, 1)
    with pytest.raises(EmptyTrack):
        analysis.maximal_compact_partition(config, 1)
    assert analysis.segment_count(config, 1) == 0


def test_segment_with_tail():
    config = parse(">><<..")
    assert analysis.segment_with_tail(config, 0).members == (0, 1)
    assert analysis.segment_with_tail(config, 1) is None


def test_stability_predicates():
    both = parse_rows(">.>./<.<.")
    assert analysis.is_locally_stable(both) and not analysis.is_globally_stable(both)
    uniform = parse_rows(">.>./>..>")
    assert analysis.is_locally_stable(uniform) and analysis.is_globally_stable(uniform)
    mixed = parse_rows("><../>..>")
    assert not analysis.is_track_stable(mixed, 1)
    assert not analysis.is_locally_stable(mixed) and not analysis.is_globally_stable(mixed)


def test_compact_distance_two_and_three():
    assert len(analysis.maximal_compact_partition(parse(">.>....."), 0)) == 1
    sets = analysis.maximal_compact_partition(parse(">..>...."), 0)
    assert sorted(len(s) for s in sets) == [1, 1]


def test_potential_figure(potential_track):
    sets = analysis.maximal_compact_partition(potential_track, 0)
    assert sorted((s.heading, len(s)) for s in sets) == [(-1, 2), (-1, 2), (1, 2), (1, 2)]
    pot = analysis.compute_potentials(potential_track, 0, 0, 7)
    assert (pot.L1, pot.L2, pot.L3, pot.L) == (3, 3, 1, 7)
    # (3 - 1) + (3 - 1) + 8 locusts, evaluated by hand from the gap-sum form
    assert pot.F == 12
    assert (pot.c, pot.w) == (2, 2)


def test_potentials_of_adjacent_segments():
    pot = analysis.compute_potentials(parse(">><<...."), 0, 0, 3)
    assert pot.L == 1 and pot.L3 == 1


def test_potentials_preconditions():
    with pytest.raises(NotTwoSegments):
        analysis.compute_potentials(parse(">.>...."), 0, 0, 1)
    with pytest.raises(WrongTails):
        analysis.compute_potentials(parse(">><<...."), 0, 1, 3)


def test_deadlock_pair(deadlocked):
    pairs = analysis.detect_deadlocks(deadlocked, 0)
    assert len(pairs) == 1
    cw, ccw = pairs[0]
    assert cw.members == (0, 1, 2) and ccw.members == (5, 4, 3)


def test_deadlock_simple_cases():
    assert analysis.detect_deadlocks(parse(">.>.>..."), 0) == []
    pairs = analysis.detect_deadlocks(parse("><...."), 0)
    assert [(a.members, b.members) for a, b in pairs] == [((0,), (1,))]


def _rotate(track: str, s: int) -> str:
    return track[s:] + track[:s]


@settings(max_examples=150)
@given(st.text(alphabet="..><", min_size=3, max_size=14).filter(lambda t: t.strip(".")), st.integers(0, 13))
def test_partition_independent_of_rotation(track, shift):
    shift %= len(track)
    a = parse(track)
    b = parse(_rotate(track, shift))

    def canon(config, offset):
        return {
            (int(s.heading), frozenset((int(config.xs[m]) + offset) % config.n for m in s.members))
            for s in analysis.maximal_compact_partition(config, 0)
        }

    assert canon(a, 0) == canon(b, shift)
    partition = analysis.maximal_compact_partition(a, 0)
    assert sorted(m for s in partition for m in s.members) == list(range(a.m))


@settings(max_examples=150)
@given(st.text(alphabet="..><", min_size=3, max_size=14).filter(lambda t: t.strip(".")))
def test_segments_partition_track(track):
    config = parse(track)
    segs = analysis.extract_segments(config, 0)
    assert sorted(m for s in segs for m in s.members) == list(range(config.m))
    assert len(segs) == analysis.segment_count(config, 0)
    for s in segs:
        assert np.all(config.heading[list(s.members)] == int(s.heading))
