import json

import pytest
from hypothesis import given, settings, strategies as st

from ringmarch import io
from ringmarch.errors import BadGlyph, ConfigFileError, RaggedLines
from ringmarch.experiments import ExperimentSpec, gen_two_segment
from ringmarch.model import Configuration, ModelParams, SwitchPolicy, same_occupancy

from conftest import STEP_LEFT


def test_empty_grid():
    config = io.parse("...\n...\n...")
    assert config.m == 0
    assert io.render(config) == "t=0\n...\n...\n...\n"


def test_top_line_is_highest_track():
    config = io.parse("t=4\n>..\n...\n..<")
    assert config.time == 4
    assert (int(config.xs[0]), int(config.ys[0]), int(config.heading[0])) == (2, 0, -1)
    assert (int(config.xs[1]), int(config.ys[1]), int(config.heading[1])) == (0, 2, 1)


def test_step_figure_round_trip(step_left):
    assert io.render(step_left) == STEP_LEFT


def test_bad_input():
    with pytest.raises(BadGlyph):
        io.parse(">x<")
    with pytest.raises(RaggedLines):
        io.parse(">..\n>.")
    with pytest.raises(RaggedLines):
        io.parse("t=0\n")


grids = st.integers(3, 12).flatmap(
    lambda n: st.lists(st.text(alphabet="..><", min_size=n, max_size=n), min_size=1, max_size=5)
)


@settings(max_examples=1000)
@given(grids, st.integers(0, 10**6))
def test_round_trip(lines, time):
    text = f"t={time}\n" + "\n".join(lines) + "\n"
    config = io.parse(text)
    assert io.render(config) == text
    again = io.parse(io.render(config))
    assert again == config


def test_relabeling_preserved_up_to_ids():
    config = Configuration.from_locusts(6, 1, [(4, 0, 1), (1, 0, -1)])
    assert same_occupancy(io.parse(io.render(config)), config)


def test_rows_form():
    assert io.parse_rows(">../..<") == io.parse(">..\n..<")


def test_trace_round_trip():
    frames = [io.parse(">.<."), io.parse("t=1\n.><."), io.parse("t=2\n.>>.")]
    text = io.render_trace(frames)
    assert "\n\n" in text
    assert io.parse_trace(text) == frames


def test_csv_one_row(tmp_path):
    path = tmp_path / "out.csv"
    io.write_csv([{"sweep": "x", "point": 1, "n": 4, "k": 1, "m": None, "mean_t_stable": 1.5, "timeouts": 0}], path)
    data = path.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert lines[0] == "sweep,point,n,k,m,density,policy,q,p,r,mode,trials,seed,mean_t_stable,stderr,timeouts"
    assert lines[1] == "x,1,4,1,,,,,,,,,,1.5,,0"
    assert len(lines) == 2


def test_csv_read_back(tmp_path):
    path = tmp_path / "out.csv"
    io.write_csv([{"n": 3, "mean_t_stable": float("nan")}], path)
    rows = io.read_csv(path)
    assert rows[0]["n"] == "3" and rows[0]["mean_t_stable"] == ""


def _write(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_config_round_trip(tmp_path):
    spec = ExperimentSpec(
        n=10, k=1, init="explicit", explicit=gen_two_segment(10, 4),
        params=ModelParams(r=0.1, p=0.2, policy=SwitchPolicy.probabilistic(0.3), guard=False),
        mode="global", trials=7, base_seed=3, max_steps=100,
    )
    loaded = io.load_config(_write(tmp_path, io.spec_to_dict(spec)))
    assert loaded.params == spec.params and loaded.explicit == spec.explicit
    assert (loaded.n, loaded.k, loaded.mode, loaded.trials, loaded.base_seed, loaded.max_steps) == (10, 1, "global", 7, 3, 100)


@pytest.mark.parametrize(
    "patch",
    [
        {"colour": "red"},
        {"init": {"type": "sparse", "shape": 2}},
        {"params": {"r": 1.5}},
        {"params": {"policy": {"type": "probabilistic"}}},
        {"params": {"policy": {"type": "eager", "q": 0.5}}},
        {"params": {"guard": "yes"}},
        {"mode": "sideways"},
        {"init": {"type": "hexagonal"}},
        {"trials": 0},
        {"n": "ten"},
    ],
)
def test_config_rejects(tmp_path, patch):
    data = {"n": 10, "k": 2, "init": {"type": "sparse"}}
    data.update(patch)
    with pytest.raises(ConfigFileError):
        io.load_config(_write(tmp_path, data))


def test_config_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigFileError):
        io.load_config(path)
