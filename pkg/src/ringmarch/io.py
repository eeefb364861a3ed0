"""Text formats: ASCII grids, trajectory traces, sweep CSVs and run-config files.

An ASCII grid is a ``t=<step>`` header followed by one line per track, top
track first. Each line holds ``n`` glyphs: ``.`` for an empty cell, ``>`` for
a clockwise locust and ``<`` for a counterclockwise one.
"""
from __future__ import annotations

import csv
import json
import math
from typing import Iterable, List

from .engine import GLOBAL, LOCAL
from .errors import BadGlyph, ConfigFileError, IoError, RaggedLines
from .experiments import DENSE, EXPLICIT, SPARSE, TWO_SEGMENT, ExperimentSpec
from .model import Configuration, ModelParams, SwitchPolicy

CSV_FIELDS = (
    "sweep", "point", "n", "k", "m", "density", "policy", "q", "p", "r",
    "mode", "trials", "seed", "mean_t_stable", "stderr", "timeouts",
)
_GLYPHS = {".": 0, ">": 1, "<": -1}


def render(config: Configuration) -> str:
    """ASCII grid of ``config``, newline-terminated."""
    lines = [f"t={config.time}"]
    for y in reversed(range(config.k)):
        row = config.grid[y]
        lines.append("".join("." if a < 0 else (">" if config.heading[a] == 1 else "<") for a in row))
    return "\n".join(lines) + "\n"


def parse(text: str) -> Configuration:
    """Inverse of :func:`render`; ids follow scan order. The header is optional."""
    lines = [line.rstrip("\r") for line in text.strip("\n").split("\n")]
    time = 0
    if lines and lines[0].startswith("t="):
        try:
            time = int(lines[0][2:])
        except ValueError:
            raise BadGlyph(f"bad header {lines[0]!r}") from None
        lines = lines[1:]
    if not lines or not lines[0]:
        raise RaggedLines("grid has no tracks")
    n = len(lines[0])
    locusts = []
    k = len(lines)
    for row, line in enumerate(lines):
        if len(line) != n:
            raise RaggedLines(f"line {row + 1} has length {len(line)}, expected {n}")
        y = k - 1 - row
        for x, glyph in enumerate(line):
            if glyph not in _GLYPHS:
                raise BadGlyph(f"unknown glyph {glyph!r} at line {row + 1}, column {x + 1}")
            if glyph != ".":
                locusts.append((x, y, _GLYPHS[glyph]))
    return Configuration.from_locusts(n, k, locusts, time=time)


def parse_rows(spec: str) -> Configuration:
    """Grid given on one line with tracks separated by ``/``, top track first."""
    return parse("\n".join(spec.split("/")))


def render_trace(configs: Iterable[Configuration]) -> str:
    """Grid blocks separated by blank lines."""
    return "\n".join(render(c) for c in configs)


def parse_trace(text: str) -> List[Configuration]:
    blocks = [b for b in text.split("\n\n") if b.strip()]
    return [parse(b) for b in blocks]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def write_csv(rows: Iterable[dict], path) -> None:
    """Write sweep rows under the fixed header; missing values become empty fields."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for row in rows:
                writer.writerow([_cell(row.get(name)) for name in CSV_FIELDS])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> List[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


_TOP_KEYS = {"n", "k", "init", "params", "mode", "trials", "seed", "max_steps"}
_INIT_KEYS = {"type", "density", "m", "grid"}
_PARAM_KEYS = {"r", "p", "policy", "guard"}
_POLICY_KEYS = {"type", "q"}


def _check_keys(obj, allowed, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigFileError(f"{where} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigFileError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    return obj


def _number(obj: dict, key: str, kind, default=None, where: str = ""):
    value = obj.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float) if kind is float else int):
        raise ConfigFileError(f"{where}{key} must be {'a number' if kind is float else 'an integer'}")
    return kind(value)


def spec_from_dict(data: dict) -> ExperimentSpec:
    """Validate a decoded run-config object and build an :class:`ExperimentSpec`."""
    _check_keys(data, _TOP_KEYS, "config")
    for key in ("n", "k", "init"):
        if key not in data:
            raise ConfigFileError(f"missing key {key!r}")
    n = _number(data, "n", int)
    k = _number(data, "k", int)
    init = _check_keys(data["init"], _INIT_KEYS, "init")
    kind = init.get("type")
    if kind not in (DENSE, SPARSE, TWO_SEGMENT, EXPLICIT):
        raise ConfigFileError(f"init.type must be dense, sparse, two_segment or explicit, got {kind!r}")
    density = _number(init, "density", float, where="init.")
    if density is not None and not 0.0 <= density <= 1.0:
        raise ConfigFileError(f"init.density={density} is not in [0, 1]")
    m = _number(init, "m", int, where="init.")
    explicit = None
    if kind == EXPLICIT:
        if not isinstance(init.get("grid"), str):
            raise ConfigFileError("explicit init needs a grid string")
        explicit = parse_rows(init["grid"])
        if (explicit.n, explicit.k) != (n, k):
            raise ConfigFileError(f"grid is {explicit.k}x{explicit.n}, config says {k}x{n}")
    params_obj = _check_keys(data.get("params", {}), _PARAM_KEYS, "params")
    policy_obj = _check_keys(params_obj.get("policy", {"type": "eager"}), _POLICY_KEYS, "params.policy")
    guard = params_obj.get("guard", True)
    if not isinstance(guard, bool):
        raise ConfigFileError("params.guard must be true or false")
    mode = data.get("mode", LOCAL)
    if mode not in (LOCAL, GLOBAL):
        raise ConfigFileError(f"mode must be local or global, got {mode!r}")
    try:
        policy = SwitchPolicy(policy_obj.get("type", "eager"), _number(policy_obj, "q", float, where="policy."))
        params = ModelParams(
            r=_number(params_obj, "r", float, 0.0, "params."),
            p=_number(params_obj, "p", float, 0.0, "params."),
            policy=policy,
            guard=guard,
        )
        return ExperimentSpec(
            n=n,
            k=k,
            init=kind,
            params=params,
            mode=mode,
            trials=_number(data, "trials", int, 1000),
            base_seed=_number(data, "seed", int, 0),
            max_steps=_number(data, "max_steps", int, 10**6),
            density=density,
            m=m,
            explicit=explicit,
        )
    except ConfigFileError:
        raise
    except ValueError as exc:
        raise ConfigFileError(str(exc)) from exc


def load_config(path) -> ExperimentSpec:
    """Read a JSON run-config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigFileError(f"{path}: {exc}") from exc
    return spec_from_dict(data)


def spec_to_dict(spec: ExperimentSpec) -> dict:
    """JSON-ready form of ``spec``; inverse of :func:`spec_from_dict`."""
    init: dict = {"type": spec.init}
    if spec.density is not None:
        init["density"] = spec.density
    if spec.m is not None:
        init["m"] = spec.m
    if spec.explicit is not None:
        init["grid"] = "/".join(render(spec.explicit).split("\n")[1:-1])
    policy: dict = {"type": spec.params.policy.kind}
    if spec.params.policy.q is not None:
        policy["q"] = spec.params.policy.q
    return {
        "n": spec.n,
        "k": spec.k,
        "init": init,
        "params": {"r": spec.params.r, "p": spec.params.p, "policy": policy, "guard": spec.params.guard},
        "mode": spec.mode,
        "trials": spec.trials,
        "seed": spec.base_seed,
        "max_steps": spec.max_steps,
    }

