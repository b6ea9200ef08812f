"""Run configuration: TOML schema, validation and resolution into concrete objects.

Schema (all sections optional except where a command needs them)::

    seed = 0

    [system]            # preset name and/or inline fields; inline fields override
    preset = "dps-low"  # dps-low | dps-high | tmp-low | tmp-high
    # g1, g2, B, T1, T2, theta, sigma, tau (tmp-low), name
    # hfc = [[electron, I, a_mT], ...]

    [reference]         # low-field system for `mfe` and `noise-study`; same keys

    [method]
    name = "kraus"      # kraus | inherent | inherent+correction
    shots = 0           # 0 = exact density-matrix mode
    n_echo = 4
    correct_echo = false

    [qubit]             # emulated-qubit relaxation for the inherent methods
    T1 = 100.0
    T2 = 100.0
    t_id = "auto"       # or ns; "auto" aligns the identity count with the grid
    drift = 0.0
    gate_duration = 0.0

    [grid]
    start = 0.0
    stop = 60.0
    points = 121

    [noise_study]
    sigma = 75.0
    mu = 0.0
    trials = 1000
    ft = "tmp"          # tmp | dps, or a table {A, B, t1, t2, alpha}

    [output]
    csv = "out.csv"
    svg = ""

A file written by the CLI carries its resolved configuration as ``# ``
prefixed lines at the top; :func:`load_config` accepts such files directly.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised only on older interpreters
    import tomli as tomllib

from . import experiments as ex
from .circuits import CircuitError, NoiseModel
from .protocols import METHODS, MethodConfig, ProtocolError
from .spinsys import Coupling, SpinSystemError, SpinSystemSpec


class ConfigError(ValueError):
    pass


_SYSTEM_KEYS = {"preset", "g1", "g2", "B", "T1", "T2", "theta", "sigma", "tau", "hfc", "name"}
_TOP_KEYS = {"seed", "system", "reference", "method", "qubit", "grid", "noise_study", "output"}
_METHOD_KEYS = {"name", "shots", "n_echo", "correct_echo"}
_QUBIT_KEYS = {"T1", "T2", "t_id", "drift", "gate_duration"}
_GRID_KEYS = {"start", "stop", "points"}
_NOISE_KEYS = {"sigma", "mu", "trials", "ft"}
_OUTPUT_KEYS = {"csv", "svg"}


def _check_keys(section: str, table: Any, allowed: set) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"[{section}] must be a table")
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    return table


def _number(section: str, key: str, value, positive: bool = False, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if integer and (not isinstance(value, int)):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    if isinstance(value, float) and math.isnan(value):
        raise ConfigError(f"{section}.{key} is NaN")
    if positive and not value > 0:
        raise ConfigError(f"{section}.{key} must be positive, got {value!r}")
    return value


@dataclass(frozen=True)
class GridSpec:
    start: float = 0.0
    stop: float = 60.0
    points: int = 121

    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1) if self.points > 1 else self.stop - self.start


@dataclass
class RunConfig:
    seed: int
    system: SpinSystemSpec | None
    reference: SpinSystemSpec | None
    method: MethodConfig
    grid: GridSpec
    noise_study: ex.NoiseStudyConfig | None = None
    ft: ex.FtParams | None = None
    csv: str = ""
    svg: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    def times(self) -> np.ndarray:
        return self.grid.times()


# parsing ---------------------------------------------------------------------

def _system_from_table(section: str, table: dict) -> SpinSystemSpec:
    table = _check_keys(section, table, _SYSTEM_KEYS)
    name = table.get("preset")
    try:
        if name is not None:
            kwargs = {}
            if name == "tmp-low" and ("tau" in table or "T1" in table):
                key = "tau" if "tau" in table else "T1"
                kwargs["tau"] = _number(section, key, table[key], positive=True)
            if name == "tmp-high" and "T2" in table:
                kwargs["T2"] = _number(section, "T2", table["T2"], positive=True)
            if name.startswith("dps") and table.get("sigma"):
                kwargs["sigma"] = _number(section, "sigma", table["sigma"])
            base = ex.preset(name, **kwargs)
        else:
            missing = {"g1", "g2", "B"} - set(table)
            if missing:
                raise ConfigError(f"[{section}] needs a preset or inline {', '.join(sorted(missing))}")
            base = None
        fields = {}
        for key in ("g1", "g2", "B", "T1", "T2", "theta", "sigma"):
            if key in table:
                fields[key] = float(_number(section, key, table[key]))
        if "hfc" in table:
            hfc = table["hfc"]
            if not isinstance(hfc, list) or not all(isinstance(c, list) and len(c) == 3 for c in hfc):
                raise ConfigError(f"{section}.hfc must be a list of [electron, I, a] triples")
            fields["hfc"] = tuple(Coupling(int(c[0]), float(c[1]), float(c[2])) for c in hfc)
        if "tau" in table and name is None:
            tau = float(_number(section, "tau", table["tau"], positive=True))
            fields.setdefault("T1", tau)
            fields.setdefault("T2", tau)
        label = str(table.get("name", name or "inline"))
        if base is None:
            return SpinSystemSpec(name=label, **fields)
        merged = dict(g1=base.g1, g2=base.g2, B=base.B, hfc=base.hfc, T1=base.T1, T2=base.T2,
                      theta=base.theta, sigma=base.sigma)
        merged.update(fields)
        return SpinSystemSpec(name=label, **merged)
    except (ex.PresetError, SpinSystemError, TypeError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from None


def _auto_t_id(grid: GridSpec, noise_time: float, pair_time: float, n_echo: int) -> float:
    """Identity duration making the identity count an exact multiple of ``2 n_echo`` per grid step."""
    if math.isinf(noise_time) or not grid.step > 0 or math.isinf(pair_time):
        return 1.0
    return grid.step * noise_time / (2.0 * pair_time * 2 * n_echo)


def _qubit_noise(table: dict, grid: GridSpec, system: SpinSystemSpec | None, method: str, n_echo: int) -> NoiseModel:
    table = _check_keys("qubit", table, _QUBIT_KEYS)
    T1 = float(_number("qubit", "T1", table.get("T1", math.inf), positive=True))
    T2 = float(_number("qubit", "T2", table.get("T2", math.inf), positive=True))
    t_id = table.get("t_id", "auto")
    if t_id == "auto":
        pair = math.inf
        if system is not None and system.T1 is not None and system.T2 is not None:
            pair = system.T2 if method == "inherent+correction" else system.T1
        t_id = _auto_t_id(grid, 0.5 * (T1 + T2), pair, n_echo)
    else:
        t_id = float(_number("qubit", "t_id", t_id, positive=True))
    try:
        return NoiseModel(T1=T1, T2=T2, t_id=t_id,
                          drift=float(_number("qubit", "drift", table.get("drift", 0.0))),
                          gate_duration=float(_number("qubit", "gate_duration", table.get("gate_duration", 0.0))))
    except CircuitError as exc:
        raise ConfigError(f"[qubit]: {exc}") from None


def parse_config(data: dict) -> RunConfig:
    """Validate a parsed TOML document and build a :class:`RunConfig`."""
    _check_keys("top level", data, _TOP_KEYS)
    seed = _number("top level", "seed", data.get("seed", 0), integer=True)
    if seed < 0:
        raise ConfigError("seed must be non-negative")

    grid_t = _check_keys("grid", data.get("grid", {}), _GRID_KEYS)
    system = _system_from_table("system", data["system"]) if "system" in data else None
    reference = _system_from_table("reference", data["reference"]) if "reference" in data else None
    family = "tmp" if system is not None and system.has_hfc else "dps"
    grid = GridSpec(float(_number("grid", "start", grid_t.get("start", 0.0))),
                    float(_number("grid", "stop", grid_t.get("stop", float(ex.default_grid(family)[-1])))),
                    _number("grid", "points", grid_t.get("points", 121), positive=True, integer=True))
    if grid.start < 0 or grid.stop < grid.start:
        raise ConfigError("grid must satisfy 0 <= start <= stop")

    m = _check_keys("method", data.get("method", {}), _METHOD_KEYS)
    name = m.get("name", "kraus")
    if name not in METHODS:
        raise ConfigError(f"method.name must be one of {', '.join(METHODS)}, got {name!r}")
    shots = _number("method", "shots", m.get("shots", 0), integer=True)
    n_echo = _number("method", "n_echo", m.get("n_echo", 4), integer=True)
    correct_echo = m.get("correct_echo", False)
    if not isinstance(correct_echo, bool):
        raise ConfigError("method.correct_echo must be true or false")
    noise = _qubit_noise(data.get("qubit", {}), grid, system, name, n_echo)
    try:
        method = MethodConfig(name, shots, n_echo, noise, correct_echo)
    except ProtocolError as exc:
        raise ConfigError(f"[method]: {exc}") from None

    study = ft = None
    if "noise_study" in data:
        ns = _check_keys("noise_study", data["noise_study"], _NOISE_KEYS)
        ft_spec = ns.get("ft", family)
        try:
            if isinstance(ft_spec, str):
                ft = {"tmp": ex.FT_TMP, "dps": ex.FT_DPS}[ft_spec]
            else:
                ft = ex.FtParams(**_check_keys("noise_study.ft", ft_spec, {"A", "B", "t1", "t2", "alpha"}))
            study = ex.NoiseStudyConfig(float(_number("noise_study", "sigma", ns.get("sigma", ex.DETECTOR_SIGMA[family]))),
                                        float(_number("noise_study", "mu", ns.get("mu", 0.0))),
                                        _number("noise_study", "trials", ns.get("trials", 1000), positive=True, integer=True),
                                        seed)
        except KeyError:
            raise ConfigError(f"noise_study.ft must be 'tmp', 'dps' or a parameter table, got {ft_spec!r}") from None
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[noise_study]: {exc}") from None

    out = _check_keys("output", data.get("output", {}), _OUTPUT_KEYS)
    cfg = RunConfig(seed, system, reference, method, grid, study, ft,
                    str(out.get("csv", "")), str(out.get("svg", "")), data)
    return cfg


def _strip_comment_header(text: str) -> str:
    lines = text.splitlines()
    if lines and lines[0].startswith("#"):
        body = []
        for line in lines:
            if not line.startswith("#"):
                break
            body.append(line[2:] if line.startswith("# ") else line[1:])
        return "\n".join(body)
    return text


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return loads_config(text)


def loads_config(text: str) -> RunConfig:
    """Parse TOML text, or the ``# `` header of a CSV written by the CLI."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        try:
            data = tomllib.loads(_strip_comment_header(text))
        except tomllib.TOMLDecodeError:
            raise ConfigError(f"invalid TOML: {exc}") from None
        if not data:
            raise ConfigError(f"invalid TOML: {exc}") from None
    return parse_config(data)


# serialization ---------------------------------------------------------------

def system_to_table(spec: SpinSystemSpec) -> dict:
    table = {"name": spec.name or "inline", "g1": spec.g1, "g2": spec.g2, "B": spec.B}
    if spec.hfc:
        table["hfc"] = [[c.electron, c.spin, c.a] for c in spec.hfc]
    if spec.T1 is not None:
        table["T1"] = spec.T1
    if spec.T2 is not None:
        table["T2"] = spec.T2
    if spec.theta is not None:
        table["theta"] = spec.theta
    table["sigma"] = spec.sigma
    return table


def _noise_scalar(values: tuple) -> float | list:
    return values[0] if len(values) == 1 else list(values)


def resolved_dict(cfg: RunConfig, include_output: bool = True) -> dict:
    """Fully explicit document: reloading it reproduces ``cfg`` exactly."""
    n = cfg.method.noise
    doc = {"seed": cfg.seed}
    if cfg.system is not None:
        doc["system"] = system_to_table(cfg.system)
    if cfg.reference is not None:
        doc["reference"] = system_to_table(cfg.reference)
    doc["method"] = {"name": cfg.method.method, "shots": cfg.method.shots, "n_echo": cfg.method.n_echo,
                     "correct_echo": cfg.method.correct_echo}
    doc["qubit"] = {"T1": _noise_scalar(n.T1), "T2": _noise_scalar(n.T2), "t_id": n.t_id,
                    "drift": _noise_scalar(n.drift), "gate_duration": n.gate_duration}
    doc["grid"] = {"start": cfg.grid.start, "stop": cfg.grid.stop, "points": cfg.grid.points}
    if cfg.noise_study is not None:
        ft = cfg.ft
        doc["noise_study"] = {"sigma": cfg.noise_study.sigma, "mu": cfg.noise_study.mu,
                              "trials": cfg.noise_study.trials,
                              "ft": {"A": ft.A, "B": ft.B, "t1": ft.t1, "t2": ft.t2, "alpha": ft.alpha}}
    out = {k: v for k, v in (("csv", cfg.csv), ("svg", cfg.svg)) if v}
    if out and include_output:
        doc["output"] = out
    return doc


def dumps_config(cfg: RunConfig, include_output: bool = True) -> str:
    return tomli_w.dumps(resolved_dict(cfg, include_output))


def comment_header(cfg: RunConfig) -> str:
    """Resolved config as comment lines; output paths are left out so reruns are byte-identical."""
    text = dumps_config(cfg, include_output=False)
    return "".join(f"# {line}\n" if line else "#\n" for line in text.splitlines())
