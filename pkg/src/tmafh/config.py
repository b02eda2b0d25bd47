"""Run configuration: a flat TOML file of dotted keys.

Grammar (a TOML subset)::

    # comment
    plan.f_c = 2.5e9
    geometry.convention = "one_based"
    simulation.ebn0_db = [0, 1, 2]

Only the keys in :data:`SCHEMA` are accepted.  Missing keys take the
defaults of the 4-element, 4-FSK, 6-slot case.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .array import CONVENTIONS, ArrayGeometry
from .freqplan import FrequencyPlan
from .link import LinkBudget
from .waveform import efficiency

_FLOAT, _INT, _STR, _FLOATS = "float", "int", "str", "float list"


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _pow2(x):
    return x >= 2 and not x & (x - 1)


# key -> (kind, default, check, message)
SCHEMA: Dict[str, Tuple[str, Any, Any, str]] = {
    "plan.f_c": (_FLOAT, 2.5e9, _pos, "must be > 0"),
    "plan.delta_fsk": (_FLOAT, 50e3, _pos, "must be > 0"),
    "plan.M": (_INT, 4, _pow2, "must be a power of two >= 2"),
    "plan.K": (_INT, 6, lambda x: x >= 1, "must be >= 1"),
    "plan.L": (_INT, 4, lambda x: x >= 1, "must be >= 1"),
    "plan.T_s": (_FLOAT, 1e-3, _pos, "must be > 0"),
    "geometry.N": (_INT, 4, lambda x: x >= 1, "must be >= 1"),
    "geometry.spacing": (_FLOAT, 0.5, _pos, "must be > 0 (wavelengths)"),
    "geometry.convention": (_STR, "zero_based", lambda x: x in CONVENTIONS,
                            f"must be one of {', '.join(CONVENTIONS)}"),
    "geometry.positions": (_FLOATS, [], lambda x: all(b > a for a, b in zip(x, x[1:])),
                           "must be strictly increasing"),
    "steering.theta0_deg": (_FLOAT, 30.0, lambda x: -90 <= x <= 90, "must be in [-90, 90]"),
    "simulation.seed": (_INT, 42, _nonneg, "must be >= 0"),
    "simulation.samples_per_period": (_INT, 6 * 1024, lambda x: x >= 6 and x % 6 == 0,
                                      "must be a positive multiple of 6"),
    "simulation.q_max": (_INT, 97, lambda x: x >= 1, "must be >= 1"),
    "simulation.ebn0_db": (_FLOATS, [float(x) for x in range(13)], lambda x: len(x) > 0,
                           "must be a nonempty list"),
    "simulation.n_trials": (_INT, 10_000, lambda x: x >= 1000, "must be >= 1000"),
    "simulation.sample_rate": (_FLOAT, 0.0, _nonneg, "must be >= 0 (0 selects automatically)"),
    "simulation.workers": (_INT, 1, lambda x: x >= 1, "must be >= 1"),
    "simulation.n_bits": (_INT, 64, _nonneg, "must be >= 0"),
    "budget.mux": (_FLOAT, 0.7, _nonneg, "must be >= 0 dB"),
    "budget.mixer": (_FLOAT, 4.5, _nonneg, "must be >= 0 dB"),
    "budget.bpf": (_FLOAT, 2.0, _nonneg, "must be >= 0 dB"),
    "budget.vps": (_FLOAT, 4.0, _nonneg, "must be >= 0 dB"),
    "budget.spdt": (_FLOAT, 0.5, _nonneg, "must be >= 0 dB"),
    "budget.tma_efficiency": (_FLOAT, efficiency(), lambda x: 0 < x <= 1, "must be in (0, 1]"),
    "pattern.m": (_INT, 1, lambda x: x >= 1, "must be >= 1"),
    "pattern.k": (_INT, 2, lambda x: x >= 1, "must be >= 1"),
    "pattern.step_deg": (_FLOAT, 0.05, _pos, "must be > 0"),
    "delays.k": (_INT, 2, _nonneg, "must be >= 0 (0 lists every slot)"),
    "timeline.m": (_INT, 1, lambda x: x >= 1, "must be >= 1"),
    "timeline.k": (_INT, 1, lambda x: x >= 1, "must be >= 1"),
    "timeline.window_s": (_FLOAT, 0.0, _nonneg, "must be >= 0 (0 selects one period)"),
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _flatten(d: Mapping, prefix: str = "") -> Dict[str, Any]:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _coerce(key: str, kind: str, value: Any):
    if kind == _FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return value
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if kind == _STR:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if not isinstance(value, list):
        raise ConfigError(key, f"expected a list of numbers, got {value!r}")
    return [_coerce(key, _FLOAT, v) for v in value]


@dataclass(frozen=True)
class RunConfig:
    values: Mapping[str, Any]

    def __getitem__(self, key):
        return self.values[key]

    @property
    def plan(self) -> FrequencyPlan:
        v = self.values
        return FrequencyPlan(v["plan.f_c"], v["plan.delta_fsk"], v["plan.M"],
                             v["plan.K"], v["plan.L"], v["plan.T_s"])

    @property
    def geometry(self) -> ArrayGeometry:
        v = self.values
        if v["geometry.convention"] == "custom":
            return ArrayGeometry(tuple(v["geometry.positions"]), "custom")
        return ArrayGeometry.uniform(v["geometry.N"], v["geometry.spacing"],
                                     v["geometry.convention"])

    @property
    def theta0(self) -> float:
        return math.radians(self.values["steering.theta0_deg"])

    @property
    def budget(self) -> LinkBudget:
        v = self.values
        return LinkBudget(v["budget.mux"], v["budget.mixer"], v["budget.bpf"],
                          v["budget.vps"], v["budget.spdt"], v["budget.tma_efficiency"])

    def replace(self, **updates) -> "RunConfig":
        """Copy with dotted keys given as ``plan__M=8`` style keywords."""
        raw = dict(self.values)
        raw.update({k.replace("__", "."): v for k, v in updates.items()})
        return from_mapping(raw)


def from_mapping(raw: Mapping[str, Any]) -> RunConfig:
    flat = _flatten(raw)
    values = {}
    for key in flat:
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
    for key, (kind, default, check, message) in SCHEMA.items():
        value = _coerce(key, kind, flat[key]) if key in flat else default
        if not check(value):
            raise ConfigError(key, message)
        values[key] = value
    _cross_validate(values)
    return RunConfig(values)


def _cross_validate(v):
    if v["geometry.convention"] == "custom" and not v["geometry.positions"]:
        raise ConfigError("geometry.positions", "required for the custom convention")
    for block in ("pattern", "timeline"):
        if v[f"{block}.m"] > v["plan.M"]:
            raise ConfigError(f"{block}.m", f"exceeds plan.M={v['plan.M']}")
        if v[f"{block}.k"] > v["plan.K"]:
            raise ConfigError(f"{block}.k", f"exceeds plan.K={v['plan.K']}")
    if v["delays.k"] > v["plan.K"]:
        raise ConfigError("delays.k", f"exceeds plan.K={v['plan.K']}")
    bits = v["plan.M"].bit_length() - 1
    if v["simulation.n_bits"] % bits:
        raise ConfigError("simulation.n_bits", f"must be a multiple of log2(M)={bits}")


def loads(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<syntax>", str(exc)) from None
    return from_mapping(raw)


def load(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def default_config() -> RunConfig:
    return from_mapping({})


def _fmt(value) -> str:
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps(cfg: RunConfig, only: Optional[set] = None) -> str:
    """Serialize every key, one ``key = value`` line, grouped by block."""
    lines = []
    block = None
    for key in SCHEMA:
        if only is not None and key not in only:
            continue
        head = key.split(".", 1)[0]
        if head != block:
            if block is not None:
                lines.append("")
            block = head
        lines.append(f"{key} = {_fmt(cfg[key])}")
    return "\n".join(lines) + "\n"
