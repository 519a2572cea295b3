"""Run configuration files, manifests and CSV output.

Config files are UTF-8 text with ``[section]`` headers and ``key = value``
lines; ``#`` starts a comment.  A top-level ``schema_version`` is required and
unknown sections or keys are rejected with the offending line number.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from .diagnostics import build_modulus, calibrate_rescale
from .solver import InitialDataSpec, SimConfig
from .spectral import Grid

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "parse_text",
    "load_config",
    "sim_config_from_sections",
    "config_to_dict",
    "RunManifest",
    "format_float",
    "write_csv",
    "read_csv",
]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed configuration; ``line`` and ``key`` locate the problem."""

    def __init__(self, message, line: Optional[int] = None, key: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


def _as_bool(text):
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _optional(conv):
    def parse(text):
        return None if text.lower() in ("", "none") else conv(text)
    return parse


def _float_list(text):
    text = text.strip()
    if ":" in text:
        start, stop, stride = (float(v) for v in text.split(":"))
        count = int(math.floor((stop - start) / stride + 1e-9)) + 1
        return [round(start + i * stride, 12) for i in range(count)]
    return [float(v) for v in text.split(",") if v.strip()]


# section -> key -> converter
RUN_SCHEMA: dict[str, dict[str, Callable[[str], Any]]] = {
    "physics": {"alpha": float, "beta": float, "nu": float},
    "grid": {"n_points": int, "box_length": float},
    "initial_data": {"family": str, "amplitude": float, "width": float, "samples_file": str},
    "solver": {
        "t_end": float,
        "cfl_safety": float,
        "blowup_gradient_threshold": float,
        "spectral_tail_threshold": float,
        "output_stride": int,
        "dt_max": _optional(float),
        "boundary_threshold": float,
        "confirm_blowup": _as_bool,
        "filter_order": int,
        "filter_strength": float,
        "max_steps": int,
    },
    "diagnostics": {
        "lp_exponent": float,
        "weighted_delta": _optional(float),
        "modulus": str,
        "modulus_delta": float,
        "modulus_target": float,
    },
    "output": {"keep_snapshots": _as_bool, "seed": int},
}

SWEEP_SCHEMA = dict(RUN_SCHEMA)
SWEEP_SCHEMA["axes"] = {"alpha": _float_list, "beta": _float_list, "nu": _float_list,
                        "amplitude": _float_list}
SWEEP_SCHEMA["sweep"] = {"bisection_steps": int, "gradient_threshold_per_amplitude": float}

REQUIRED = {("physics", "alpha"), ("physics", "beta"), ("physics", "nu"), ("solver", "t_end")}


def parse_text(text: str, schema: dict = RUN_SCHEMA) -> dict:
    """Parse config text into ``{section: {key: value}}`` (plus ``schema_version``)."""
    out: dict = {name: {} for name in schema}
    section = None
    version = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", number)
            section = line[1:-1].strip()
            if section not in schema:
                raise ConfigError(f"unknown section [{section}]", number)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", number)
        key, value = (part.strip() for part in line.split("=", 1))
        if section is None:
            if key != "schema_version":
                raise ConfigError("only schema_version may precede the first section", number, key)
            try:
                version = int(value)
            except ValueError:
                raise ConfigError(f"schema_version must be an integer, got {value!r}", number, key) from None
            if version != SCHEMA_VERSION:
                raise ConfigError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})", number, key)
            continue
        conv = schema[section].get(key)
        if conv is None:
            raise ConfigError(f"unknown key in [{section}]", number, key)
        if key in out[section]:
            raise ConfigError("duplicate key", number, key)
        try:
            out[section][key] = conv(value)
        except ValueError as exc:
            raise ConfigError(str(exc), number, key) from None
    if version is None:
        raise ConfigError("missing schema_version", key="schema_version")
    out["schema_version"] = version
    return out


def load_config(path, schema: dict = RUN_SCHEMA) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    return parse_text(text, schema)


def _modulus_case(alpha, beta):
    if abs(beta - (1.0 - alpha)) < 1e-12:
        return "critical"
    if 1.0 - alpha < beta < 2.0 and 0.0 < alpha < 1.0:
        return "subcritical"
    return None


def sim_config_from_sections(sections: dict, base_dir=None, **overrides) -> SimConfig:
    """Build a SimConfig; ``overrides`` replace physics/initial-data values."""
    for sec, key in REQUIRED:
        if key not in sections.get(sec, {}) and key not in overrides:
            raise ConfigError(f"required key missing from [{sec}]", key=key)
    phys = {**sections["physics"]}
    data = {**sections["initial_data"]}
    for key in ("alpha", "beta", "nu"):
        if key in overrides:
            phys[key] = overrides.pop(key)
    if "amplitude" in overrides:
        data["amplitude"] = overrides.pop("amplitude")
    grid_sec = sections["grid"]
    grid = Grid(grid_sec.get("n_points", 4096), grid_sec.get("box_length", 80.0))
    samples = None
    if "samples_file" in data:
        path = Path(data["samples_file"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        samples = tuple(np.loadtxt(path, dtype=float, ndmin=1))
    try:
        init = InitialDataSpec(data.get("family", "odd_gaussian"), data.get("amplitude", 1.0),
                               data.get("width", 1.0), samples)
    except ValueError as exc:
        raise ConfigError(str(exc), key="family") from None
    solver = {k: v for k, v in sections["solver"].items() if k != "max_steps"}
    diag = sections["diagnostics"]
    out = sections["output"]
    solver.update(overrides)
    try:
        cfg = SimConfig(phys["alpha"], phys["beta"], phys["nu"], grid, init,
                        lp_exponent=diag.get("lp_exponent", 4.0),
                        weighted_delta=diag.get("weighted_delta"),
                        seed=out.get("seed", 0), **solver)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    mode = diag.get("modulus", "auto")
    if mode not in ("auto", "none"):
        raise ConfigError(f"modulus must be 'auto' or 'none', got {mode!r}", key="modulus")
    case = _modulus_case(cfg.alpha, cfg.beta) if mode == "auto" and cfg.nu > 0 else None
    if case is not None:
        spec = build_modulus(case, cfg.alpha, cfg.beta, diag.get("modulus_delta", 1.0))
        lam = calibrate_rescale(init.evaluate(grid), spec, diag.get("modulus_target", 0.5))
        cfg = SimConfig(**{**_fields(cfg), "modulus": spec, "modulus_rescale": lam})
    return cfg


def _fields(cfg: SimConfig) -> dict:
    return {name: getattr(cfg, name) for name in cfg.__dataclass_fields__}


def config_to_dict(cfg: SimConfig) -> dict:
    """JSON-ready echo of a SimConfig (the modulus table is summarised)."""
    out = {}
    for name in cfg.__dataclass_fields__:
        value = getattr(cfg, name)
        if name == "grid":
            value = {"n_points": value.n_points, "box_length": value.box_length}
        elif name == "initial_data":
            value = {"family": value.family, "amplitude": value.amplitude, "width": value.width,
                     "n_samples": None if value.samples is None else len(value.samples)}
        elif name == "modulus":
            value = None if value is None else {"case": value.case, "delta_param": value.delta_param}
        out[name] = value
    out["supercritical"] = cfg.supercritical
    out["weighted_delta_used"] = cfg.delta
    return out


@dataclass
class RunManifest:
    config_echo: dict
    calibrated_constants: dict
    verdict: str
    blowup_time_estimate: Optional[float]
    artifact_paths: list = field(default_factory=list)
    tool_version: str = __version__
    wall_time: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / "manifest.json"
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path


def format_float(value) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(value))


def write_csv(path, header, columns) -> Path:
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(format_float(v) for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path):
    """(header, 2D float array) from a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def default_workers() -> int:
    env = os.environ.get("FRACTRANSPORT_WORKERS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"FRACTRANSPORT_WORKERS must be an integer, got {env!r}") from None
        if value < 1:
            raise ConfigError("FRACTRANSPORT_WORKERS must be at least 1")
        return value
    return os.cpu_count() or 1
