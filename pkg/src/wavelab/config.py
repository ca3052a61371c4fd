"""Run configuration: a single JSON document with embedded defaults.

An empty document runs the canonical demo (``k = 0.01``, ``b0 = -10 m``,
``h0 = 0``). Unknown keys are rejected so that typos do not pass silently.

Schema (every key optional)::

    {
      "constants": {"omega": 7.3e-5, "g": 9.8, "rho": 1000.0, "p_atm": 101325.0},
      "flow": "gerstner" | "laminar",
      "wave": {"k": 0.01, "b0": -10.0, "h0": 0.0},
      "laminar": {"profile": "zero" | "constant" | "linear",
                  "U": 0.0, "sigma": 0.0, "eta0": 0.0, "d": 100.0, "c": null},
      "grid": {"nx": 32, "nz": 32, "surface_samples": 64, "streamlines": 8,
               "streamline_points": 32, "profile_samples": 64,
               "extraction_samples": 128, "hodograph_q": 16},
      "steps": {"halvings": 3, "steps_per_period": 2048},
      "tolerances": {"euler": 1e-8, "surface_pressure": 1e-6, "kinematic": 1e-8,
                     "isobaric": 1e-6, "has": 1e-8, "cubic": 1e-6,
                     "bernoulli": 1e-8, "circle": 1e-8, "first_integral": 1e-10,
                     "label_map": 1e-6, "closure": 1e-7, "orbit": 1e-6},
      "fault": {"pressure_shear": 0.0},
      "particles": [{"kb": -0.5, "a": 0.0}, {"X": 10.0, "Z": -30.0}],
      "output": {"dir": "wavelab-out", "formats": ["csv", "json"]},
      "seed": 0
    }

Lengths in ``tolerances`` are relative to ``1/k`` (or the depth for
laminar flows), speeds to ``c``, pressures to ``rho g / k``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

from .core import GerstnerParams, PhysicalConstants
from .errors import DomainError, ValidationError, WavelabError

FORMATS = ("csv", "json", "svg")

DEFAULTS = {
    "constants": {"omega": 7.3e-5, "g": 9.8, "rho": 1000.0, "p_atm": 101325.0},
    "flow": "gerstner",
    "wave": {"k": 0.01, "b0": -10.0, "h0": 0.0},
    "laminar": {"profile": "linear", "U": 0.0, "sigma": 0.0, "eta0": 0.0, "d": 100.0, "c": None},
    "grid": {
        "nx": 32,
        "nz": 32,
        "surface_samples": 64,
        "streamlines": 8,
        "streamline_points": 32,
        "profile_samples": 64,
        "extraction_samples": 128,
        "hodograph_q": 16,
    },
    "steps": {"halvings": 3, "steps_per_period": 2048},
    "tolerances": {
        "euler": 1e-8,
        "surface_pressure": 1e-6,
        "kinematic": 1e-8,
        "isobaric": 1e-6,
        "has": 1e-8,
        "cubic": 1e-6,
        "bernoulli": 1e-8,
        "circle": 1e-8,
        "first_integral": 1e-10,
        "label_map": 1e-6,
        "closure": 1e-7,
        "orbit": 1e-6,
    },
    "fault": {"pressure_shear": 0.0},
    "particles": [{"kb": -0.5, "a": 0.0}, {"kb": -1.0, "a": 0.0}, {"kb": -2.0, "a": 0.0}],
    "output": {"dir": "wavelab-out", "formats": ["csv", "json"]},
    "seed": 0,
}


class ConfigError(WavelabError, ValueError):
    """The configuration document is malformed or out of range."""


def _merge(base, over, path=""):
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and base[key] and not isinstance(val, dict):
            raise ConfigError(f"{where!r} must be an object")
        if isinstance(base[key], dict) and base[key]:
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass(frozen=True)
class RunConfig:
    constants: PhysicalConstants
    flow: str
    wave: dict
    laminar: dict
    grid: dict
    steps: dict
    tolerances: dict
    fault: dict
    particles: list
    out_dir: str
    formats: tuple
    seed: int = 0
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def gerstner(self) -> GerstnerParams:
        w = self.wave
        return GerstnerParams.from_wavenumber(w["k"], b0=w["b0"], h0=w["h0"], consts=self.constants)

    def to_dict(self):
        return copy.deepcopy(self.raw)


def _number(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{name} must be a finite number, got {v!r}")
    return float(v)


def build_config(doc=None, out_dir=None, formats=None) -> RunConfig:
    """Validate ``doc`` (a dict, possibly empty) on top of :data:`DEFAULTS`.

    ``out_dir`` and ``formats`` override the document (command-line flags).

    Raises
    ------
    ConfigError
        Any structural or range problem, with a message naming the key.
    """
    doc = {} if doc is None else doc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    raw = _merge(DEFAULTS, doc)
    if out_dir is not None:
        raw["output"]["dir"] = str(out_dir)
    if formats is not None:
        raw["output"]["formats"] = list(formats)

    try:
        consts = PhysicalConstants(**{k: _number(v, f"constants.{k}") for k, v in raw["constants"].items()})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    if raw["flow"] not in ("gerstner", "laminar"):
        raise ConfigError(f"flow must be 'gerstner' or 'laminar', got {raw['flow']!r}")
    wave = {k: _number(v, f"wave.{k}") for k, v in raw["wave"].items()}
    if not wave["k"] > 0:
        raise ConfigError("wavenumber must be positive")
    if not wave["b0"] <= 0:
        raise ConfigError(f"wave.b0 must be <= 0, got {wave['b0']}")

    lam = dict(raw["laminar"])
    if lam["profile"] not in ("zero", "constant", "linear"):
        raise ConfigError(f"laminar.profile must be zero, constant or linear, got {lam['profile']!r}")
    for key in ("U", "sigma", "eta0", "d"):
        lam[key] = _number(lam[key], f"laminar.{key}")
    if lam["c"] is not None:
        lam["c"] = _number(lam["c"], "laminar.c")
    if not lam["d"] > 0:
        raise ConfigError("laminar.d must be positive")

    grid = {}
    for key, v in raw["grid"].items():
        if isinstance(v, bool) or not isinstance(v, int) or v < 8:
            raise ConfigError(f"grid.{key} must be an integer >= 8, got {v!r}")
        grid[key] = v
    steps = {}
    for key, v in raw["steps"].items():
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError(f"steps.{key} must be a positive integer, got {v!r}")
        steps[key] = v
    if steps["halvings"] < 2:
        raise ConfigError("steps.halvings must be >= 2")
    tols = {}
    for key, v in raw["tolerances"].items():
        tols[key] = _number(v, f"tolerances.{key}")
        if not tols[key] > 0:
            raise ConfigError(f"tolerances.{key} must be > 0")
    fault = {"pressure_shear": _number(raw["fault"]["pressure_shear"], "fault.pressure_shear")}

    parts = raw["particles"]
    if not isinstance(parts, list):
        raise ConfigError("particles must be a list")
    for i, p in enumerate(parts):
        ok = isinstance(p, dict) and (set(p) in ({"kb", "a"}, {"kb"}, {"X", "Z"}))
        if not ok:
            raise ConfigError(f"particles[{i}] must be {{kb[, a]}} or {{X, Z}}, got {p!r}")
        for k, v in p.items():
            _number(v, f"particles[{i}].{k}")

    fmts = raw["output"]["formats"]
    if isinstance(fmts, str):
        fmts = [f for f in fmts.split(",") if f]
    if not isinstance(fmts, list) or not fmts or any(f not in FORMATS for f in fmts):
        raise ConfigError(f"output.formats must be a non-empty subset of {FORMATS}, got {fmts!r}")
    raw["output"]["formats"] = list(fmts)
    seed = raw["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    cfg = RunConfig(
        consts, raw["flow"], wave, lam, grid, steps, tols, fault, parts,
        str(raw["output"]["dir"]), tuple(fmts), seed, raw,
    )
    if cfg.flow == "gerstner":
        try:
            cfg.gerstner()
        except (DomainError, ValidationError) as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path=None, out_dir=None, formats=None) -> RunConfig:
    """Read and validate a JSON config; ``path=None`` gives the defaults.

    Raises
    ------
    ConfigError
        Bad JSON or bad values.
    OSError
        The file cannot be read.
    """
    doc = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            doc = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return build_config(doc, out_dir, formats)
