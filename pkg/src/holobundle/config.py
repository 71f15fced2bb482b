"""Scenario configuration: JSON parsing and validation.

A config looks like::

    {
      "scenario": "gauge-covariance",
      "seed": 42,
      "geometry": {"d": 2, "tau": [[0.0, 1.0], [0.2, 1.1]], "N": 9},
      "algebra": "sl2",
      "samples": 20,
      "tolerances": {"F_covariance": 1e-8},
      "timing": false
    }

``geometry.N`` is the number of grid points per real direction and must be an
odd integer of at least 5 (the spectral band is ``(N - 1) / 2``).  Every
problem found is reported at once in a :class:`~holobundle.errors.ConfigError`.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import liealg
from .errors import ConfigError
from .torus import TorusGeometry

TOL_ENV = "HOLOBUNDLE_TOL"

DEFAULT_GRID = {1: 17, 2: 9}

_KNOWN_KEYS = {
    "scenario",
    "seed",
    "geometry",
    "algebra",
    "samples",
    "tolerances",
    "output",
    "format",
    "timing",
    "options",
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Static facts about a registered scenario used during validation."""

    default_d: int
    required_d: int | None = None
    default_algebra: str = "sl2"
    required_algebra: str | None = None
    default_samples: int = 20


# filled in by holobundle.scenarios at import time
SCENARIO_SPECS: dict = {}


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    scenario: str
    seed: int
    geometry: TorusGeometry
    algebra: liealg.MatrixLieAlgebra
    samples: int
    tolerances: dict = field(default_factory=dict)
    default_tol: float | None = None
    output: str | None = None
    format: str = "json"
    timing: bool = False
    options: dict = field(default_factory=dict)

    def tol(self, check, builtin):
        """Tolerance of ``check``: explicit override, then the environment default, then ``builtin``."""
        if check in self.tolerances:
            return float(self.tolerances[check])
        if self.default_tol is not None:
            return self.default_tol
        return builtin

    def echo(self):
        """JSON-ready summary of the resolved config (for reports)."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "geometry": {
                "d": self.geometry.d,
                "tau": [[t.real, t.imag] for t in self.geometry.tau],
                "N": self.geometry.M,
            },
            "algebra": self.algebra.name,
            "samples": self.samples,
            "tolerances": dict(sorted(self.tolerances.items())),
            "options": self.options,
        }


def env_tolerance(environ=None):
    """``HOLOBUNDLE_TOL`` as a float, ``None`` when unset; raises on garbage."""
    environ = os.environ if environ is None else environ
    raw = environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        val = float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not val > 0:
        raise ConfigError(f"{TOL_ENV} must be positive")
    return val


def _parse_tau(raw, problems):
    out = []
    if not isinstance(raw, list) or not raw:
        problems.append("geometry.tau must be a non-empty list of [re, im] pairs")
        return None
    for t in raw:
        if isinstance(t, (list, tuple)) and len(t) == 2 and all(isinstance(v, (int, float)) for v in t):
            out.append(complex(t[0], t[1]))
        elif isinstance(t, (int, float)) and not isinstance(t, bool):
            out.append(complex(t))
        else:
            problems.append(f"geometry.tau entry {t!r} is not an [re, im] pair")
            return None
    bad = [k for k, t in enumerate(out) if t.imag <= 0]
    for k in bad:
        problems.append(f"geometry.tau[{k}]: Im(tau) must be positive")
    return None if bad else out


def _parse_geometry(raw, default_d, problems):
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        problems.append("geometry must be an object")
        return None
    d = raw.get("d", default_d)
    if d not in (1, 2) or isinstance(d, bool):
        problems.append(f"geometry.d must be 1 or 2, got {d!r}")
        return None
    tau = _parse_tau(raw.get("tau", [[0.0, 1.0]] * d), problems)
    if tau is not None and len(tau) != d:
        problems.append(f"geometry.tau needs {d} entries for d={d}, got {len(tau)}")
        tau = None
    grid = raw.get("N", DEFAULT_GRID[d])
    if not isinstance(grid, int) or isinstance(grid, bool):
        problems.append(f"geometry.N must be an integer, got {grid!r}")
        grid = None
    elif grid % 2 == 0:
        problems.append(f"geometry.N={grid}: grid size must be odd")
        grid = None
    elif grid < 5:
        problems.append(f"geometry.N={grid}: grid size must be at least 5")
        grid = None
    unknown = set(raw) - {"d", "tau", "N"}
    if unknown:
        problems.append(f"geometry: unknown keys {sorted(unknown)}")
    if tau is None or grid is None:
        return None
    return TorusGeometry(d, tuple(tau), (grid - 1) // 2)


def _parse_algebra(raw, problems):
    if isinstance(raw, str):
        try:
            return liealg.get_algebra(raw)
        except KeyError as exc:
            problems.append(exc.args[0])
            return None
    if isinstance(raw, dict) and "basis" in raw:
        try:
            mats = [np.asarray(_complex_matrix(m)) for m in raw["basis"]]
            return liealg.from_basis(str(raw.get("name", "custom")), mats)
        except (ValueError, TypeError) as exc:
            problems.append(f"algebra.basis: {exc}")
            return None
    if isinstance(raw, dict) and "name" in raw:
        return _parse_algebra(raw["name"], problems)
    problems.append("algebra must be a name or an object with a basis")
    return None


def _complex_matrix(m):
    if isinstance(m, dict):
        return np.asarray(m["re"], dtype=float) + 1j * np.asarray(m.get("im", 0.0), dtype=float)
    return np.asarray(m, dtype=complex)


def parse_config(text, environ=None):
    """Parse and validate a scenario config (JSON text or an already-decoded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    else:
        raw = text
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    problems = []
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        problems.append(f"unknown config keys {sorted(unknown)}")

    name = raw.get("scenario")
    spec = SCENARIO_SPECS.get(name)
    if spec is None:
        problems.append(
            f"unknown scenario {name!r}; registered: {', '.join(sorted(SCENARIO_SPECS))}"
        )
        spec = ScenarioSpec(default_d=1)

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        problems.append(f"seed must be an integer in [0, 2^64), got {seed!r}")

    geometry = _parse_geometry(raw.get("geometry"), spec.default_d, problems)
    if geometry is not None and spec.required_d is not None and geometry.d != spec.required_d:
        problems.append(f"scenario {name!r} requires d = {spec.required_d}")

    algebra = _parse_algebra(raw.get("algebra", spec.default_algebra), problems)
    if algebra is not None and spec.required_algebra is not None and algebra.name != spec.required_algebra:
        problems.append(f"scenario {name!r} requires algebra {spec.required_algebra!r}")

    samples = raw.get("samples", spec.default_samples)
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
        problems.append(f"samples must be a positive integer, got {samples!r}")

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in tolerances.values()
    ):
        problems.append("tolerances must map check names to positive numbers")
        tolerances = {}

    fmt = raw.get("format", "json")
    if fmt not in ("json", "csv"):
        problems.append(f"format must be 'json' or 'csv', got {fmt!r}")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        problems.append("output must be a path string")
    timing = raw.get("timing", False)
    if not isinstance(timing, bool):
        problems.append("timing must be true or false")
    options = raw.get("options", {})
    if not isinstance(options, dict):
        problems.append("options must be an object")

    try:
        default_tol = env_tolerance(environ)
    except ConfigError as exc:
        problems.extend(exc.problems)
        default_tol = None

    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(
        scenario=name,
        seed=seed,
        geometry=geometry,
        algebra=algebra,
        samples=samples,
        tolerances={k: float(v) for k, v in tolerances.items()},
        default_tol=default_tol,
        output=output,
        format=fmt,
        timing=timing,
        options=options,
    )
