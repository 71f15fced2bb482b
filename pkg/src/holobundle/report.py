"""Scenario reports and their byte-stable JSON / CSV serialization.

Floats are written with ``%.12e`` and object keys are sorted, so a report
built from the same inputs always serializes to the same bytes.  Wall-clock
time is only recorded when the config asks for it (``"timing": true``);
otherwise it would break that guarantee.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__


@dataclass(frozen=True)
class Check:
    """One residual compared against its tolerance (pass iff ``residual < tol``)."""

    name: str
    residual: float
    tol: float

    @property
    def passed(self):
        return bool(math.isfinite(self.residual) and self.residual < self.tol)

    def to_dict(self):
        return {"name": self.name, "residual": float(self.residual), "tol": float(self.tol), "passed": self.passed}


@dataclass(eq=False)
class Report:
    scenario: str
    seed: int
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    error: dict | None = None
    wall_clock: float | None = None
    version: str = __version__

    @property
    def passed(self):
        return self.error is None and bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name, residual, tol):
        self.checks.append(Check(name, float(residual), float(tol)))

    def to_dict(self):
        out = {
            "scenario": self.scenario,
            "seed": self.seed,
            "version": self.version,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "details": self.details,
            "config": self.config,
            "error": self.error,
        }
        if self.wall_clock is not None:
            out["wall_clock"] = self.wall_clock
        return out

    @classmethod
    def from_dict(cls, obj):
        rep = cls(
            scenario=obj["scenario"],
            seed=obj.get("seed", 0),
            details=obj.get("details", {}),
            config=obj.get("config", {}),
            error=obj.get("error"),
            wall_clock=obj.get("wall_clock"),
            version=obj.get("version", __version__),
        )
        for c in obj.get("checks", []):
            rep.add(c["name"], c["residual"], c["tol"])
        return rep


def _plain(obj):
    """Convert numpy scalars/arrays and complex numbers to JSON-friendly values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _format_float(x):
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return "%.12e" % x


def dumps_stable(obj, indent=2, _level=0):
    """JSON text with sorted keys and ``%.12e`` floats."""
    obj = _plain(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(k)}: {dumps_stable(obj[k], indent, _level + 1)}" for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if not any(isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(dumps_stable(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps_stable(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    return json.dumps(obj)


CSV_FIELDS = ("scenario", "seed", "check", "residual", "tol", "passed")


def to_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for c in report.checks:
        writer.writerow(
            [report.scenario, report.seed, c.name, "%.12e" % c.residual, "%.12e" % c.tol, int(c.passed)]
        )
    return buf.getvalue()


def render(report, fmt="json"):
    if fmt == "json":
        return dumps_stable(report.to_dict()) + "\n"
    if fmt == "csv":
        return to_csv(report)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report, fmt="json", path=None):
    """Serialize ``report``; write to ``path`` when given and return the text."""
    text = render(report, fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
