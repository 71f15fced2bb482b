"""Command line interface: ``holobundle verify | classify | canonicalize | report``.

Exit codes: 0 when every check passes, 1 when a check fails or a run raises,
2 for invalid configuration or input files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, cplxstruct, forms, gauge, moduli
from .config import parse_config
from .errors import ConfigError, HolobundleError
from .report import Report, dumps_stable, emit_report
from .scenarios import REGISTRY, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _read_json(path, what):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path!r} is not valid JSON: {exc}") from None


def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise HolobundleError(f"cannot write {path!r}: {exc.strerror}") from None


def cmd_verify(args):
    cfg = parse_config(_read_text(args.config))
    report = run_scenario(cfg)
    fmt = args.format or cfg.format
    path = args.output or cfg.output
    if path is None:
        sys.stdout.write(emit_report(report, fmt))
    else:
        try:
            emit_report(report, fmt, path)
        except OSError as exc:
            raise HolobundleError(f"cannot write {path!r}: {exc.strerror}") from None
    if report.error is not None:
        print(f"error: {report.error['type']}: {report.error['message']}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_classify(args):
    raw = _read_json(args.config, "config")
    if isinstance(raw, dict):
        raw = dict(raw)
        raw.setdefault("scenario", "orbit-jacobian" if raw.get("algebra", "sl2") == "gl1" else "torsion-hmc")
    cfg = parse_config(raw)
    try:
        obj = _read_json(args.form, "form")
        # a form file that records its own torus wins over the config geometry
        xi = forms.form_from_json(obj, geometry=None if "geometry" in obj else cfg.geometry)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid form file: {exc}") from None
    if xi.matrix_shape != (cfg.algebra.n, cfg.algebra.n):
        raise ConfigError(f"form values are {xi.matrix_shape}, algebra {cfg.algebra.name} needs {cfg.algebra.n}x{cfg.algebra.n}")
    out = {"bidegree": list(xi.bidegree) if xi.bidegree else None, "algebra": cfg.algebra.name}
    if xi.is_type(0, 1):
        tol = cfg.tol("verdict_threshold", 1e-7)
        out["integrability"] = cplxstruct.integrability_check(
            cplxstruct.ComplexStructure(xi), tol=tol, rng=np.random.default_rng(cfg.seed)
        )
    abelian = cfg.geometry.d == 1 and cfg.algebra.n == 1 and cfg.algebra.is_abelian
    out["abelian_class"] = gauge.abelian_bundle_class(xi).to_dict() if abelian else None
    if args.gauge is not None:
        try:
            f = gauge.gauge_map_from_json(xi.geometry, _read_json(args.gauge, "gauge map"), cfg.algebra.n)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"invalid gauge map file: {exc}") from None
        moved = gauge.act_bullet(xi, f)
        entry = {"Fbar_max": forms.curvature_Fbar(moved).max_norm()}
        if abelian:
            cls, cls0 = gauge.abelian_bundle_class(moved), gauge.abelian_bundle_class(xi)
            entry.update(abelian_class=cls.to_dict(), class_distance=cls.distance(cls0))
        out["transformed"] = entry
    _write(dumps_stable(out) + "\n", args.output)
    return EXIT_OK


def _pair_from_json(obj):
    try:
        return moduli.CommutingPair(moduli.matrix_from_json(obj["x"]), moduli.matrix_from_json(obj["y"]))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"pair needs matrices 'x' and 'y': {exc}") from None


def cmd_canonicalize(args):
    obj = _read_json(args.pair, "pair")
    items = obj["pairs"] if isinstance(obj, dict) and "pairs" in obj else [obj]
    results = [moduli.orbit_class(_pair_from_json(p)).to_dict() for p in items]
    out = {"pairs": results} if len(results) != 1 or "pairs" in obj else results[0]
    _write(dumps_stable(out) + "\n", args.output)
    return EXIT_OK


def cmd_report(args):
    obj = _read_json(args.input, "report")
    try:
        report = Report.from_dict(obj)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"not a holobundle report: {exc}") from None
    _write(emit_report(report, args.format), args.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="holobundle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a registered scenario and emit its report")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="report path (default: config 'output' or stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="integrability and (abelian) bundle class of a (0,1)-form")
    p.add_argument("--config", required=True)
    p.add_argument("--form", required=True)
    p.add_argument("--gauge", help="gauge map spec; also report the class of form . gauge")
    p.add_argument("--output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("canonicalize", help="Weyl-canonical phases of a commuting pair")
    p.add_argument("--pair", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("report", help="re-emit a JSON report as json or csv")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("scenarios", help="list registered scenarios")
    p.set_defaults(func=lambda args: print("\n".join(sorted(REGISTRY))) or EXIT_OK)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except HolobundleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
