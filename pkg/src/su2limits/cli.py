"""Command-line interface: ``su2limits {analyze,majorana,same-orbit,sweep,bounds}``.

Exit codes: 0 success, 2 bad input, 3 unnormalizable state, 4 photon-number
mismatch, 5 unwritable output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import OutputError, ParseError, Su2LimitsError
from .fockstate import (
    basis_state,
    make_eta,
    make_from_amplitudes,
    make_noon,
    make_su2_coherent,
    parse_state,
)
from .majorana import canonicalize, orbit_relation, to_constellation
from .orbits import orbit_state_n2, orbit_state_n3, sweep_n2, sweep_n3
from .stokes import analysis_report, check_bounds

JSON_DIGITS = 12
CSV_DIGITS = 9


def _round(obj, digits=JSON_DIGITS):
    if isinstance(obj, dict):
        return {k: _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{float(obj):.{digits}g}") + 0.0
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _fmt(x, digits):
    return f"{float(x) + 0.0:.{digits}g}"


def dump_json(obj) -> str:
    return json.dumps(_round(obj), indent=2)


def _angle(text, unit):
    value = float(text)
    return math.radians(value) if unit == "deg" else value


def _to_unit(value, unit):
    return math.degrees(value) if unit == "deg" else value


def parse_state_spec(spec: str, unit: str = "deg"):
    """Parse a state argument.

    Accepted forms: ``coherent:N,theta,phi``, ``noon:N``, ``eta:N,+`` (or
    ``-``), ``fock:N,n_R``, ``orbit2:theta``, ``orbit3:theta2,theta3,phi3``,
    the inline text ``"N; re0,im0; re1,im1; ..."`` and a bare list of real
    amplitudes ``"c0,c1,...,cN"``.  Angles are read in ``unit``.
    """
    text = spec.strip()
    try:
        if ":" in text:
            kind, _, rest = text.partition(":")
            args = [a.strip() for a in rest.split(",") if a.strip()]
            kind = kind.strip().lower()
            if kind == "coherent" and len(args) == 3:
                return make_su2_coherent(int(args[0]), _angle(args[1], unit), _angle(args[2], unit))
            if kind == "noon" and len(args) == 1:
                return make_noon(int(args[0]))
            if kind == "eta" and len(args) == 2:
                return make_eta(int(args[0]), args[1])
            if kind == "fock" and len(args) == 2:
                return basis_state(int(args[0]), int(args[1]))
            if kind == "orbit2" and len(args) == 1:
                return orbit_state_n2(_angle(args[0], unit))
            if kind == "orbit3" and len(args) == 3:
                return orbit_state_n3(*(_angle(a, unit) for a in args))
            raise ParseError(f"unrecognized state spec {spec!r}")
        if ";" in text:
            return parse_state(text)
        values = [float(v) for v in text.strip("()[] ").split(",")]
        return make_from_amplitudes(len(values) - 1, values)
    except ParseError:
        raise
    except ValueError as exc:
        if isinstance(exc, Su2LimitsError):
            raise
        raise ParseError(f"cannot parse state {spec!r}: {exc}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--unit", choices=("deg", "rad"), default="deg")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--output", default=None, help="output path (file or directory)")
    return common


def build_parser():
    parser = _Parser(prog="su2limits", description="Stokes-operator variance analysis of two-mode N-photon states.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    p = sub.add_parser("analyze", parents=[common], help="Stokes vector, covariance, principal variances, bounds")
    p.add_argument("state")

    p = sub.add_parser("majorana", parents=[common], help="raw and canonical Majorana constellations")
    p.add_argument("state")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--canonical", action="store_true", help="emit only the canonical constellation")
    which.add_argument("--raw", action="store_true", help="emit only the raw constellation")

    p = sub.add_parser("same-orbit", parents=[common], help="test SU(2) orbit equivalence")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.add_argument("--tol", type=float, default=1e-6, help="angular tolerance in radians")

    p = sub.add_parser("sweep", parents=[common], help="sweep orbit generators and write CSVs")
    p.add_argument("n_photons", type=int, choices=(2, 3))
    p.add_argument("--resolution", type=int, default=None, help="theta grid size (N=2: 512, N=3: 96)")
    p.add_argument("--res-phi", type=int, default=48, help="phi_3 grid size for N=3")
    p.add_argument("--full-phi", action="store_true", help="sweep phi_3 over [0, 2pi) instead of [0, pi]")

    p = sub.add_parser("bounds", parents=[common], help="check a variance triplet against the invariant bounds")
    p.add_argument("n_photons", type=int)
    p.add_argument("lambdas", type=float, nargs=3)
    return parser


def _write(args, text):
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OutputError(f"cannot write {args.output}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def cmd_analyze(args):
    state = parse_state_spec(args.state, args.unit)
    report = analysis_report(state)
    if args.format == "csv":
        rows = ["quantity,values"]
        for key in ("stokes_vector", "lambdas", "gamma"):
            rows.append(key + "," + ",".join(_fmt(x, CSV_DIGITS) for x in report[key]))
        for k, axis in enumerate(report["axes"], 1):
            rows.append(f"axis{k}," + ",".join(_fmt(x, CSV_DIGITS) for x in axis))
        for name, b in report["bounds"].items():
            rows.append(f"{name},{_fmt(b['margin'], CSV_DIGITS)},{'pass' if b['passed'] else 'fail'}")
        _write(args, "\n".join(rows) + "\n")
    else:
        _write(args, dump_json(report) + "\n")
    return 0


def cmd_majorana(args):
    state = parse_state_spec(args.state, args.unit)
    raw = to_constellation(state)
    canon, euler = canonicalize(raw)
    if args.format == "json":
        def pts(c):
            return [[_to_unit(t, args.unit), _to_unit(p, args.unit)] for t, p in c.points]

        out = {
            "unit": args.unit,
            "raw": pts(raw),
            "canonical": pts(canon),
            "rotation": {k: _to_unit(v, args.unit) for k, v in zip(("alpha", "beta", "gamma"), euler.as_tuple())},
        }
        _write(args, dump_json(out) + "\n")
    elif args.canonical:
        _write(args, canon.to_csv(CSV_DIGITS))
    elif args.raw:
        _write(args, raw.to_csv(CSV_DIGITS))
    else:
        # two CSV blocks separated by one blank line: raw first, then canonical
        _write(args, raw.to_csv(CSV_DIGITS) + "\n" + canon.to_csv(CSV_DIGITS))
    return 0


def cmd_same_orbit(args):
    a = parse_state_spec(args.state_a, args.unit)
    b = parse_state_spec(args.state_b, args.unit)
    relation, witness = orbit_relation(a, b, args.tol)
    if args.format == "json":
        out = {"relation": relation.value}
        if witness is not None:
            out["witness"] = {k: _to_unit(v, args.unit) for k, v in zip(("alpha", "beta", "gamma"), witness.as_tuple())}
            out["unit"] = args.unit
        _write(args, dump_json(out) + "\n")
    else:
        lines = [relation.value]
        if witness is not None:
            lines.append(" ".join(_fmt(_to_unit(v, args.unit), JSON_DIGITS) for v in witness.as_tuple()))
        _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_sweep(args):
    n = args.n_photons
    if n == 2:
        cloud = sweep_n2(512 if args.resolution is None else args.resolution, threads=args.threads)
    else:
        res = 96 if args.resolution is None else args.resolution
        cloud = sweep_n3(res, args.res_phi, threads=args.threads, full_phi=args.full_phi)
    outdir = args.output or f"sweep-n{n}"
    points_path = os.path.join(outdir, "points.csv")
    hulls_path = os.path.join(outdir, "hulls.csv")
    try:
        os.makedirs(outdir, exist_ok=True)
        with open(points_path, "w") as fh:
            fh.write(cloud.points_csv(CSV_DIGITS))
        with open(hulls_path, "w") as fh:
            fh.write(cloud.hulls_csv(CSV_DIGITS))
    except OSError as exc:
        raise OutputError(f"cannot write sweep output to {outdir}: {exc.strerror}") from None
    lo, hi = cloud.trace_range
    summary = {
        "n_photons": n,
        "samples": cloud.n_samples,
        "trace_range": [lo, hi],
        "buckets": len(cloud.slice_hulls),
        "points_csv": points_path,
        "hulls_csv": hulls_path,
    }
    sys.stdout.write(dump_json(summary) + "\n")
    return 0


def cmd_bounds(args):
    checks = check_bounds(args.lambdas, args.n_photons)
    out = {
        "n_photons": args.n_photons,
        "lambdas": args.lambdas,
        "all_pass": all(c.passed for c in checks.values()),
        "bounds": {k: {"value": c.value, "limit": c.limit, "margin": c.margin, "passed": c.passed} for k, c in checks.items()},
    }
    _write(args, dump_json(out) + "\n")
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "majorana": cmd_majorana,
    "same-orbit": cmd_same_orbit,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Su2LimitsError as exc:
        print(f"su2limits: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"su2limits: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
