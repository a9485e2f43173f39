"""``fbma`` command line: curve samples, annulus reports, verification, figures.

Exit status is 0 on success, 1 when a verification or guarantee fails and
2 for usage errors (bad arguments, parameters out of range, unwritable
output paths).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from fbma import __version__, annuli, figures, geometry, otsuki, report, surface

SCHEMA = 1
CURVE_COLUMNS = ("s", "phi", "x", "y", "z", "dx", "dy", "dz", "f")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _jsonable(obj):
    """Plain JSON types; non-finite floats become ``null``."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_jsonable(dict(schema=SCHEMA, **payload)), indent=2, allow_nan=False) + "\n"


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc
    with fh:
        yield fh


def _emit(text: str, path) -> None:
    with _open_out(path) as fh:
        fh.write(text)


def _float_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers x,y,z")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers lo,hi")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# -- commands ---------------------------------------------------------------

def curve_csv(a: float, phi0: float, s_range: tuple[float, float], n: int) -> str:
    if n < 2:
        raise UsageError(f"need at least 2 samples, got n={n}")
    lo, hi = s_range
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise UsageError(f"s range must satisfy lo < hi, got {lo}, {hi}")
    cols = surface.curve_many((a, phi0), np.linspace(lo, hi, n))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for row in zip(*(cols[k] for k in CURVE_COLUMNS)):
        w.writerow([format(float(v), ".17g") for v in row])
    return buf.getvalue()


def cmd_curve(args) -> int:
    _emit(curve_csv(args.a, args.phi0, args.s_range, args.n), args.out)
    return EXIT_OK


def annuli_payload(a: float, count: int) -> dict:
    if count < 1:
        raise UsageError(f"count must be at least 1, got {count}")
    records = []
    for i in range(1, count + 1):
        band = annuli.symmetric_band(a, i, check_embedding=True)
        rec = band.as_dict()
        rec["index"] = i
        rec["geometry"] = geometry.geometric_report(band).as_dict()
        records.append(rec)
    return {"command": "annuli", "a": a, "count": count, "bands": records}


def cmd_annuli(args) -> int:
    _emit(dumps(annuli_payload(args.a, args.count)), args.out)
    return EXIT_OK


def otsuki_payload(p: int, q: int, case: str) -> tuple[dict, bool]:
    spec = otsuki.solve_parameter(p, q)
    base = {
        "command": "otsuki",
        "p": spec.p,
        "q": spec.q,
        "case": case,
        "a": spec.a,
        "C_a": surface.big_c(spec.a),
        "C_target": spec.target,
        "C_residual": spec.residual,
    }
    try:
        enum = otsuki.enumerate_annuli(spec, case)
    except otsuki.GuaranteeError as exc:
        base.update(ok=False, error=str(exc))
        return base, False
    base.update(
        phi0=enum.phi0,
        zeros=enum.zeros,
        bands=[b.as_dict() for b in enum.bands],
        witnesses=enum.witnesses,
        count=len(enum.bands),
        guarantee=enum.guarantee,
        zero_count=len(enum.zeros),
        zero_guarantee=enum.zero_guarantee,
        ok=enum.ok,
    )
    return base, enum.ok


def cmd_otsuki(args) -> int:
    payload, ok = otsuki_payload(args.p, args.q, args.phi0_case)
    _emit(dumps(payload), args.out)
    if not ok:
        print(f"fbma: {payload.get('error', 'count below guarantee')}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    reports = report.run_suite(args.suite, tol=args.tol)
    failed = [r for r in reports if r.status == "fail"]
    payload = {
        "command": "verify",
        "suite": args.suite,
        "tolerance_override": args.tol,
        "passed": sum(r.status == "pass" for r in reports),
        "failed": len(failed),
        "skipped": sum(r.status == "skipped" for r in reports),
        "reports": [r.as_dict() for r in reports],
    }
    _emit(dumps(payload), args.out)
    for r in failed:
        print(f"FAIL {r.claim}: residual {r.residual:.3g} > {r.tolerance:.3g}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_figure(args) -> int:
    spec = figures.figure_spec(args.figure_id, args.projection)
    if args.out is None:
        raise UsageError("figure needs --out PATH")
    try:
        figures.render(spec, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="sample the generating curve to CSV")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--s-range", type=_float_pair, default=(0.0, math.pi), metavar="LO,HI")
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("annuli", help="nested symmetric annuli of Sigma_a(0) as JSON")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_annuli)

    p = sub.add_parser("otsuki", help="annuli inside an Otsuki torus as JSON")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--phi0-case", choices=otsuki.PHI0_CASES, default="0")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_otsuki)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("suite", nargs="?", default="all", choices=("all",) + report.SUITES)
    p.add_argument("--tol", type=float, default=None, help="override every tolerance")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure", help="render one of the standard figures to SVG")
    p.add_argument("figure_id", type=int, choices=figures.FIGURE_IDS)
    p.add_argument("--out", default=None)
    p.add_argument("--projection", type=_float_triple, default=figures.DEFAULT_VIEW, metavar="X,Y,Z")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, surface.DomainError, otsuki.OtsukiError) as exc:
        print(f"fbma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # remaining ValueErrors come from parameter validation
        print(f"fbma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
