"""Command-line interface.

Subcommands::

    chebenv implicitize --family F --degree D [--k1 K --k2 K] [--no-row-weighting] [--out R]
    chebenv study       --family F --dmax D --imax I [--center s,t] [--out CSV]
    chebenv contour     --result R --grid N [--box x0,y0,x1,y1] [--out CSV]
    chebenv bench       --family F --degrees 1..6 [--out CSV]

Exit codes: 0 success, 2 malformed input, 3 numerical failure, 4 no envelope
in the domain.  Set ``CHEBENV_THREADS`` to cap the worker threads used for
matrix assembly.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (DegenerateImage, DegenerateTriangle, DenominatorNearZero,
                     EmptyZeroSet, EnvelopeError, NumericalFailure)
from .experiment import bench_csv, benchmark, convergence_study
from .files import FileFormatError, atomic_write, read_family, read_result, write_result
from .implicitize import implicitize

log = logging.getLogger("chebenv")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_NO_ENVELOPE = 4
N_MEMBERS = 64
MEMBER_SAMPLES = 129


class UsageError(Exception):
    pass


def _floats(text: str, n: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} must be {n} comma-separated numbers, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"{what} must be numeric, got {text!r}") from None
    if not all(np.isfinite(vals)):
        raise UsageError(f"{what} must be finite")
    return vals


def parse_degrees(text: str) -> list[int]:
    """``"1..6"`` or ``"1,3,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse degree list {text!r}") from None
    if not out or min(out) < 1:
        raise UsageError("degree must be ≥ 1")
    return out


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def cmd_implicitize(args) -> int:
    if args.degree < 1:
        raise UsageError("degree must be ≥ 1")
    if (args.k1 is None) != (args.k2 is None):
        raise UsageError("--k1 and --k2 must be given together")
    f, sha = read_family(args.family)
    k = None if args.k1 is None else (args.k1, args.k2)
    if k is not None and min(k) < 0:
        raise UsageError("--k1/--k2 must be nonnegative")
    a = implicitize(f, args.degree, k=k, row_weighting=not args.no_row_weighting)
    out = args.out or str(Path(args.family).with_suffix("")) + f".d{args.degree}.json"
    write_result(out, a, f, sha, __version__)
    rows, cols = a.matrix_shape
    print(f"sigma_min {a.sigma_min!r}")
    print(f"sigma_gap {a.sigma_gap!r}")
    print(f"matrix {rows}x{cols}")
    print(f"lambda_bidegree {a.spec.lambda_bidegree[0]},{a.spec.lambda_bidegree[1]}")
    print(f"working_bidegree {a.spec.working_bidegree[0]},{a.spec.working_bidegree[1]}")
    print(f"assembly_ms {1e3 * a.timings['assembly']:.3f}")
    print(f"svd_ms {1e3 * a.timings['svd']:.3f}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_study(args) -> int:
    if args.dmax < 1:
        raise UsageError("--dmax must be ≥ 1")
    if args.imax < 0:
        raise UsageError("--imax must be ≥ 0")
    f, _ = read_family(args.family)
    center = None if args.center is None else _floats(args.center, 2, "--center")
    table = convergence_study(f, args.dmax, args.imax, center=center,
                              resolution=args.resolution)
    s0, t0 = table.center
    print(f"center (s, t) = ({s0!r}, {t0!r})")
    print(table.format())
    if args.out:
        atomic_write(args.out, table.to_csv())
        print(f"wrote {args.out}")
    return EXIT_OK


def _contour_rows(a, box, n: int):
    x0, y0, x1, y1 = box
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Q = np.atleast_1d(a.q(X.ravel(), Y.ravel()))
    return X.ravel(), Y.ravel(), Q


def cmd_contour(args) -> int:
    if args.grid < 1:
        raise UsageError("--grid must be ≥ 1")
    a, f = read_result(args.result)
    if args.box is None:
        tri = a.spec.triangle
        x0, y0 = tri.min(axis=0)
        x1, y1 = tri.max(axis=0)
        box = (x0, y0, x1, y1)
    else:
        box = _floats(args.box, 4, "--box")
        if not (box[2] > box[0] and box[3] > box[1]):
            raise UsageError("--box needs x0 < x1 and y0 < y1")
    out = Path(args.out) if args.out else Path(str(Path(args.result).with_suffix("")) + "_contour.csv")
    X, Y, Q = _contour_rows(a, box, args.grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "q"])
    for row in zip(X.tolist(), Y.tolist(), Q.tolist()):
        w.writerow([repr(v) for v in row])
    atomic_write(out, buf.getvalue())

    # family members p(., t) for overlays
    members = out.with_name(out.stem + "_family.csv")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["member", "t", "s", "x", "y"])
    ss = np.linspace(*f.interval_s, MEMBER_SAMPLES)
    for m, tv in enumerate(np.linspace(*f.interval_t, N_MEMBERS)):
        px, py = f(ss, np.full_like(ss, tv))
        for sv, xv, yv in zip(ss.tolist(), px.tolist(), py.tolist()):
            w.writerow([m, repr(float(tv)), repr(sv), repr(xv), repr(yv)])
    atomic_write(members, buf.getvalue())
    print(f"wrote {out}")
    print(f"wrote {members}")
    return EXIT_OK


def cmd_bench(args) -> int:
    degrees = parse_degrees(args.degrees)
    f, _ = read_family(args.family)
    rows = benchmark(f, degrees)
    print(f"{'d':>3} {'rows':>6} {'cols':>6} {'entries':>9} {'assembly_ms':>12} {'svd_ms':>9} {'total_ms':>9}")
    for r in rows:
        print(f"{r.d:>3} {r.rows:>6} {r.cols:>6} {r.entries:>9} {r.assembly_ms:>12.3f} "
              f"{r.svd_ms:>9.3f} {r.total_ms:>9.3f}")
    if args.out:
        atomic_write(args.out, bench_csv(rows))
        print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chebenv", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("implicitize", help="approximate the envelope by a degree-d implicit curve")
    q.add_argument("--family", required=True)
    q.add_argument("--degree", type=int, required=True)
    q.add_argument("--k1", type=int)
    q.add_argument("--k2", type=int)
    q.add_argument("--no-row-weighting", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_implicitize)

    q = sub.add_parser("study", help="subdivision convergence study")
    q.add_argument("--family", required=True)
    q.add_argument("--dmax", type=int, required=True)
    q.add_argument("--imax", type=int, required=True)
    q.add_argument("--center")
    q.add_argument("--resolution", type=int, default=256)
    q.add_argument("--out")
    q.set_defaults(func=cmd_study)

    q = sub.add_parser("contour", help="sample q on a grid for external contouring")
    q.add_argument("--result", required=True)
    q.add_argument("--grid", type=int, required=True)
    q.add_argument("--box")
    q.add_argument("--out")
    q.set_defaults(func=cmd_contour)

    q = sub.add_parser("bench", help="timings and matrix sizes per degree")
    q.add_argument("--family", required=True)
    q.add_argument("--degrees", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, FileFormatError, DenominatorNearZero, DegenerateImage,
            DegenerateTriangle, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyZeroSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ENVELOPE
    except (NumericalFailure, EnvelopeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
