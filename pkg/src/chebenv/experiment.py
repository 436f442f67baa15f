"""Convergence studies and timing runs.

The algebraic error of an approximation is measured on the zero set of the
envelope function in parameter space, traced by grid scans and bisection.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .bipoly import BiPoly
from .envelope import RationalFamily, envelope_function
from .errors import EmptyZeroSet
from .implicitize import ImplicitApproximation, implicitize, reference_triangle

__all__ = [
    "ZeroSetSample", "ConvergenceRow", "ConvergenceTable", "BenchRow",
    "trace_zero_set", "max_algebraic_error", "subdivision_regions",
    "pick_center", "convergence_study", "benchmark", "EPS_FLOOR", "ZTOL_REL",
]

EPS_FLOOR = 1e-15
ZTOL_REL = 1e-12
CENTER_TOL_REL = 1e-8
_BISECT_ITERS = 80

Region = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True, eq=False)
class ZeroSetSample:
    points: np.ndarray  # (n, 2) array of (s, t)
    region: Region
    ztol: float

    def __len__(self) -> int:
        return len(self.points)


def _bisect(h: BiPoly, a: np.ndarray, b: np.ndarray, ztol: float) -> np.ndarray:
    """Vectorised bisection between bracket endpoints ``a`` and ``b`` (``(n, 2)``)."""
    lo, hi = a.copy(), b.copy()
    flo = h(lo[:, 0], lo[:, 1])
    out = np.full_like(lo, np.nan)
    live = np.ones(len(lo), dtype=bool)
    for _ in range(_BISECT_ITERS):
        if not live.any():
            break
        mid = 0.5 * (lo[live] + hi[live])
        fm = h(mid[:, 0], mid[:, 1])
        idx = np.nonzero(live)[0]
        hit = np.abs(fm) <= ztol
        out[idx[hit]] = mid[hit]
        live[idx[hit]] = False
        rest = ~hit
        idx, mid, fm = idx[rest], mid[rest], fm[rest]
        same = np.sign(fm) == np.sign(flo[idx])
        lo[idx[same]] = mid[same]
        flo[idx[same]] = fm[same]
        hi[idx[~same]] = mid[~same]
    if live.any():
        mid = 0.5 * (lo[live] + hi[live])
        out[live] = mid
    return out


def _dedupe(points: np.ndarray, radius: float) -> np.ndarray:
    if len(points) == 0 or radius <= 0:
        return points
    order = np.lexsort((points[:, 1], points[:, 0]))
    cells: dict[tuple[int, int], list[int]] = {}
    kept: list[int] = []
    r2 = radius * radius
    for k in order:
        p = points[k]
        ci, cj = int(math.floor(p[0] / radius)), int(math.floor(p[1] / radius))
        dup = False
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for m in cells.get((ci + di, cj + dj), ()):
                    if np.sum((points[m] - p) ** 2) < r2:
                        dup = True
                        break
                if dup:
                    break
            if dup:
                break
        if not dup:
            cells.setdefault((ci, cj), []).append(k)
            kept.append(k)
    return points[np.sort(np.array(kept))]


def trace_zero_set(f: RationalFamily, region: Region | None = None, resolution: int = 256,
                   h: BiPoly | None = None, ztol: float | None = None) -> ZeroSetSample:
    """Sample the zero set of the envelope function inside ``region``.

    A ``resolution x resolution`` grid is scanned along lines of constant
    ``s`` and of constant ``t``; sign changes are refined by bisection and
    grid values that already vanish are kept as they are.
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    h = envelope_function(f) if h is None else h
    region = f.domain if region is None else (tuple(region[0]), tuple(region[1]))
    ztol = ZTOL_REL * h.max_abs() if ztol is None else ztol
    (s0, s1), (t0, t1) = region
    ss = np.linspace(s0, s1, resolution)
    tt = np.linspace(t0, t1, resolution)
    S, T = np.meshgrid(ss, tt, indexing="ij")
    Hv = np.asarray(h(S, T), dtype=float)
    grid_pts = np.stack([S, T], axis=-1)

    found = [grid_pts[np.abs(Hv) <= ztol]]
    sgn = np.sign(Hv)
    # along t (constant-s lines), then along s (constant-t lines)
    for axis in (1, 0):
        a_sl = [slice(None), slice(None)]
        b_sl = [slice(None), slice(None)]
        a_sl[axis], b_sl[axis] = slice(None, -1), slice(1, None)
        a_sl, b_sl = tuple(a_sl), tuple(b_sl)
        change = (sgn[a_sl] * sgn[b_sl]) < 0
        if change.any():
            found.append(_bisect(h, grid_pts[a_sl][change], grid_pts[b_sl][change], ztol))
    pts = np.concatenate(found, axis=0)
    if len(pts):
        ok = np.abs(h(pts[:, 0], pts[:, 1])) <= ztol
        pts = pts[ok]
    if len(pts) == 0:
        raise EmptyZeroSet(f"envelope function has no zero in region {region}")
    diam = math.hypot(s1 - s0, t1 - t0)
    pts = _dedupe(pts, diam / (4 * resolution))
    return ZeroSetSample(points=pts, region=region, ztol=ztol)


def max_algebraic_error(a: ImplicitApproximation, f: RationalFamily, zs: ZeroSetSample) -> float:
    """``max |q(p(s, t))|`` over the zero-set samples, with ``q`` rescaled to unit coefficients."""
    if len(zs) == 0:
        raise EmptyZeroSet("zero-set sample is empty")
    X, Y = f(zs.points[:, 0], zs.points[:, 1])
    return float(np.max(np.abs(a.q(X, Y, normalized=True))))


def subdivision_regions(center, i_max: int, base_region: Region) -> list[Region]:
    """Squares of diameter ``2**-i`` centred at ``center``, clipped to ``base_region``."""
    if i_max < 0:
        raise ValueError("i_max must be >= 0")
    s0, t0 = center
    (bs0, bs1), (bt0, bt1) = base_region
    out = []
    for i in range(i_max + 1):
        half = 0.5 * 2.0 ** (-i) / math.sqrt(2.0)
        out.append(((max(bs0, s0 - half), min(bs1, s0 + half)),
                    (max(bt0, t0 - half), min(bt1, t0 + half))))
    return out


def pick_center(f: RationalFamily, resolution: int = 256, h: BiPoly | None = None) -> tuple[float, float]:
    """Zero-set sample nearest the domain midpoint (ties: smaller s, then smaller t)."""
    zs = trace_zero_set(f, resolution=resolution, h=h)
    (s0, s1), (t0, t1) = f.domain
    mid = np.array([0.5 * (s0 + s1), 0.5 * (t0 + t1)])
    dist = np.sum((zs.points - mid) ** 2, axis=1)
    order = np.lexsort((zs.points[:, 1], zs.points[:, 0], dist))
    return tuple(float(v) for v in zs.points[order[0]])


@dataclass
class ConvergenceRow:
    d: int
    i: int
    region: Region
    epsilon: float | None  # None when below EPS_FLOOR
    rate: float | None
    rows: int
    cols: int
    assembly_ms: float
    svd_ms: float

    @property
    def diameter(self) -> float:
        return 2.0 ** (-self.i)


CSV_COLUMNS = ["d", "i", "diameter", "epsilon", "rate", "rows", "cols", "assembly_ms", "svd_ms"]


@dataclass
class ConvergenceTable:
    rows: list[ConvergenceRow] = field(default_factory=list)
    center: tuple[float, float] | None = None

    def get(self, d: int, i: int) -> ConvergenceRow:
        for r in self.rows:
            if r.d == d and r.i == i:
                return r
        raise KeyError((d, i))

    @property
    def degrees(self) -> list[int]:
        return sorted({r.d for r in self.rows})

    @property
    def levels(self) -> list[int]:
        return sorted({r.i for r in self.rows})

    def column(self, d: int) -> list[ConvergenceRow]:
        return sorted((r for r in self.rows if r.d == d), key=lambda r: r.i)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in sorted(self.rows, key=lambda r: (r.d, r.i)):
            if r.i == 0:
                rate = ""
            else:
                rate = "n/a" if r.rate is None else repr(r.rate)
            w.writerow([r.d, r.i, repr(r.diameter),
                        "n/a" if r.epsilon is None else repr(r.epsilon),
                        rate, r.rows, r.cols, repr(r.assembly_ms), repr(r.svd_ms)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> ConvergenceTable:
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            def num(v):
                return None if v in ("", "n/a") else float(v)
            rows.append(ConvergenceRow(
                d=int(rec["d"]), i=int(rec["i"]), region=None,
                epsilon=num(rec["epsilon"]), rate=num(rec["rate"]),
                rows=int(rec["rows"]), cols=int(rec["cols"]),
                assembly_ms=float(rec["assembly_ms"]), svd_ms=float(rec["svd_ms"])))
        return cls(rows=rows)

    def format(self) -> str:
        """Plain-text table: one row per level, an (epsilon, rate) pair per degree."""
        degs = self.degrees
        head = f"{'diam':>8} |" + "".join(f" {'eps d=' + str(d):>10} {'r':>7} |" for d in degs)
        lines = [head, "-" * len(head)]
        for i in self.levels:
            cells = []
            for d in degs:
                try:
                    r = self.get(d, i)
                except KeyError:
                    cells.append(f" {'':>10} {'':>7} |")
                    continue
                eps = "n/a" if r.epsilon is None else f"{r.epsilon:.2e}"
                if i == 0:
                    rate = "-"
                else:
                    rate = "n/a" if r.rate is None else f"{r.rate:.3f}"
                cells.append(f" {eps:>10} {rate:>7} |")
            lines.append(f"{'2^-' + str(i):>8} |" + "".join(cells))
        return "\n".join(lines)


def convergence_study(f: RationalFamily, d_max: int, i_max: int, center=None,
                      resolution: int = 256, workers: int | None = None,
                      fixed_triangle: bool = True) -> ConvergenceTable:
    """Errors and rates for degrees ``1..d_max`` on nested regions ``0..i_max``.

    With ``fixed_triangle`` the implicit polynomials of every level share the
    reference triangle of the base family, so errors at different levels are
    measured in the same units.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    h = envelope_function(f)
    if center is None:
        center = pick_center(f, resolution=resolution, h=h)
    else:
        center = (float(center[0]), float(center[1]))
        hv = abs(h(*center))
        if hv > CENTER_TOL_REL * h.max_abs():
            raise EmptyZeroSet(f"center not on envelope zero set (|h| = {hv:.3e})")
    triangle = reference_triangle(f) if fixed_triangle else None
    regions = subdivision_regions(center, i_max, f.domain)
    zero_sets = [trace_zero_set(f.restrict(reg), resolution=resolution, h=h) for reg in regions]
    table = ConvergenceTable(center=center)
    for d in range(1, d_max + 1):
        prev = None
        for i, (reg, zs) in enumerate(zip(regions, zero_sets)):
            fi = f.restrict(reg)
            a = implicitize(fi, d, triangle=triangle, workers=workers)
            eps = max_algebraic_error(a, fi, zs)
            eps = eps if eps >= EPS_FLOOR else None
            rate = None
            if i > 0 and prev is not None and eps is not None and eps > 0:
                rate = math.log2(prev / eps)
            table.rows.append(ConvergenceRow(
                d=d, i=i, region=reg, epsilon=eps, rate=rate,
                rows=a.matrix_shape[0], cols=a.matrix_shape[1],
                assembly_ms=1e3 * a.timings["assembly"], svd_ms=1e3 * a.timings["svd"]))
            prev = eps
    return table


@dataclass
class BenchRow:
    d: int
    rows: int
    cols: int
    assembly_ms: float
    svd_ms: float

    @property
    def entries(self) -> int:
        return self.rows * self.cols

    @property
    def total_ms(self) -> float:
        return self.assembly_ms + self.svd_ms


BENCH_COLUMNS = ["d", "rows", "cols", "entries", "assembly_ms", "svd_ms", "total_ms"]


def benchmark(f: RationalFamily, d_list, workers: int | None = None) -> list[BenchRow]:
    """Time assembly and SVD per degree; the first run of each degree is discarded."""
    out = []
    for d in d_list:
        implicitize(f, d, workers=workers)
        a = implicitize(f, d, workers=workers)
        out.append(BenchRow(d=d, rows=a.matrix_shape[0], cols=a.matrix_shape[1],
                            assembly_ms=1e3 * a.timings["assembly"],
                            svd_ms=1e3 * a.timings["svd"]))
    return out


def bench_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow([r.d, r.rows, r.cols, r.entries, repr(r.assembly_ms), repr(r.svd_ms),
                    repr(r.total_ms)])
    return buf.getvalue()
