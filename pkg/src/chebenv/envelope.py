"""Rational families of planar curves and their envelope function."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .bipoly import DEFAULT_TRIM_TOL, BiPoly, degree_trim
from .errors import DenominatorNearZero

__all__ = ["RationalFamily", "eval_family", "envelope_function", "jacobian_det",
           "W_REL_TOL"]

# |w| below this fraction of max|w coeffs| counts as vanishing
W_REL_TOL = 1e-14
_CHECK_GRID = 64

Interval = tuple[float, float]


def _interval(iv) -> Interval:
    lo, hi = (float(v) for v in iv)
    if not np.isfinite(lo) or not np.isfinite(hi) or not hi > lo:
        raise ValueError(f"interval must have positive length, got [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True, eq=False)
class RationalFamily:
    """The map ``p(s, t) = (x/w, y/w)`` over the rectangle ``I x J``.

    ``domain`` is ``((s_lo, s_hi), (t_lo, t_hi))``.  Construction checks that
    ``w`` does not vanish or change sign on a dense sample grid.
    """

    x: BiPoly
    y: BiPoly
    w: BiPoly
    domain: tuple[Interval, Interval]

    def __post_init__(self):
        for name in ("x", "y", "w"):
            v = getattr(self, name)
            if not isinstance(v, BiPoly):
                object.__setattr__(self, name, BiPoly(v))
        dom = (_interval(self.domain[0]), _interval(self.domain[1]))
        object.__setattr__(self, "domain", dom)
        if self.w.is_zero():
            raise DenominatorNearZero("w is identically zero")
        ss = np.linspace(*dom[0], _CHECK_GRID)
        tt = np.linspace(*dom[1], _CHECK_GRID)
        self.check_denominator(*np.meshgrid(ss, tt, indexing="ij"))

    @property
    def bidegree(self) -> tuple[int, int]:
        """Common bidegree ``(n1, n2)`` of the (trimmed) numerators and denominator."""
        degs = [degree_trim(p, 0.0).bidegree for p in (self.x, self.y, self.w)]
        return max(d[0] for d in degs), max(d[1] for d in degs)

    @property
    def interval_s(self) -> Interval:
        return self.domain[0]

    @property
    def interval_t(self) -> Interval:
        return self.domain[1]

    def restrict(self, region) -> RationalFamily:
        """Same map over a different parameter rectangle."""
        return RationalFamily(self.x, self.y, self.w, tuple(region))

    def scaled(self, factor: float) -> RationalFamily:
        """Multiply x, y and w jointly; the point map is unchanged."""
        return RationalFamily(self.x * factor, self.y * factor, self.w * factor, self.domain)

    def check_denominator(self, s, t) -> np.ndarray:
        """Return ``w(s, t)``, raising if it vanishes or changes sign."""
        wv = np.asarray(self.w(s, t), dtype=float)
        bound = W_REL_TOL * self.w.max_abs()
        small = np.abs(wv) < bound
        if np.any(small):
            idx = np.unravel_index(np.argmax(small), small.shape) if wv.ndim else ()
            s0 = np.asarray(s)[idx] if np.ndim(s) else s
            t0 = np.asarray(t)[idx] if np.ndim(t) else t
            raise DenominatorNearZero(f"w vanishes near (s, t) = ({float(s0):g}, {float(t0):g})")
        if wv.ndim and (np.any(wv > 0) and np.any(wv < 0)):
            raise DenominatorNearZero("w changes sign over the parameter domain")
        return wv

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for p in (self.x, self.y, self.w):
            h.update(repr(p.coeffs.shape).encode())
            h.update(np.ascontiguousarray(p.coeffs).tobytes())
        h.update(np.asarray(self.domain, dtype=float).tobytes())
        return h.hexdigest()

    def __call__(self, s, t):
        return eval_family(self, s, t)


def eval_family(f: RationalFamily, s, t):
    """Point(s) ``p(s, t) = (x/w, y/w)``; arrays broadcast."""
    wv = f.check_denominator(s, t)
    xv = f.x(s, t) / wv
    yv = f.y(s, t) / wv
    if np.ndim(xv) == 0:
        return float(xv), float(yv)
    return xv, yv


def envelope_function(f: RationalFamily, tol: float = DEFAULT_TRIM_TOL) -> BiPoly:
    """Envelope function ``h = det [[x, x_s, x_t], [y, y_s, y_t], [w, w_s, w_t]]``.

    Expanded exactly in the power basis, then degree-trimmed with relative
    tolerance ``tol``.
    """
    x, y, w = f.x, f.y, f.w
    xs, xt = x.diff("s"), x.diff("t")
    ys, yt = y.diff("s"), y.diff("t")
    ws, wt = w.diff("s"), w.diff("t")
    h = x * (ys * wt - yt * ws) - y * (xs * wt - xt * ws) + w * (xs * yt - xt * ys)
    return degree_trim(h, tol)


def jacobian_det(f: RationalFamily, s: float, t: float, step: float = 1e-6) -> float:
    """Jacobian determinant of ``p`` at ``(s, t)`` by central differences.

    Uses only point evaluations of the family, so it is independent of
    :func:`envelope_function`.
    """
    xp, yp = eval_family(f, s + step, t)
    xm, ym = eval_family(f, s - step, t)
    dxs, dys = (xp - xm) / (2 * step), (yp - ym) / (2 * step)
    xp, yp = eval_family(f, s, t + step)
    xm, ym = eval_family(f, s, t - step)
    dxt, dyt = (xp - xm) / (2 * step), (yp - ym) / (2 * step)
    return dxs * dyt - dxt * dys
