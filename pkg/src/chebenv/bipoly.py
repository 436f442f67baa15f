"""Bivariate polynomials in the tensor power basis.

A :class:`BiPoly` stores a coefficient matrix ``coeffs`` where entry
``(i, j)`` multiplies ``s**i * t**j``.  Instances are immutable; every
operation returns a new polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real

import numpy as np

DEFAULT_TRIM_TOL = 1e-12

__all__ = ["BiPoly", "eval_poly", "mul", "add", "scale", "diff", "degree_trim", "affine_substitute",
           "DEFAULT_TRIM_TOL"]


@dataclass(frozen=True, eq=False)
class BiPoly:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True)
        if c.ndim == 0:
            c = c.reshape(1, 1)
        elif c.ndim == 1:
            c = c.reshape(-1, 1)
        if c.ndim != 2 or c.size == 0:
            raise ValueError(f"coefficient matrix must be 2-D and nonempty, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value: float) -> BiPoly:
        return cls(np.array([[float(value)]]))

    @classmethod
    def zero(cls) -> BiPoly:
        return cls.constant(0.0)

    @classmethod
    def monomial(cls, i: int, j: int, coef: float = 1.0) -> BiPoly:
        c = np.zeros((i + 1, j + 1))
        c[i, j] = coef
        return cls(c)

    @classmethod
    def s(cls) -> BiPoly:
        return cls.monomial(1, 0)

    @classmethod
    def t(cls) -> BiPoly:
        return cls.monomial(0, 1)

    # -- properties ---------------------------------------------------
    @property
    def bidegree(self) -> tuple[int, int]:
        m, n = self.coeffs.shape
        return m - 1, n - 1

    @property
    def deg_s(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def deg_t(self) -> int:
        return self.coeffs.shape[1] - 1

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def padded(self, m: int, n: int) -> np.ndarray:
        """Coefficient matrix zero-padded to bidegree ``(m, n)``."""
        out = np.zeros((m + 1, n + 1))
        out[: self.coeffs.shape[0], : self.coeffs.shape[1]] = self.coeffs
        return out

    # -- operations ---------------------------------------------------
    def __call__(self, s, t):
        return eval_poly(self, s, t)

    def __add__(self, other):
        if isinstance(other, Real):
            other = BiPoly.constant(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return BiPoly(-self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Real):
            other = BiPoly.constant(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Real):
            return scale(self, float(other))
        if not isinstance(other, BiPoly):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> BiPoly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = BiPoly.constant(1.0)
        for _ in range(k):
            out = mul(out, self)
        return out

    def diff(self, var: str) -> BiPoly:
        return diff(self, var)

    def trim(self, tol: float = DEFAULT_TRIM_TOL) -> BiPoly:
        return degree_trim(self, tol)

    def __repr__(self) -> str:
        return f"BiPoly(bidegree={self.bidegree}, coeffs={self.coeffs.tolist()!r})"


def eval_poly(p: BiPoly, s, t):
    """Evaluate ``p`` at ``(s, t)`` by Horner's rule in ``t`` and then ``s``.

    ``s`` and ``t`` may be scalars or broadcast-compatible arrays.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    c = p.coeffs
    acc = None
    for i in range(c.shape[0] - 1, -1, -1):
        row = c[i]
        # inner Horner in t for the coefficient of s**i
        r = np.full(np.broadcast(s, t).shape, row[-1])
        for j in range(row.size - 2, -1, -1):
            r = r * t + row[j]
        acc = r if acc is None else acc * s + r
    if acc.ndim == 0:
        return float(acc)
    return acc


def mul(p: BiPoly, q: BiPoly) -> BiPoly:
    """Product of two polynomials (full 2-D convolution of coefficients)."""
    a, b = p.coeffs, q.coeffs
    if a.size > b.size:
        a, b = b, a
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    for (i, j), v in np.ndenumerate(a):
        if v != 0.0:
            out[i:i + b.shape[0], j:j + b.shape[1]] += v * b
    return BiPoly(out)


def add(p: BiPoly, q: BiPoly) -> BiPoly:
    m = max(p.deg_s, q.deg_s)
    n = max(p.deg_t, q.deg_t)
    return BiPoly(p.padded(m, n) + q.padded(m, n))


def scale(p: BiPoly, a: float) -> BiPoly:
    return BiPoly(a * p.coeffs)


def diff(p: BiPoly, var: str) -> BiPoly:
    """Exact partial derivative with respect to ``var`` (``"s"`` or ``"t"``)."""
    c = p.coeffs
    if var == "s":
        if c.shape[0] == 1:
            return BiPoly(np.zeros((1, c.shape[1])))
        k = np.arange(1, c.shape[0])[:, None]
        return BiPoly(k * c[1:, :])
    if var == "t":
        if c.shape[1] == 1:
            return BiPoly(np.zeros((c.shape[0], 1)))
        k = np.arange(1, c.shape[1])[None, :]
        return BiPoly(k * c[:, 1:])
    raise ValueError(f"var must be 's' or 't', got {var!r}")


def degree_trim(p: BiPoly, tol: float = DEFAULT_TRIM_TOL) -> BiPoly:
    """Drop trailing rows and columns that are negligible relative to ``max|coeffs|``.

    An identically zero (or entirely negligible) polynomial becomes the
    single-entry zero polynomial of bidegree ``(0, 0)``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    c = p.coeffs
    big = np.max(np.abs(c))
    if big == 0.0:
        return BiPoly.zero()
    keep = np.abs(c) > tol * big
    rows = np.nonzero(keep.any(axis=1))[0]
    cols = np.nonzero(keep.any(axis=0))[0]
    if rows.size == 0:
        return BiPoly.zero()
    return BiPoly(c[: rows[-1] + 1, : cols[-1] + 1])


def affine_substitute(p: BiPoly, s_map: tuple[float, float], t_map: tuple[float, float]) -> BiPoly:
    """``p(a*s + b, c*t + d)`` for ``s_map = (a, b)`` and ``t_map = (c, d)``."""
    a, b = s_map
    c, d = t_map
    su = BiPoly(np.array([[b], [a]]))
    tu = BiPoly(np.array([[d, c]]))
    spow = [BiPoly.constant(1.0)]
    for _ in range(p.deg_s):
        spow.append(mul(spow[-1], su))
    tpow = [BiPoly.constant(1.0)]
    for _ in range(p.deg_t):
        tpow.append(mul(tpow[-1], tu))
    out = BiPoly.zero()
    for (i, j), v in np.ndenumerate(p.coeffs):
        if v != 0.0:
            out = add(out, scale(mul(spow[i], tpow[j]), v))
    return out
