"""Tensor-product Chebyshev grids and the FFT-based coefficient transform.

Samples of a function on the tensor grid of Chebyshev points are turned into
the coefficients of its tensor Chebyshev interpolant by even extension
followed by a bivariate FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .errors import DimensionMismatch

__all__ = ["ChebGrid", "ChebCoeffs", "cheb_points", "cheb_transform_2d",
           "cheb_transform_stack", "even_extension", "cheb_eval_2d", "to_unit"]

Interval = tuple[float, float]


def cheb_points(L: int, interval: Interval = (0.0, 1.0)) -> np.ndarray:
    """Chebyshev points ``(1 - cos(j*pi/L)) / 2`` mapped onto ``interval``.

    ``L = 0`` yields the single midpoint.
    """
    lo, hi = interval
    if L < 0:
        raise ValueError("L must be nonnegative")
    if L == 0:
        return np.array([0.5 * (lo + hi)])
    j = np.arange(L + 1)
    unit = 0.5 * (1.0 - np.cos(j * np.pi / L))
    # pin the endpoints exactly
    unit[0], unit[-1] = 0.0, 1.0
    return lo + (hi - lo) * unit


def to_unit(x, interval: Interval):
    """Affine map of ``interval`` onto ``[-1, 1]``."""
    lo, hi = interval
    return (2.0 * np.asarray(x, dtype=float) - (lo + hi)) / (hi - lo)


@dataclass(frozen=True)
class ChebGrid:
    L1: int
    L2: int
    interval_s: Interval
    interval_t: Interval

    @property
    def nodes_s(self) -> np.ndarray:
        return cheb_points(self.L1, self.interval_s)

    @property
    def nodes_t(self) -> np.ndarray:
        return cheb_points(self.L2, self.interval_t)

    @property
    def shape(self) -> tuple[int, int]:
        return self.L1 + 1, self.L2 + 1

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(S, T)`` arrays of shape ``(L1+1, L2+1)``, ``indexing='ij'``."""
        return np.meshgrid(self.nodes_s, self.nodes_t, indexing="ij")

    def sample(self, fn) -> np.ndarray:
        S, T = self.mesh()
        return np.asarray(fn(S, T), dtype=float)


@dataclass(frozen=True, eq=False)
class ChebCoeffs:
    """Coefficients of ``sum c[i, j] T_i(u(s)) T_j(v(t))``.

    ``u`` and ``v`` map ``interval_s`` and ``interval_t`` increasingly onto
    ``[-1, 1]``.
    """

    coeffs: np.ndarray
    interval_s: Interval = (0.0, 1.0)
    interval_t: Interval = (0.0, 1.0)

    @property
    def L1(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def L2(self) -> int:
        return self.coeffs.shape[1] - 1

    def __call__(self, s, t):
        return cheb_eval_2d(self, s, t)


def even_extension(f: np.ndarray) -> np.ndarray:
    """Even extension of a ``(L1+1, L2+1)`` sample block to ``(2 L1, 2 L2)``.

    The extension is taken over the last two axes, so stacks of sample
    matrices are extended in one call.  Requires ``L1, L2 >= 1``.
    """
    L1, L2 = f.shape[-2] - 1, f.shape[-1] - 1
    fh = np.empty(f.shape[:-2] + (2 * L1, 2 * L2), dtype=f.dtype)
    fh[..., : L1 + 1, : L2 + 1] = f
    # rows L1+i <- L1-i
    fh[..., L1 + 1:, : L2 + 1] = f[..., L1 - 1:0:-1, :]
    # columns L2+j <- L2-j
    fh[..., : L1 + 1, L2 + 1:] = f[..., :, L2 - 1:0:-1]
    fh[..., L1 + 1:, L2 + 1:] = f[..., L1 - 1:0:-1, L2 - 1:0:-1]
    return fh


def _transform_axis(f: np.ndarray, axis: int) -> np.ndarray:
    """1-D version of the transform along ``axis`` (used when the other degree is 0)."""
    f = np.moveaxis(f, axis, -1)
    L = f.shape[-1] - 1
    if L == 0:
        return np.moveaxis(f.copy(), -1, axis)
    ext = np.concatenate([f, f[..., L - 1:0:-1]], axis=-1)
    g = np.fft.rfft(ext, axis=-1).real[..., : L + 1] / L
    g[..., 0] *= 0.5
    g[..., L] *= 0.5
    g *= (-1.0) ** np.arange(L + 1)
    return np.moveaxis(g, -1, axis)


def cheb_transform_stack(samples: np.ndarray) -> np.ndarray:
    """Transform a stack ``(..., L1+1, L2+1)`` of sample matrices at once."""
    f = np.asarray(samples, dtype=float)
    L1, L2 = f.shape[-2] - 1, f.shape[-1] - 1
    if L1 == 0 or L2 == 0:
        return _transform_axis(_transform_axis(f, -2), -1)
    fh = even_extension(f)
    ft = np.fft.fft2(fh, axes=(-2, -1))
    g = ft[..., : L1 + 1, : L2 + 1].real / (L1 * L2)
    g[..., 0, :] *= 0.5
    g[..., L1, :] *= 0.5
    g[..., :, 0] *= 0.5
    g[..., :, L2] *= 0.5
    # nodes run from -1 to 1, i.e. reversed relative to cos(j pi / L)
    sign = (-1.0) ** np.add.outer(np.arange(L1 + 1), np.arange(L2 + 1))
    return g * sign


def cheb_transform_2d(samples: np.ndarray, grid: ChebGrid | None = None) -> ChebCoeffs:
    """Tensor Chebyshev interpolation coefficients from samples on a Chebyshev grid.

    ``samples[i, j]`` is the value at ``(nodes_s[i], nodes_t[j])``.
    """
    f = np.asarray(samples, dtype=float)
    if f.ndim != 2:
        raise DimensionMismatch(f"samples must be a matrix, got shape {f.shape}")
    if grid is None:
        grid = ChebGrid(f.shape[0] - 1, f.shape[1] - 1, (0.0, 1.0), (0.0, 1.0))
    elif f.shape != grid.shape:
        raise DimensionMismatch(f"samples have shape {f.shape}, grid expects {grid.shape}")
    return ChebCoeffs(cheb_transform_stack(f), grid.interval_s, grid.interval_t)


def cheb_eval_2d(c: ChebCoeffs, s, t):
    """Evaluate a tensor Chebyshev expansion (Clenshaw in each variable)."""
    u = to_unit(s, c.interval_s)
    v = to_unit(t, c.interval_t)
    val = npcheb.chebval2d(u, v, c.coeffs)
    if np.ndim(val) == 0:
        return float(val)
    return val
