"""Approximate implicitization of envelopes via Chebyshev coefficient matrices.

The implicit polynomial ``q`` is written in the triangular Bernstein basis of
total degree ``d`` over a reference triangle, the cofactor ``lambda`` in the
tensor Bernstein basis of bidegree ``(k1, k2)`` over the parameter
rectangle.  Each basis image ``w**d * beta_k(p)`` and ``-h**2 * alpha_l`` is
sampled on a Chebyshev grid and transformed; the columns form the matrix
``D``.  The right singular vector of the smallest singular value minimises
the Chebyshev-weighted L2 norm of ``(q o p) w**d - lambda h**2``.
"""

from __future__ import annotations

import logging
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from .bipoly import BiPoly
from .chebtransform import ChebGrid, cheb_transform_stack
from .envelope import RationalFamily, envelope_function
from .errors import DegenerateImage, DegenerateTriangle, NumericalFailure

log = logging.getLogger(__name__)

__all__ = [
    "ImplicitBasisSpec", "CollocationMatrix", "ImplicitApproximation",
    "lambda_degrees", "working_bidegree", "reference_triangle",
    "bernstein_indices", "barycentric", "triangular_bernstein_eval",
    "tensor_bernstein_eval", "make_spec", "build_D", "solve_min", "implicitize",
    "THREADS_ENV",
]

THREADS_ENV = "CHEBENV_THREADS"
_TRIANGLE_SAMPLES = 33
_PAD_FRACTION = 0.1
_MIN_PAD = 1e-6


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, env)
    return 1


# ---------------------------------------------------------------------------
# degree bookkeeping

def lambda_degrees(f: RationalFamily, d: int, h: BiPoly | None = None) -> tuple[int, int]:
    """Smallest cofactor bidegree that admits the exact relation."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    h = envelope_function(f) if h is None else h
    n1, n2 = f.bidegree
    return max(0, d * n1 - 2 * h.deg_s), max(0, d * n2 - 2 * h.deg_t)


def working_bidegree(f: RationalFamily, d: int, k1: int, k2: int,
                     h: BiPoly | None = None) -> tuple[int, int]:
    """Bidegree ``(L1, L2)`` large enough to hold the whole residual."""
    h = envelope_function(f) if h is None else h
    n1, n2 = f.bidegree
    return max(d * n1, k1 + 2 * h.deg_s), max(d * n2, k2 + 2 * h.deg_t)


# ---------------------------------------------------------------------------
# bases

def reference_triangle(f: RationalFamily) -> np.ndarray:
    """Right triangle containing the padded bounding box of the sampled image.

    Returns a ``(3, 2)`` array of vertices.
    """
    ss = np.linspace(*f.interval_s, _TRIANGLE_SAMPLES)
    tt = np.linspace(*f.interval_t, _TRIANGLE_SAMPLES)
    X, Y = f(*np.meshgrid(ss, tt, indexing="ij"))
    lo = np.array([X.min(), Y.min()])
    ext = np.array([X.max(), Y.max()]) - lo
    if not np.any(ext > 0):
        raise DegenerateImage("image of the family is a single point")
    pad = np.maximum(_PAD_FRACTION * ext, _MIN_PAD)
    x0, y0 = lo - pad
    W, H = ext + 2 * pad
    return np.array([[x0, y0], [x0 + 2 * W, y0], [x0, y0 + 2 * H]])


def _check_triangle(triangle) -> np.ndarray:
    tri = np.asarray(triangle, dtype=float).reshape(3, 2)
    e1, e2 = tri[1] - tri[0], tri[2] - tri[0]
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    diam2 = max(np.sum((tri[a] - tri[b]) ** 2) for a, b in ((0, 1), (0, 2), (1, 2)))
    if not area > 1e-12 * diam2:
        raise DegenerateTriangle(f"triangle {tri.tolist()} is degenerate")
    return tri


def _barycentric_matrix(triangle) -> np.ndarray:
    tri = _check_triangle(triangle)
    A = np.vstack([tri.T, np.ones(3)])
    return np.linalg.inv(A)


def barycentric(triangle, x, y, w=1.0) -> np.ndarray:
    """Barycentric coordinates ``(u, v, w)`` of ``(x, y)`` w.r.t. the triangle.

    With a homogeneous weight ``w`` the point is ``(x/w, y/w)`` and the
    coordinates are returned multiplied by ``w``.  Output has shape
    ``(3,) + broadcast shape``.
    """
    B = _barycentric_matrix(triangle)
    x, y, w = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, w)))
    return np.einsum("ij,j...->i...", B, np.stack([x, y, w]))


def bernstein_indices(d: int) -> list[tuple[int, int, int]]:
    """Multi-indices ``(i, j, k)``, ``k = d - i - j``, in lexicographic ``(i, j)`` order."""
    return [(i, j, d - i - j) for i in range(d + 1) for j in range(d - i + 1)]


def _power_table(a: np.ndarray, d: int) -> list[np.ndarray]:
    out = [np.ones_like(a)]
    for _ in range(d):
        out.append(out[-1] * a)
    return out


def _triangular_from_bary(d: int, bary: np.ndarray, which=None) -> np.ndarray:
    pu, pv, pw = (_power_table(b, d) for b in bary)
    fd = factorial(d)
    idx = bernstein_indices(d)
    if which is not None:
        idx = [idx[m] for m in which]
    return np.stack([
        fd / (factorial(i) * factorial(j) * factorial(k)) * pu[i] * pv[j] * pw[k]
        for i, j, k in idx
    ])


def triangular_bernstein_eval(d: int, triangle, point) -> np.ndarray:
    """All ``M = (d+1)(d+2)/2`` degree-``d`` Bernstein polynomials at ``point``.

    ``point`` is ``(x, y)`` with scalar or array entries; the result has
    shape ``(M,) + point shape``.
    """
    x, y = point
    return _triangular_from_bary(d, barycentric(triangle, x, y))


def _univariate_bernstein(k: int, u: np.ndarray) -> np.ndarray:
    pu = _power_table(u, k)
    pv = _power_table(1.0 - u, k)
    return np.stack([comb(k, i) * pu[i] * pv[k - i] for i in range(k + 1)])


def tensor_bernstein_eval(bidegree, domain, s, t) -> np.ndarray:
    """Products ``B_i^{k1}(s_hat) B_j^{k2}(t_hat)`` in row-major ``(i, j)`` order."""
    k1, k2 = bidegree
    (s0, s1), (t0, t1) = domain
    u = (np.asarray(s, dtype=float) - s0) / (s1 - s0)
    v = (np.asarray(t, dtype=float) - t0) / (t1 - t0)
    u, v = np.broadcast_arrays(u, v)
    bs = _univariate_bernstein(k1, u)
    bt = _univariate_bernstein(k2, v)
    return (bs[:, None] * bt[None, :]).reshape((-1,) + u.shape)


# ---------------------------------------------------------------------------
# data types

@dataclass(frozen=True, eq=False)
class ImplicitBasisSpec:
    d: int
    triangle: np.ndarray
    lambda_bidegree: tuple[int, int]
    lambda_domain: tuple[tuple[float, float], tuple[float, float]]
    working_bidegree: tuple[int, int]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("degree must be >= 1")
        object.__setattr__(self, "triangle", _check_triangle(self.triangle))

    @property
    def M(self) -> int:
        return (self.d + 1) * (self.d + 2) // 2

    @property
    def n_lambda(self) -> int:
        k1, k2 = self.lambda_bidegree
        return (k1 + 1) * (k2 + 1)

    @property
    def n_cols(self) -> int:
        return self.M + self.n_lambda

    @property
    def n_rows(self) -> int:
        L1, L2 = self.working_bidegree
        return (L1 + 1) * (L2 + 1)


@dataclass(frozen=True, eq=False)
class CollocationMatrix:
    """``D = (D_q, D_lambda)``.

    Columns ``0..M-1`` hold the ``beta`` images in :func:`bernstein_indices`
    order, the rest the ``alpha`` images in row-major ``(i, j)`` order.  Row
    ``i * (L2+1) + j`` holds the coefficient of ``T_i T_j``.
    """

    D: np.ndarray
    spec: ImplicitBasisSpec
    row_weighting: bool = True

    @property
    def D_q(self) -> np.ndarray:
        return self.D[:, : self.spec.M]

    @property
    def D_lambda(self) -> np.ndarray:
        return self.D[:, self.spec.M:]

    @property
    def shape(self) -> tuple[int, int]:
        return self.D.shape

    def column_labels(self) -> list[tuple[str, tuple[int, ...]]]:
        k1, k2 = self.spec.lambda_bidegree
        return ([("beta", ijk) for ijk in bernstein_indices(self.spec.d)]
                + [("alpha", (i, j)) for i in range(k1 + 1) for j in range(k2 + 1)])


@dataclass(frozen=True, eq=False)
class ImplicitApproximation:
    c_q: np.ndarray
    c_lambda: np.ndarray
    sigma_min: float
    sigma_gap: float
    spec: ImplicitBasisSpec
    fingerprint: str
    domain: tuple[tuple[float, float], tuple[float, float]]
    matrix_shape: tuple[int, int]
    row_weighting: bool = True
    timings: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def c(self) -> np.ndarray:
        return np.concatenate([self.c_q, self.c_lambda])

    def unit_c_q(self) -> np.ndarray:
        nrm = np.linalg.norm(self.c_q)
        if nrm == 0.0:
            raise NumericalFailure("implicit coefficients vanish; q is undefined")
        return self.c_q / nrm

    def q(self, x, y, normalized: bool = False):
        """Evaluate the implicit polynomial at planar point(s)."""
        c = self.unit_c_q() if normalized else self.c_q
        vals = np.tensordot(c, triangular_bernstein_eval(self.spec.d, self.spec.triangle, (x, y)), axes=1)
        return float(vals) if np.ndim(vals) == 0 else vals

    def lam(self, s, t):
        vals = np.tensordot(self.c_lambda, tensor_bernstein_eval(
            self.spec.lambda_bidegree, self.spec.lambda_domain, s, t), axes=1)
        return float(vals) if np.ndim(vals) == 0 else vals


# ---------------------------------------------------------------------------
# assembly and solve

def make_spec(f: RationalFamily, d: int, k: tuple[int, int] | None = None,
              triangle=None, h: BiPoly | None = None) -> ImplicitBasisSpec:
    h = envelope_function(f) if h is None else h
    k1, k2 = lambda_degrees(f, d, h) if k is None else (int(k[0]), int(k[1]))
    if k1 < 0 or k2 < 0:
        raise ValueError("lambda bidegree must be nonnegative")
    tri = reference_triangle(f) if triangle is None else triangle
    return ImplicitBasisSpec(d=d, triangle=tri, lambda_bidegree=(k1, k2),
                             lambda_domain=f.domain,
                             working_bidegree=working_bidegree(f, d, k1, k2, h))


def _row_weights(L1: int, L2: int) -> np.ndarray:
    i = (np.arange(L1 + 1) > 0).astype(float)
    j = (np.arange(L2 + 1) > 0).astype(float)
    return 2.0 ** (-0.5 * np.add.outer(i, j)).ravel()


def build_D(f: RationalFamily, spec: ImplicitBasisSpec, row_weighting: bool = True,
            h: BiPoly | None = None, workers: int | None = None) -> CollocationMatrix:
    """Assemble the Chebyshev coefficient matrix of all basis-function images."""
    h = envelope_function(f) if h is None else h
    L1, L2 = spec.working_bidegree
    grid = ChebGrid(L1, L2, f.interval_s, f.interval_t)
    S, T = grid.mesh()
    Wv = f.check_denominator(S, T)
    # homogeneous barycentric coordinates: beta_k(p) * w**d without dividing by w
    bary = barycentric(spec.triangle, f.x(S, T), f.y(S, T), Wv)
    neg_h2 = -np.asarray(h(S, T)) ** 2
    n_rows, M = spec.n_rows, spec.M
    D = np.empty((n_rows, spec.n_cols))

    def q_block(cols):
        vals = _triangular_from_bary(spec.d, bary, cols)
        return cols, cheb_transform_stack(vals).reshape(len(cols), n_rows).T

    def lam_block(cols):
        alpha = tensor_bernstein_eval(spec.lambda_bidegree, spec.lambda_domain, S, T)
        vals = alpha[[c - M for c in cols]] * neg_h2
        return cols, cheb_transform_stack(vals).reshape(len(cols), n_rows).T

    jobs = [(q_block, list(range(M))), (lam_block, list(range(M, spec.n_cols)))]
    nw = _workers(workers)
    if nw > 1:
        chunks = []
        for fn, cols in jobs:
            for part in np.array_split(np.array(cols), min(nw, len(cols))):
                if part.size:
                    chunks.append((fn, part.tolist()))
        with ThreadPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(lambda job: job[0](job[1]), chunks))
    else:
        results = [fn(cols) for fn, cols in jobs if cols]
    for cols, block in results:
        D[:, cols] = block
    if row_weighting:
        D *= _row_weights(L1, L2)[:, None]
    return CollocationMatrix(D=D, spec=spec, row_weighting=row_weighting)


def solve_min(D) -> tuple[float, float, np.ndarray]:
    """Smallest singular value, gap ratio and unit right singular vector of ``D``.

    The vector's largest-magnitude entry is made positive.
    """
    A = np.asarray(getattr(D, "D", D), dtype=float)
    rows, cols = A.shape
    if rows < cols:
        warnings.warn(f"matrix is wide ({rows}x{cols}); padding with zero rows",
                      RuntimeWarning, stacklevel=2)
        A = np.vstack([A, np.zeros((cols - rows, cols))])
    try:
        _, sv, vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    smin = float(sv[-1])
    if sv.size < 2:
        gap = float("inf")
    else:
        gap = float(sv[-2] / smin) if smin > 0 else float("inf")
    c = vt[-1].copy()
    if c[np.argmax(np.abs(c))] < 0:
        c = -c
    return smin, gap, c


def implicitize(f: RationalFamily, d: int, k: tuple[int, int] | None = None,
                triangle=None, row_weighting: bool = True,
                workers: int | None = None) -> ImplicitApproximation:
    """Degree-``d`` implicit approximation of the envelope of ``f``.

    ``k`` pins the cofactor bidegree and ``triangle`` the reference triangle
    of ``q``; by default both are derived from the family.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    t0 = time.perf_counter()
    h = envelope_function(f)
    spec = make_spec(f, d, k=k, triangle=triangle, h=h)
    cm = build_D(f, spec, row_weighting=row_weighting, h=h, workers=workers)
    t1 = time.perf_counter()
    smin, gap, c = solve_min(cm)
    t2 = time.perf_counter()
    if gap < 10:
        log.info("near-degenerate minimum (sigma gap %.3g) at degree %d", gap, d)
    return ImplicitApproximation(
        c_q=c[: spec.M], c_lambda=c[spec.M:], sigma_min=smin, sigma_gap=gap,
        spec=spec, fingerprint=f.fingerprint(), domain=f.domain,
        matrix_shape=cm.shape, row_weighting=row_weighting,
        timings={"assembly": t1 - t0, "svd": t2 - t1},
    )
