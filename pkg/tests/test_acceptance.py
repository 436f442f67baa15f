"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line
in the terminal summary (see ``conftest.py``)."""

import time

import numpy as np
import pytest

from chebenv.chebtransform import ChebGrid, cheb_transform_2d
from chebenv.envelope import envelope_function, jacobian_det
from chebenv.experiment import EPS_FLOOR, ConvergenceTable, convergence_study
from chebenv.implicitize import build_D, implicitize, make_spec

from conftest import (cusp_family, parabola_family, quintic_family, random_family,
                      random_poly, rational_sextic_family)
from reference import chebyshev_weighted_quadrature, dense_interpolation

acceptance = pytest.mark.acceptance


@pytest.fixture(scope="module")
def quintic_study():
    t0 = time.perf_counter()
    table = convergence_study(quintic_family(), 2, 4)
    return table, time.perf_counter() - t0


@acceptance(1, "exact recovery of the parabola at d=2")
def test_parabola_exact_recovery():
    f = parabola_family()
    t0 = time.perf_counter()
    a = implicitize(f, 2)
    elapsed = time.perf_counter() - t0
    s = np.linspace(0.0, 1.0, 50)
    err = np.abs(a.q(s, s * s, normalized=True)).max()
    print(f"sigma_min={a.sigma_min:.3e} max|q|={err:.3e} time={elapsed:.3f}s")
    assert a.sigma_min < 1e-10
    assert err < 1e-8
    assert elapsed < 1.0


@acceptance(2, "exact recovery of the cuspidal cubic at d=3")
def test_cusp_exact_recovery():
    # tangent lines of (s^2, s^3), direction (2, 3s), away from the cusp
    f = cusp_family(((0.5, 1.5), (-0.5, 0.5)))
    t0 = time.perf_counter()
    a = implicitize(f, 3)
    elapsed = time.perf_counter() - t0
    s = np.linspace(0.5, 1.5, 50)
    err = np.abs(a.q(s ** 2, s ** 3, normalized=True)).max()
    print(f"sigma_min={a.sigma_min:.3e} max|q|={err:.3e} time={elapsed:.3f}s")
    assert a.sigma_min < 1e-9
    assert err < 1e-7
    assert elapsed < 2.0


@acceptance(3, "median convergence rates near 2 (d=1) and 5 (d=2), levels 2..4")
def test_convergence_rates(quintic_study):
    table, elapsed = quintic_study
    print(table.format())
    print(f"time={elapsed:.2f}s")
    for d, target in ((1, 2.0), (2, 5.0)):
        rates = [r.rate for r in table.column(d) if r.i >= 2]
        assert None not in rates
        med = float(np.median(rates))
        print(f"d={d} rates={rates} median={med:.3f}")
        assert abs(med - target) <= 1.0
    assert elapsed < 60.0


@acceptance(4, "errors below 1e-15 shown as n/a; errors decrease with level")
def test_omission_rule_and_monotone(quintic_study):
    table, _ = quintic_study
    for d in table.degrees:
        eps = [r.epsilon for r in table.column(d)]
        finite = [e for e in eps if e is not None]
        assert all(e >= EPS_FLOOR for e in finite)
        assert all(b < a for a, b in zip(finite, finite[1:])), (d, eps)

    # an exact fit drives the error below the floor
    exact = convergence_study(parabola_family(), 2, 2, resolution=64)
    assert all(r.epsilon is None for r in exact.column(2))
    csv_text = exact.to_csv()
    assert "n/a" in csv_text and "n/a" in exact.format()
    back = ConvergenceTable.from_csv(csv_text)
    assert all(r.epsilon is None for r in back.column(2))


@acceptance(5, "FFT transform matches dense interpolation on 25 random polynomials")
def test_transform_matches_dense():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(25):
        m, n = rng.integers(0, 9, size=2)
        p = random_poly(rng, (m, n))
        g = ChebGrid(int(m), int(n), (0.0, 1.0), (0.0, 1.0))
        samples = g.sample(p)
        fast = cheb_transform_2d(samples, g).coeffs
        worst = max(worst, float(np.abs(fast - dense_interpolation(g, samples)).max()))
    elapsed = time.perf_counter() - t0
    print(f"max abs difference={worst:.3e} time={elapsed:.3f}s")
    assert worst <= 1e-11
    assert elapsed < 5.0


@acceptance(6, "weighted quadrature of the residual equals pi^2 ||Dc||^2")
def test_quadrature_identity():
    rng = np.random.default_rng(6)
    f = parabola_family()
    spec = make_spec(f, 2)
    D = build_D(f, spec, row_weighting=True).D
    for _ in range(10):
        c = rng.standard_normal(spec.n_cols)
        c /= np.linalg.norm(c)
        quad = chebyshev_weighted_quadrature(f, spec, c, factor=8)
        rhs = np.pi ** 2 * np.sum((D @ c) ** 2)
        assert abs(quad - rhs) <= 1e-8 * abs(rhs)


@acceptance(7, "finite-difference Jacobian equals h / w^3")
def test_jacobian_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(5):
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 3))
        f = random_family(rng, (m, n))
        h = envelope_function(f)
        pts = rng.uniform(0.0, 1.0, size=(50, 2))
        for s, t in pts:
            worst = max(worst, abs(jacobian_det(f, s, t) - h(s, t) / f.w(s, t) ** 3))
    print(f"max deviation={worst:.3e}")
    assert worst <= 1e-4


@acceptance(8, "bidegree (6,1) family at d=6 in under 10 s")
def test_performance_sextic():
    f = rational_sextic_family()
    assert f.bidegree == (6, 1)
    t0 = time.perf_counter()
    a = implicitize(f, 6)
    elapsed = time.perf_counter() - t0
    rows, cols = a.matrix_shape
    print(f"matrix {rows}x{cols} entries={rows * cols} "
          f"assembly={1e3 * a.timings['assembly']:.1f}ms svd={1e3 * a.timings['svd']:.1f}ms "
          f"total={elapsed:.3f}s sigma_min={a.sigma_min:.3e}")
    assert elapsed < 10.0
