import numpy as np
import pytest

from chebenv.bipoly import BiPoly
from chebenv.envelope import RationalFamily

S, T, ONE = BiPoly.s(), BiPoly.t(), BiPoly.constant(1.0)


def tangent_family(c, dc, domain, w=ONE):
    """Lines ``c(s) + t * dc(s)``; ``c`` and ``dc`` are pairs of BiPoly in ``s``."""
    return RationalFamily(c[0] + T * dc[0], c[1] + T * dc[1], w, domain)


def parabola_family(domain=((0.0, 1.0), (0.0, 1.0))):
    # x = s + t, y = s^2 + 2ts
    return tangent_family((S, S * S), (ONE, 2 * S), domain)


def cusp_family_literal(domain=((0.0, 1.0), (0.0, 1.0))):
    # x = s^2 + 2ts, y = s^3 + 3ts^2 (direction c'(s), vanishing at the cusp)
    return tangent_family((S * S, S ** 3), (2 * S, 3 * S * S), domain)


def cusp_family(domain=((0.0, 1.0), (0.0, 1.0))):
    # same tangent lines, direction c'(s)/s: x = s^2 + 2t, y = s^3 + 3ts
    return tangent_family((S * S, S ** 3), (2 * ONE, 3 * S), domain)


QUINTIC_F = S * S + 0.2 * S ** 5


def quintic_family(domain=((0.0, 1.0), (-0.5, 0.5))):
    """Tangent lines of the graph y = s^2 + s^5/5; envelope of implicit degree 5."""
    return tangent_family((S, QUINTIC_F), (ONE, QUINTIC_F.diff("s")), domain)


def rational_sextic_family(domain=((0.0, 1.0), (-0.5, 0.5))):
    """Tangent lines of a rational quintic with weight 1 + s^2/2; bidegree (6, 1)."""
    X = S + 0.3 * S ** 5
    Y = S * S + 0.1 * S ** 5
    W = 1 + 0.5 * S * S
    x = X + T * (X.diff("s") * W - X * W.diff("s"))
    y = Y + T * (Y.diff("s") * W - Y * W.diff("s"))
    return RationalFamily(x, y, W, domain)


def random_family(rng, bidegree=(4, 2), domain=((0.0, 1.0), (0.0, 1.0))):
    m, n = bidegree
    x = rng.standard_normal((m + 1, n + 1))
    y = rng.standard_normal((m + 1, n + 1))
    w = 0.1 * rng.standard_normal((m + 1, n + 1))
    w[0, 0] = 3.0  # keeps w > 0 on the unit square
    return RationalFamily(BiPoly(x), BiPoly(y), BiPoly(w), domain)


def random_poly(rng, bidegree):
    m, n = bidegree
    return BiPoly(rng.standard_normal((m + 1, n + 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(20121)


@pytest.fixture
def parabola():
    return parabola_family()


# -- acceptance report -------------------------------------------------------
# Tests marked ``@pytest.mark.acceptance(n, title)`` get one summary line each.

_acceptance: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    key = (mark.args[0], mark.args[1])
    if rep.when == "call" or rep.failed or rep.skipped:
        prev = _acceptance.get(key, "PASS")
        status = "PASS" if rep.passed and prev == "PASS" else ("SKIP" if rep.skipped else "FAIL")
        _acceptance[key] = status if prev == "PASS" else prev


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title), status in sorted(_acceptance.items()):
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")
