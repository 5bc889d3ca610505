import math

import numpy as np
import pytest

from potcompose.errors import NoSignChange, QuadratureFailure
from potcompose.interval import Interval
from potcompose.numerics import (
    QuadSettings,
    adaptive_quad,
    bisect_root,
    fd_second_derivative,
    graded_grid,
    log_quad,
    tabulate_tail_integral,
)
from potcompose.orthopoly import jacobi_eval

from oracles import erfc_cf, jacobi_exact

INF = math.inf


def _within(value, err, exact, settings=QuadSettings()):
    tol = max(settings.abs_tol, settings.rel_tol * abs(exact))
    return abs(value - exact) <= 10 * tol and err <= max(settings.abs_tol, settings.rel_tol * abs(value))


def test_quad_examples():
    v, e = adaptive_quad(lambda t: np.exp(-2 * t), 0.0, INF)
    assert _within(v, e, 0.5)
    v, e = adaptive_quad(lambda t: 1.0 / t**2, 1.0, INF)
    assert _within(v, e, 1.0)


def test_quad_gaussian_tail_oracle():
    x = 2.0
    exact = math.exp(-x * x) / x - math.sqrt(math.pi) * erfc_cf(x)
    assert exact == pytest.approx(math.exp(-x * x) / x - math.sqrt(math.pi) * math.erfc(x), rel=1e-12)
    v, e = adaptive_quad(lambda t: np.exp(-t * t) / t**2, x, INF)
    assert _within(v, e, exact)


CLOSED_FORMS = [
    (lambda t: np.exp(-t), 0.0, INF, 1.0),
    (lambda t: np.exp(-3 * t), -1.0, INF, math.exp(3) / 3),
    (lambda t: np.exp(t), -INF, 0.0, 1.0),
    (lambda t: np.exp(-t * t), -INF, INF, math.sqrt(math.pi)),
    (lambda t: np.exp(-t * t), 0.0, INF, math.sqrt(math.pi) / 2),
    (lambda t: np.exp(-t * t), 1.0, INF, math.sqrt(math.pi) / 2 * math.erfc(1.0)),
    (lambda t: 1.0 / np.sqrt(t), 0.0, 1.0, 2.0),
    (lambda t: 1.0 / np.sqrt(1.0 - t), 0.0, 1.0, 2.0),
    (lambda t: t ** -0.5 * (1 - t) ** -0.5, 0.0, 1.0, math.pi),
    (lambda t: t**3, 0.0, 2.0, 4.0),
    (lambda t: 1.0 / t**3, 1.0, INF, 0.5),
    (lambda t: 1.0 / (1.0 + t * t), -INF, INF, math.pi),
    (lambda t: 1.0 / (1.0 + t * t), 0.0, 1.0, math.pi / 4),
    (lambda t: np.sin(t), 0.0, math.pi, 2.0),
    (lambda t: np.cos(t) ** 2, 0.0, math.pi / 2, math.pi / 4),
    (lambda t: 1.0 / np.cosh(t) ** 2, -INF, INF, 2.0),
    (lambda t: np.log(t), 0.0, 1.0, -1.0),
    (lambda t: t * np.exp(-t), 0.0, INF, 1.0),
    (lambda t: 1.0 / np.sinh(t) ** 2, 1.0, INF, 1.0 / math.tanh(1.0) - 1.0),
    (lambda t: np.exp(-2 * t) / 2, 5.0, INF, math.exp(-10) / 4),
]


@pytest.mark.parametrize("case", range(len(CLOSED_FORMS)))
def test_quad_closed_forms(case):
    f, lo, hi, exact = CLOSED_FORMS[case]
    v, e = adaptive_quad(f, lo, hi)
    assert _within(v, e, exact), (v, exact)


def test_quad_reversed_and_empty():
    v, _ = adaptive_quad(np.cos, math.pi / 2, 0.0)
    assert v == pytest.approx(-1.0, rel=1e-12)
    assert adaptive_quad(np.cos, 1.0, 1.0) == (0.0, 0.0)


def test_quad_failure_on_divergence():
    with pytest.raises(QuadratureFailure):
        adaptive_quad(lambda t: 1.0 / t, 0.0, 1.0, QuadSettings(max_depth=12))


def test_settings_validation():
    with pytest.raises(ValueError):
        QuadSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadSettings(max_depth=5)


def test_log_quad_far_outside_float_range():
    # int_x^inf e^{-2t} dt at x = -400 is e^{800}/2
    val = log_quad(lambda t: -2.0 * t, -400.0, INF)
    assert val == pytest.approx(800.0 - math.log(2.0), rel=1e-13)
    val = log_quad(lambda t: -2.0 * t, -(2.0**20), -14.0)
    assert val == pytest.approx(2.0**21 - math.log(2.0), rel=1e-13)


def test_log_quad_anchored_power_law():
    # int_x^1 t^{-2} dt = 1/x - 1 with x down to 1e-200
    x = 1e-200
    val = log_quad(lambda t: -2.0 * np.log(t), x, 1.0, anchor=0.0)
    assert val == pytest.approx(math.log(1.0 / x - 1.0), rel=1e-12)


def test_graded_grid_properties():
    for dom in (Interval(0, 1), Interval(0, INF), Interval(-INF, INF), Interval(-INF, 3)):
        x = graded_grid(dom, 256)
        assert np.all(np.diff(x) > 0)
        assert dom.contains(x)


def test_table_whole_line_exponential():
    dom = Interval(-INF, INF)
    tab = tabulate_tail_integral(lambda t: t, dom, 64)
    xs, lv = tab.xs, tab.log_values
    exact = -2.0 * xs - math.log(2.0)
    assert np.max(np.abs(np.expm1(lv - exact))) < 1e-9


def test_table_constant_on_unit_interval():
    tab = tabulate_tail_integral(lambda t: np.zeros_like(t), Interval(0, 1), 32)
    vals = np.exp(tab.log_values)
    assert np.allclose(vals, 1.0 - tab.xs, rtol=1e-13, atol=0)


def _ro_log_phi(t):
    # x e^{x^2/2}
    return np.log(t) + 0.5 * t * t


def _ro_tail(x):
    return math.exp(-x * x) / x - math.sqrt(math.pi) * math.erfc(x)


def test_table_radial_oscillator_virtual():
    tab = tabulate_tail_integral(_ro_log_phi, Interval(0, INF), 128)
    assert np.all(np.diff(tab.log_values) < 0)
    for x in (0.3, 1.0, 2.0, 3.0):
        assert tab(x) == pytest.approx(_ro_tail(x), rel=1e-9)
    assert tab(40.0) < 1e-600 or tab.log_value(40.0) < -1000


@pytest.fixture(scope="module")
def ro_table():
    return tabulate_tail_integral(_ro_log_phi, Interval(0, INF), 128)


def test_table_monotone_random_pairs(ro_table):
    rng = np.random.default_rng(1)
    lo, hi = ro_table.xs[0], ro_table.xs[-1]
    u = np.sort(rng.uniform(0, 1, size=(10_000, 2)), axis=1)
    # sample in log-space so both ends of the graded range are exercised
    x = np.exp(np.log(lo) + u * (np.log(hi) - np.log(lo)))
    x = x[x[:, 1] > x[:, 0]]
    a = ro_table.log_value(x[:, 0])
    b = ro_table.log_value(x[:, 1])
    assert np.all(a > b)
    ca = ro_table.interpolant(x[:, 0])
    cb = ro_table.interpolant(x[:, 1])
    assert np.all(ca > cb)


def test_table_vs_direct(ro_table):
    rng = np.random.default_rng(2)
    settings = QuadSettings()
    for x in rng.uniform(0.05, 4.0, size=100):
        direct, _ = adaptive_quad(lambda t: np.exp(-2 * _ro_log_phi(t)), x, INF, settings)
        assert abs(ro_table(x) - direct) <= 10 * settings.rel_tol * direct


def test_table_outside_knots_uses_direct_quadrature(ro_table):
    x = 0.5 * ro_table.xs[0]
    assert ro_table.log_value(x) == pytest.approx(math.log(1.0 / x), rel=1e-9)
    assert ro_table.log_value(0.0) == INF


def test_table_rejects_few_knots():
    with pytest.raises(ValueError):
        tabulate_tail_integral(lambda t: t, Interval(-INF, INF), 16)


def test_fd_second_derivative_examples():
    assert fd_second_derivative(lambda x: x * x, 0.7, 1e-3) == pytest.approx(2.0, abs=1e-8)
    assert fd_second_derivative(np.sin, 0.0, 1e-3) == pytest.approx(0.0, abs=1e-8)
    f = lambda x: np.exp(x * x / 2) * x
    assert 4 * math.exp(0.5) == pytest.approx(6.5948850, abs=1e-7)
    assert fd_second_derivative(f, 1.0, 1e-4) == pytest.approx(4 * math.exp(0.5), rel=1e-7)


def test_fd_second_derivative_levels():
    f = lambda x: np.exp(x * x / 2) * x
    exact = 4 * math.exp(0.5)
    err1 = abs(fd_second_derivative(f, 1.0, 1e-2, levels=1) - exact)
    err2 = abs(fd_second_derivative(f, 1.0, 1e-2, levels=2) - exact)
    assert err2 < err1 < 1e-5


def test_bisect_examples():
    assert bisect_root(lambda x: x - 1, 0.0, 2.0, 1e-12) == pytest.approx(1.0, abs=1e-12)
    assert bisect_root(math.cos, 0.0, math.pi, 1e-12) == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(NoSignChange):
        bisect_root(lambda x: x * x + 1, -1.0, 1.0)


def test_jacobi_quadratic_example_has_no_real_root():
    # P_2^{(1/2,-5/2)} = (1/4)((y+3/2)^2 + 5/4): nothing to bracket
    from fractions import Fraction
    for y in (Fraction(-3, 2), Fraction(0), Fraction(7, 3)):
        assert jacobi_exact(2, Fraction(1, 2), Fraction(-5, 2), y) == Fraction(1, 4) * ((y + Fraction(3, 2)) ** 2 + Fraction(5, 4))


def test_bisect_jacobi_root_against_series_scan():
    from fractions import Fraction
    a, b = Fraction(1, 2), Fraction(-5, 2)
    # exact cubic coefficients from four exact series values
    nodes = [Fraction(k) for k in (-1, 0, 1, 2)]
    vander = np.array([[float(y) ** p for p in range(3, -1, -1)] for y in nodes])
    coef = np.linalg.solve(vander, [float(jacobi_exact(3, a, b, y)) for y in nodes])
    ys = np.linspace(-10.0, 10.0, 1_000_001)
    series = np.polyval(coef, ys)
    flips = np.flatnonzero(np.sign(series[:-1]) != np.sign(series[1:]))
    assert flips.size >= 1
    for k in flips:
        lo, hi = Fraction(ys[k]), Fraction(ys[k + 1])
        assert jacobi_exact(3, a, b, lo) * jacobi_exact(3, a, b, hi) < 0
        root = bisect_root(lambda y: jacobi_eval(3, 0.5, -2.5, y), ys[k], ys[k + 1], 1e-12)
        assert ys[k] <= root <= ys[k + 1]
        assert abs(jacobi_eval(3, 0.5, -2.5, root)) < 1e-10
