import itertools
from fractions import Fraction

import numpy as np
import pytest

from potcompose.orthopoly import (
    jacobi_deriv,
    jacobi_eval,
    jacobi_log_abs,
    jacobi_series,
    laguerre_deriv,
    laguerre_eval,
    laguerre_log_abs,
)

from oracles import central_diff, jacobi_exact, laguerre_exact


def test_laguerre_examples():
    assert laguerre_eval(0, 0.5, -4.0) == 1.0
    assert laguerre_eval(1, 0.5, -1.0) == 2.5
    assert float(laguerre_exact(2, Fraction(1, 2), -1)) == 4.875
    assert laguerre_eval(2, 0.5, -1.0) == pytest.approx(4.875, rel=1e-15)


def test_jacobi_examples():
    assert jacobi_eval(0, 2.3, -3.1, 5.0) == 1.0
    assert jacobi_eval(1, 1.0, 1.0, 0.0) == 0.0
    expected = jacobi_exact(2, Fraction(1, 2), Fraction(-5, 2), 3)
    assert expected == Fraction(43, 8)
    assert jacobi_eval(2, 0.5, -2.5, 3.0) == pytest.approx(5.375, rel=1e-14)


def test_derivative_examples():
    assert laguerre_deriv(0, 0.5, 2.0) == 0.0
    assert laguerre_deriv(1, 0.0, 7.0) == -1.0
    fd = central_diff(lambda t: laguerre_eval(2, 0.5, t), -1.0)
    assert laguerre_deriv(2, 0.5, -1.0) == pytest.approx(-3.5, rel=1e-15)
    assert abs(fd - (-3.5)) < 1e-8

    assert jacobi_deriv(0, 0.7, -1.2, 0.4) == 0.0
    assert jacobi_deriv(1, 1.0, 1.0, 0.3) == 2.0
    fd = central_diff(lambda t: jacobi_eval(3, 0.5, -2.5, t), 1.7)
    assert abs(jacobi_deriv(3, 0.5, -2.5, 1.7) - fd) < 1e-8


RATIONAL_PARAMS = [Fraction(p, 4) for p in (-13, -6, -3, -1, 0, 1, 2, 5, 11)]
RATIONAL_X = [Fraction(p, 8) for p in (-57, -24, -9, -3, 1, 6, 13, 31, 80)]


@pytest.mark.parametrize("n", range(11))
def test_laguerre_matches_exact_series(n):
    for alpha, x in itertools.product(RATIONAL_PARAMS, RATIONAL_X):
        exact = float(laguerre_exact(n, alpha, x))
        got = laguerre_eval(n, float(alpha), float(x))
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-300), (n, alpha, x)


@pytest.mark.parametrize("n", range(11))
def test_jacobi_matches_exact_series(n):
    for alpha, beta in itertools.product(RATIONAL_PARAMS[::2], RATIONAL_PARAMS[1::2]):
        for x in RATIONAL_X:
            exact = float(jacobi_exact(n, alpha, beta, x))
            got = jacobi_eval(n, float(alpha), float(beta), float(x))
            assert got == pytest.approx(exact, rel=1e-12, abs=1e-300), (n, alpha, beta, x)


def test_degenerate_recurrence_falls_back_to_series():
    # alpha + beta = -2 makes the k=2 denominator vanish
    for x in (-3.0, -0.4, 0.7, 2.5, 9.0):
        exact = float(jacobi_exact(3, -4, 2, x))
        assert jacobi_eval(3, -4.0, 2.0, x) == pytest.approx(exact, rel=1e-13)
        assert jacobi_series(3, -4.0, 2.0, x) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("n", range(9))
def test_derivative_identities_vs_finite_differences(n):
    h = 1e-6
    for x in np.linspace(-10, 10, 17):
        for alpha in (-1.7, 0.5, 2.25):
            fd = central_diff(lambda t: laguerre_eval(n, alpha, t), x, h)
            d = laguerre_deriv(n, alpha, x)
            assert abs(d - fd) <= 1e-7 * max(1.0, abs(d)), (n, alpha, x)
    for x in np.linspace(-2, 2, 9):
        for alpha, beta in ((0.5, -2.5), (-1.3, 0.8), (2.0, 1.5)):
            fd = central_diff(lambda t: jacobi_eval(n, alpha, beta, t), x, h)
            d = jacobi_deriv(n, alpha, beta, x)
            assert abs(d - fd) <= 1e-7 * max(1.0, abs(d)), (n, alpha, beta, x)


def test_second_derivative_order():
    x = 0.37
    d2 = jacobi_deriv(4, 0.3, -1.6, x, order=2)
    fd = central_diff(lambda t: jacobi_deriv(4, 0.3, -1.6, t), x)
    assert d2 == pytest.approx(fd, rel=1e-7)
    d2 = laguerre_deriv(4, 0.3, x, order=2)
    fd = central_diff(lambda t: laguerre_deriv(4, 0.3, t), x)
    assert d2 == pytest.approx(fd, rel=1e-7)


@pytest.mark.parametrize("n", range(8))
def test_jacobi_reflection_symmetry(n):
    for alpha, beta in ((0.5, -2.5), (1.25, 0.75), (-0.3, 3.1)):
        for x in (-2.5, -0.6, 0.1, 0.9, 4.0):
            lhs = jacobi_eval(n, alpha, beta, -x)
            rhs = (-1) ** n * jacobi_eval(n, beta, alpha, x)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


def test_log_abs_matches_direct_and_survives_huge_arguments():
    x = np.array([-7.0, -0.3, 0.8, 3.0, 50.0])
    la, sg = jacobi_log_abs(5, 0.5, 3.5, x)
    np.testing.assert_allclose(sg * np.exp(la), jacobi_eval(5, 0.5, 3.5, x), rtol=1e-13)
    la, sg = laguerre_log_abs(6, 0.5, -x)
    np.testing.assert_allclose(sg * np.exp(la), laguerre_eval(6, 0.5, -x), rtol=1e-13)
    # leading coefficient of P_n is (n+a+b+1)_n / (2^n n!)
    big = 1e200
    la, sg = jacobi_log_abs(3, 0.5, 3.5, big)
    lead = (3 + 5) * (3 + 5 + 1) * (3 + 5 + 2) / (8 * 6)
    assert sg == 1.0
    assert la == pytest.approx(np.log(lead) + 3 * np.log(big), rel=1e-14)


def test_vectorised_and_longdouble_passthrough():
    x = np.linspace(-1, 1, 5)
    out = jacobi_eval(3, 0.2, 0.4, x)
    assert out.shape == (5,) and out.dtype == np.float64
    xl = np.asarray(x, dtype=np.longdouble)
    assert jacobi_eval(3, 0.2, 0.4, xl).dtype == np.longdouble
