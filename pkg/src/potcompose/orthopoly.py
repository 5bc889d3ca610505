"""Laguerre and Jacobi polynomials at arbitrary real arguments.

The seeds built in :mod:`potcompose.catalog` evaluate these polynomials far
outside the classical orthogonality setting (negative arguments for Laguerre,
``|x| > 1`` and parameters below ``-1`` for Jacobi), so nothing here assumes
``alpha, beta > -1``.

Values come from the forward three-term recurrence accumulated in
``numpy.longdouble``.  Each step is rescaled by ``max(1, |x|)**k`` so that the
``*_log_abs`` variants stay finite for huge arguments.  When a Jacobi
recurrence denominator vanishes (``alpha + beta`` a negative integer) the
explicit finite hypergeometric sum is used instead.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateRecurrence

__all__ = [
    "laguerre_eval",
    "laguerre_deriv",
    "laguerre_log_abs",
    "jacobi_eval",
    "jacobi_deriv",
    "jacobi_log_abs",
    "jacobi_series",
    "DEGENERATE_EPS",
]

DEGENERATE_EPS = 1e-12

_LD = np.longdouble


def _prepare(x):
    arr = np.asarray(x)
    out_dtype = _LD if arr.dtype == _LD else np.float64
    return arr.astype(_LD), arr.ndim == 0, out_dtype


def _finish(values, scalar, dtype):
    values = values.astype(dtype)
    return values[()] if scalar else values


def _check_degree(n):
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    return int(n)


# ---------------------------------------------------------------------------
# Laguerre
# ---------------------------------------------------------------------------

def _laguerre_scaled(n, alpha, x):
    """Return ``(L_n(x) / s**n, s)`` with ``s = max(1, |x|)``."""
    alpha = _LD(alpha)
    s = np.maximum(_LD(1), np.abs(x))
    q_prev = np.ones_like(x)
    if n == 0:
        return q_prev, s
    q = (1 + alpha - x) / s
    for k in range(1, n):
        q_next = (((2 * k + 1 + alpha) - x) / s * q - (k + alpha) * q_prev / (s * s)) / (k + 1)
        q_prev, q = q, q_next
    return q, s


def laguerre_eval(n, alpha, x):
    """Generalized Laguerre polynomial ``L_n^{(alpha)}(x)``.

    Uses ``(k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}`` with
    ``L_0 = 1`` and ``L_1 = 1 + alpha - x``.
    """
    n = _check_degree(n)
    xl, scalar, dtype = _prepare(x)
    q, s = _laguerre_scaled(n, alpha, xl)
    return _finish(q * s**n, scalar, dtype)


def laguerre_log_abs(n, alpha, x):
    """Return ``(log|L_n^{(alpha)}(x)|, sign)`` without overflow."""
    n = _check_degree(n)
    xl, scalar, dtype = _prepare(x)
    q, s = _laguerre_scaled(n, alpha, xl)
    with np.errstate(divide="ignore"):
        log_abs = n * np.log(s) + np.log(np.abs(q))
    return _finish(log_abs, scalar, dtype), _finish(np.sign(q), scalar, dtype)


def laguerre_deriv(n, alpha, x, order=1):
    """``d^k/dx^k L_n^{(alpha)}(x) = (-1)^k L_{n-k}^{(alpha+k)}(x)``."""
    n = _check_degree(n)
    if order > n:
        xl, scalar, dtype = _prepare(x)
        return _finish(np.zeros_like(xl), scalar, dtype)
    sign = -1.0 if order % 2 else 1.0
    return sign * laguerre_eval(n - order, alpha + order, x)


# ---------------------------------------------------------------------------
# Jacobi
# ---------------------------------------------------------------------------

def _gbinom(z, j):
    """Generalized binomial coefficient ``C(z, j)`` for integer ``j >= 0``."""
    out = _LD(1)
    for i in range(j):
        out *= (_LD(z) - i) / (i + 1)
    return out


def _jacobi_series_scaled(n, alpha, beta, x):
    s = np.maximum(_LD(1), np.abs(x))
    lo = (x - 1) / (2 * s)
    hi = (x + 1) / (2 * s)
    total = np.zeros_like(x)
    for k in range(n + 1):
        coeff = _gbinom(n + alpha, n - k) * _gbinom(n + beta, k)
        total = total + coeff * lo**k * hi ** (n - k)
    return total, s


def _jacobi_recurrence_scaled(n, alpha, beta, x):
    a = _LD(alpha)
    b = _LD(beta)
    ab = a + b
    s = np.maximum(_LD(1), np.abs(x))
    q_prev = np.ones_like(x)
    if n == 0:
        return q_prev, s
    q = ((a - b) / 2 + (ab + 2) * x / 2) / s
    for k in range(2, n + 1):
        denom = 2 * k * (k + ab) * (2 * k + ab - 2)
        if abs(denom) < DEGENERATE_EPS:
            raise DegenerateRecurrence(
                f"Jacobi recurrence denominator vanishes at k={k} "
                f"(alpha={alpha}, beta={beta})"
            )
        c1 = (2 * k + ab - 1) * (2 * k + ab) * (2 * k + ab - 2)
        c2 = (2 * k + ab - 1) * (a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * (2 * k + ab)
        q_next = ((c1 * x + c2) / s * q - c3 * q_prev / (s * s)) / denom
        q_prev, q = q, q_next
    return q, s


def _jacobi_scaled(n, alpha, beta, x):
    try:
        return _jacobi_recurrence_scaled(n, alpha, beta, x)
    except DegenerateRecurrence:
        return _jacobi_series_scaled(n, alpha, beta, x)


def jacobi_eval(n, alpha, beta, x):
    """Jacobi polynomial ``P_n^{(alpha, beta)}(x)`` for any real parameters."""
    n = _check_degree(n)
    xl, scalar, dtype = _prepare(x)
    q, s = _jacobi_scaled(n, alpha, beta, xl)
    return _finish(q * s**n, scalar, dtype)


def jacobi_series(n, alpha, beta, x):
    """Jacobi polynomial from the explicit finite sum (no recurrence)."""
    n = _check_degree(n)
    xl, scalar, dtype = _prepare(x)
    q, s = _jacobi_series_scaled(n, alpha, beta, xl)
    return _finish(q * s**n, scalar, dtype)


def jacobi_log_abs(n, alpha, beta, x):
    """Return ``(log|P_n^{(alpha,beta)}(x)|, sign)`` without overflow."""
    n = _check_degree(n)
    xl, scalar, dtype = _prepare(x)
    q, s = _jacobi_scaled(n, alpha, beta, xl)
    with np.errstate(divide="ignore"):
        log_abs = n * np.log(s) + np.log(np.abs(q))
    return _finish(log_abs, scalar, dtype), _finish(np.sign(q), scalar, dtype)


def jacobi_deriv(n, alpha, beta, x, order=1):
    """k-th derivative of ``P_n^{(alpha,beta)}``.

    ``d/dx P_n^{(a,b)} = (n+a+b+1)/2 * P_{n-1}^{(a+1,b+1)}``, applied ``order``
    times.
    """
    n = _check_degree(n)
    if order > n:
        xl, scalar, dtype = _prepare(x)
        return _finish(np.zeros_like(xl), scalar, dtype)
    factor = math.prod((n + alpha + beta + i) / 2 for i in range(1, order + 1))
    return factor * jacobi_eval(n - order, alpha + order, beta + order, x)
