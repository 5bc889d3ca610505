"""Quadrature, tail-integral tables, finite differences and root bracketing.

Everything that integrates ``1/phi**2`` works with ``log|phi|`` and returns
logarithms, so tail integrals that span hundreds of decades (Gaussian-type
growth, power-law singularities at ``x -> 0``) never overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import NoSignChange, QuadratureFailure
from .interval import Interval

__all__ = [
    "QuadSettings",
    "adaptive_quad",
    "log_quad",
    "log_tail",
    "gap_zone",
    "MonotoneTable",
    "tabulate_tail_integral",
    "fd_first_derivative",
    "fd_second_derivative",
    "bisect_root",
    "graded_grid",
]

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_depth: int = 60

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


DEFAULT_SETTINGS = QuadSettings()

# Gauss-Kronrod 7/15 (QUADPACK qk15).  Kronrod nodes in descending order;
# odd indices are the Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[9, 11, 13]] = _WG[2::-1]
_GW[7] = _WG[3]

_EPS = np.finfo(float).eps
_MAX_INTERVALS = 20000


def _gk15(f, a, b):
    """Apply the 15-point Kronrod rule to every interval ``[a_i, b_i]``."""
    half = 0.5 * (b - a)
    center = 0.5 * (b + a)
    t = center[:, None] + half[:, None] * _NODES[None, :]
    fv = np.asarray(f(t.ravel()), dtype=float).reshape(t.shape)
    if not np.all(np.isfinite(fv)):
        raise QuadratureFailure("integrand produced non-finite values")
    k = fv @ _KW * half
    g = fv @ _GW * half
    mean = k / (2 * half)
    resabs = np.abs(fv) @ _KW * np.abs(half)
    resasc = np.abs(fv - mean[:, None]) @ _KW * np.abs(half)
    err = np.abs(k - g)
    with np.errstate(invalid="ignore", divide="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    err = np.maximum(err, 50 * _EPS * resabs)
    return k, err


def _gk_adaptive(f, a, b, settings):
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    val, err = _gk15(f, lo, hi)
    depth = np.zeros(1, dtype=int)
    while True:
        total = val.sum()
        errsum = err.sum()
        tol = max(settings.abs_tol, settings.rel_tol * abs(total))
        if errsum <= tol:
            return float(total), float(errsum)
        order = np.argsort(err)[::-1]
        remaining = errsum - np.cumsum(err[order])
        n_split = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        split = order[:n_split]
        if np.any(depth[split] >= settings.max_depth) or len(val) + n_split > _MAX_INTERVALS:
            raise QuadratureFailure(
                f"adaptive quadrature on [{a:g}, {b:g}] exhausted max_depth="
                f"{settings.max_depth} (error {errsum:.3g} > tolerance {tol:.3g})"
            )
        keep = np.ones(len(val), dtype=bool)
        keep[split] = False
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_val, new_err = _gk15(f, new_lo, new_hi)
        new_depth = np.concatenate([depth[split], depth[split]]) + 1
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        depth = np.concatenate([depth[keep], new_depth])


def _base_map(lo, hi):
    """``(t(s), log|dt/ds|(s), s_lo, s_hi)`` removing infinite endpoints."""
    if math.isfinite(lo) and math.isfinite(hi):
        return (lambda s: s), (lambda s: np.zeros_like(s)), lo, hi
    if math.isfinite(lo):
        return (lambda s: lo + s / (1.0 - s)), (lambda s: -2.0 * np.log1p(-s)), 0.0, 1.0
    if math.isfinite(hi):
        return (lambda s: hi - s / (1.0 - s)), (lambda s: -2.0 * np.log1p(-s)), 0.0, 1.0
    return (
        lambda s: s / (1.0 - s * s),
        lambda s: np.log1p(s * s) - 2.0 * np.log1p(-s * s),
        -1.0,
        1.0,
    )


def _unit_map(lo, hi):
    """Map ``u in (0, 1)`` onto ``(lo, hi)``; returns ``(t(u), log|dt/du|(u))``.

    After removing infinite endpoints, ``s = s_lo + (s_hi - s_lo) u^2 (3 - 2u)``
    is applied: its derivative vanishes at both ends, which turns
    integrable algebraic endpoint singularities such as ``t^{-1/2}`` into
    bounded integrands.
    """
    tmap, logjac, s_lo, s_hi = _base_map(lo, hi)
    span = s_hi - s_lo
    log_span = math.log(span)

    def t_of(u):
        return tmap(s_lo + span * u * u * (3.0 - 2.0 * u))

    def logjac_of(u):
        s = s_lo + span * u * u * (3.0 - 2.0 * u)
        with np.errstate(divide="ignore"):
            return log_span + np.log(6.0 * u * (1.0 - u)) + logjac(s)

    return t_of, logjac_of


def adaptive_quad(f: Evaluator, lo: float, hi: float, settings: QuadSettings | None = None):
    """Integrate ``f`` over ``(lo, hi)`` with adaptive Gauss-Kronrod 7/15.

    Infinite endpoints are removed by ``t = s/(1-s^2)`` (whole line) or
    ``t = lo + s/(1-s)`` (half line); a cubic endpoint-smoothing
    substitution follows.  ``f`` must accept numpy arrays.

    Returns
    -------
    (value, error_estimate)

    Raises
    ------
    QuadratureFailure
        If an interval reaches ``settings.max_depth`` bisections before the
        global error estimate drops below ``max(abs_tol, rel_tol*|value|)``.
    """
    settings = settings or DEFAULT_SETTINGS
    lo, hi = float(lo), float(hi)
    if lo == hi:
        return 0.0, 0.0
    if lo > hi:
        value, err = adaptive_quad(f, hi, lo, settings)
        return -value, err
    t_of, logjac_of = _unit_map(lo, hi)

    def g(u):
        return np.asarray(f(t_of(u)), dtype=float) * np.exp(logjac_of(u))

    return _gk_adaptive(g, 0.0, 1.0, settings)


_LOG_SETTINGS_FLOOR = 1e-300


_ANCHOR_RESOLVE = 2.0**26
# below this, gaps approach the subnormal range
_TINY_GAP = 1e-280


def _power_law_piece(logf, anchor, side, g0, u1, u2, settings):
    """``log int exp(logf)`` over gaps ``e^u1..e^u2`` from an endpoint model.

    ``log f = a + p log(gap) + b gap`` is fitted at gaps ``g0, 2 g0, 4 g0``
    (a regular-singular power law with a linear correction, exact for
    exponentials) and integrated with exact gaps.
    """
    gaps = g0 * np.array([1.0, 2.0, 4.0])
    vals = np.asarray(logf(anchor + side * gaps), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise QuadratureFailure("log-integrand not finite next to the anchor")
    a, p, b = np.linalg.solve(np.column_stack([np.ones(3), np.log(gaps), gaps]), vals)
    if u1 == -math.inf and p + 1.0 <= 0:
        raise QuadratureFailure(f"endpoint power law gap^{p:.4g} is not integrable")
    return log_quad(lambda u: a + (p + 1.0) * u + b * np.exp(u), u1, u2, settings)


def log_quad(
    logf: Evaluator,
    lo: float,
    hi: float,
    settings: QuadSettings | None = None,
    anchor: float | None = None,
) -> float:
    """Return ``log(int_lo^hi exp(logf(t)) dt)`` for ``lo < hi``.

    The integrand is rescaled by its sampled maximum before integrating, so
    the result is valid far outside the floating-point range.  When
    ``anchor`` is given (a finite endpoint at or beyond one end of the
    range), the substitution ``t = anchor +- exp(u)`` is used; this resolves
    power-law behaviour at the anchor over arbitrarily many decades.
    """
    settings = settings or DEFAULT_SETTINGS
    settings = QuadSettings(settings.rel_tol, _LOG_SETTINGS_FLOOR, settings.max_depth)
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        if lo == hi:
            return -math.inf
        raise ValueError("log_quad needs lo < hi")

    if anchor is not None:
        anchor = float(anchor)
        if anchor <= lo:
            u_lo = math.log(lo - anchor) if lo > anchor else -math.inf
            u_hi = math.log(hi - anchor) if math.isfinite(hi) else math.inf
            side = 1.0
        elif anchor >= hi:
            u_lo = math.log(anchor - hi) if hi < anchor else -math.inf
            u_hi = math.log(anchor - lo) if math.isfinite(lo) else math.inf
            side = -1.0
        else:
            raise ValueError("anchor must lie outside the integration range")

        def logg(u):
            return logf(anchor + side * np.exp(u)) + u

        # below ``resolved`` the abscissae anchor +- gap carry relative
        # rounding ulp(anchor)/gap; integrate that stretch from the local
        # power law fitted where gaps are still exact to ~1e-8
        resolved = max(_ANCHOR_RESOLVE * math.ulp(anchor), _TINY_GAP)
        if u_lo >= math.log(resolved):
            return log_quad(logg, u_lo, u_hi, settings)
        split = math.log(resolved)
        model = _power_law_piece(logf, anchor, side, resolved, u_lo, min(split, u_hi), settings)
        if u_hi <= split:
            return model
        return float(np.logaddexp(model, log_quad(logg, split, u_hi, settings)))

    t_of, logjac_of = _unit_map(lo, hi)

    def logF(u):
        return np.asarray(logf(t_of(u)), dtype=float) + logjac_of(u)

    probe_u = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, 65)[1:-1]))
    probe = logF(probe_u)
    if math.isfinite(lo) and math.isfinite(hi):
        # mass piled against one end (e.g. exp(-2t) over a very long range)
        # is invisible to interior nodes; grade exponentially towards it
        with np.errstate(all="ignore"):
            ends = np.asarray(logf(np.array([lo, hi])), dtype=float)
            near = np.asarray(logf(t_of(probe_u[[0, -1]])), dtype=float)
        if np.isfinite(ends[0]) and ends[0] > near[0] + 1.0 and ends[0] >= ends[1]:
            return log_quad(logf, lo, hi, settings, anchor=lo)
        if np.isfinite(ends[1]) and ends[1] > near[1] + 1.0:
            return log_quad(logf, lo, hi, settings, anchor=hi)
    finite = probe[np.isfinite(probe)]
    if finite.size == 0:
        if np.all(probe == -np.inf):
            return -math.inf
        raise QuadratureFailure("log-integrand is not finite on probe points")
    shift = float(finite.max())
    # log f carries absolute rounding noise ~ eps*|log f|, i.e. that much
    # relative noise in f; no quadrature can do better than this floor
    floor = 64.0 * _EPS * max(abs(shift), float(np.max(np.abs(finite))))
    if floor > settings.rel_tol:
        settings = QuadSettings(floor, settings.abs_tol, settings.max_depth)

    def F(u):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(logF(u) - shift)

    value, _ = _gk_adaptive(F, 0.0, 1.0, settings)
    if not math.isfinite(value):
        raise QuadratureFailure("rescaled integral overflowed")
    if value <= 0:
        # the probe maximum contributes exp(0) = 1; losing it means divergence
        raise QuadratureFailure("log-integrand mass not resolved (divergent integral?)")
    return shift + math.log(value)


def gap_zone(domain: Interval) -> float:
    """Start of the stretch next to a finite ``hi`` handled in the gap variable."""
    return domain.hi - min(0.25 * domain.length, 1.0)


def log_tail(
    logf: Evaluator,
    x: float,
    domain: Interval,
    settings: QuadSettings | None = None,
    logf_gap: Evaluator | None = None,
) -> float:
    """``log int_x^hi exp(logf)``.

    ``logf_gap``, when given for a finite ``hi``, is the same integrand as a
    function of the distance ``hi - t``.  It is used on the stretch
    ``t > gap_zone(domain)``, where ``hi - gap`` cannot represent small gaps
    accurately but the gap itself can.
    """
    x = float(x)
    if logf_gap is not None and domain.hi_finite:
        zone = gap_zone(domain)
        if x >= zone:
            return log_quad(logf_gap, 0.0, domain.hi - x, settings, anchor=0.0)
        near = log_quad(logf_gap, 0.0, domain.hi - zone, settings, anchor=0.0)
        return float(np.logaddexp(log_quad(logf, x, zone, settings), near))
    return log_quad(logf, x, domain.hi, settings, anchor=domain.hi if domain.hi_finite else None)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

_GRID_FLOOR = 1e-12


def graded_grid(interval: Interval, n: int) -> np.ndarray:
    """``n`` strictly increasing interior points, clustered at both ends.

    In the compactified coordinate each end receives a geometric run of
    points (ratio about 0.5 when ``n`` allows 40 per end) reaching a
    distance of ``1e-12`` times the coordinate range; the rest are uniform
    in the middle half.
    """
    if n < 8:
        raise ValueError("graded_grid needs n >= 8")
    u_lo, u_hi = interval.comp_bounds
    span = u_hi - u_lo
    n_geo = min(40, n // 4)
    ratio = (4 * _GRID_FLOOR) ** (1.0 / (n_geo - 1))
    dist = 0.25 * span * ratio ** np.arange(n_geo)
    n_mid = n - 2 * n_geo
    mid = np.linspace(u_lo + 0.25 * span, u_hi - 0.25 * span, n_mid + 2)[1:-1]
    u = np.concatenate([u_lo + dist[::-1], mid, u_hi - dist])
    x = interval.from_comp(u)
    if np.any(np.diff(x) <= 0):
        x = np.unique(x)
    return x


# ---------------------------------------------------------------------------
# tail-integral tables
# ---------------------------------------------------------------------------

_GL_N = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_N)
_PANEL_AGREEMENT = 1e-12
_MAX_REFINE = 30


def _gl_log_panels(logf, a, b):
    """log of the fixed 20-point Gauss-Legendre rule on each ``[a_i, b_i]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    t = 0.5 * (a + b)[..., None] + half[..., None] * _GL_X
    g = np.asarray(logf(t.ravel()), dtype=float).reshape(t.shape)
    m = np.max(g, axis=-1)
    safe_m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
        s = np.exp(g - safe_m[..., None]) @ _GL_W
        out = safe_m + np.log(s * half)
    return np.where(half > 0, out, -np.inf)


def _log_pieces(logf, logf_gap, domain, a, b):
    """Fixed-rule ``log int_a^b`` per panel, in the gap variable near ``hi``."""
    if logf_gap is None or not domain.hi_finite:
        return _gl_log_panels(logf, a, b)
    hi = domain.hi
    near = a >= gap_zone(domain)
    out = np.empty_like(a)
    if np.any(near):
        out[near] = _gl_log_panels(logf_gap, hi - b[near], hi - a[near])
    if np.any(~near):
        out[~near] = _gl_log_panels(logf, a[~near], b[~near])
    return out


@dataclass(frozen=True, eq=False)
class MonotoneTable:
    """Tabulated tail integral ``I(x) = int_x^hi exp(log_integrand)``.

    ``log_values`` holds ``log I`` at the knots.  Calling the table returns
    ``I(x)`` evaluated as the anchored value at the next knot plus the
    remaining piece ``[x, x_{k+1}]`` from the same fixed Gauss-Legendre rule
    that produced the knot data, so evaluation is continuous and smooth
    between knots.  ``interpolant`` is the monotone piecewise-cubic (PCHIP)
    interpolant of ``log I`` through the knots, a cheap approximation that
    preserves the strict decrease.  Points outside the knot range fall back
    to direct adaptive quadrature.  With ``log_integrand_gap`` set, pieces
    beyond ``gap_zone(range)`` are integrated in the gap ``hi - t``.
    """

    xs: np.ndarray
    log_values: np.ndarray
    range: Interval
    log_integrand: Evaluator = field(repr=False)
    settings: QuadSettings = DEFAULT_SETTINGS
    log_integrand_gap: Evaluator | None = field(default=None, repr=False)
    interpolant: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "interpolant", PchipInterpolator(self.xs, self.log_values))

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), np.exp(self.log_values).tolist()))

    def coarse(self, x):
        """PCHIP approximation of ``I(x)`` (valid only within the knot range)."""
        return np.exp(self.interpolant(x))

    def log_value(self, x):
        """Precise ``log I(x)``; vectorised."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        xs, lv = self.xs, self.log_values
        inside = (x >= xs[0]) & (x <= xs[-1])
        if np.any(inside):
            xi = x[inside]
            k = np.clip(np.searchsorted(xs, xi, side="right") - 1, 0, len(xs) - 2)
            piece = _log_pieces(self.log_integrand, self.log_integrand_gap, self.range, xi, xs[k + 1])
            out[inside] = np.logaddexp(lv[k + 1], piece)
        dom = self.range
        for i in np.flatnonzero(~inside):
            xi = float(x[i])
            if not dom.lo < xi < dom.hi:
                out[i] = math.inf if xi <= dom.lo else -math.inf
            elif xi < xs[0]:
                piece = log_quad(
                    self.log_integrand, xi, xs[0], self.settings,
                    anchor=dom.lo if dom.lo_finite else None,
                )
                out[i] = np.logaddexp(lv[0], piece)
            else:
                out[i] = log_tail(self.log_integrand, xi, dom, self.settings, self.log_integrand_gap)
        return out[0] if scalar else out

    def __call__(self, x):
        return np.exp(self.log_value(x))


def tabulate_tail_integral(
    log_abs_phi: Evaluator,
    domain: Interval,
    n_knots: int = 128,
    settings: QuadSettings | None = None,
    log_abs_phi_gap: Evaluator | None = None,
) -> MonotoneTable:
    """Tabulate ``I(x) = int_x^b dt / phi(t)^2`` on a graded knot grid.

    The value at the knot nearest ``b`` comes from a single adaptive
    integral out to ``b``; moving towards ``a``, each panel is added in log
    space.  Panel values use a fixed 20-point Gauss-Legendre rule that must
    agree with an independent adaptive Gauss-Kronrod integral of the same
    panel to ``1e-12`` of the accumulated tail; panels failing that are
    bisected (at most 30 times each).  ``log_abs_phi_gap`` gives
    ``log|phi|`` as a function of ``hi - x`` for a finite ``hi``; see
    :func:`log_tail`.
    """
    if n_knots < 32:
        raise ValueError("n_knots must be at least 32")
    settings = settings or DEFAULT_SETTINGS
    panel_settings = QuadSettings(min(settings.rel_tol, 1e-13), settings.abs_tol, settings.max_depth)

    def log_integrand(t):
        return -2.0 * np.asarray(log_abs_phi(t), dtype=float)

    log_integrand_gap = None
    if log_abs_phi_gap is not None and domain.hi_finite:
        def log_integrand_gap(g):
            return -2.0 * np.asarray(log_abs_phi_gap(g), dtype=float)

    xs = graded_grid(domain, n_knots)
    tail = log_tail(log_integrand, xs[-1], domain, settings, log_integrand_gap)
    hi = domain.hi
    zone = gap_zone(domain) if log_integrand_gap is not None else math.inf

    # walk from hi towards lo; refine panels whose fixed rule is inaccurate
    knots = [float(xs[-1])]
    logs = [tail]
    right = float(xs[-1])
    pending = list(xs[-2::-1])
    depth = {}
    while pending:
        left = float(pending[0])
        gl = float(_log_pieces(log_integrand, log_integrand_gap, domain, np.array([left]), np.array([right]))[0])
        if left >= zone:
            ref = log_quad(log_integrand_gap, hi - right, hi - left, panel_settings)
        else:
            ref = log_quad(log_integrand, left, right, panel_settings)
        scale = np.logaddexp(ref, logs[-1])
        mismatch = abs(math.exp(gl - scale) - math.exp(ref - scale)) if np.isfinite(scale) else 0.0
        if mismatch > _PANEL_AGREEMENT:
            d = depth.get(left, 0)
            if d >= _MAX_REFINE:
                raise QuadratureFailure(
                    f"tail table panel [{left:g}, {right:g}] did not resolve after bisection"
                )
            mid = 0.5 * (left + right)
            depth[mid] = d + 1
            depth[left] = d + 1
            pending.insert(0, mid)
            continue
        pending.pop(0)
        knots.append(left)
        logs.append(float(np.logaddexp(logs[-1], gl)))
        right = left

    return MonotoneTable(
        xs=np.array(knots[::-1]),
        log_values=np.array(logs[::-1]),
        range=domain,
        log_integrand=log_integrand,
        settings=settings,
        log_integrand_gap=log_integrand_gap,
    )


# ---------------------------------------------------------------------------
# finite differences and roots
# ---------------------------------------------------------------------------

def fd_second_derivative(f: Evaluator, x, h, levels: int = 1):
    """Central second difference with ``levels`` Richardson steps (halving ``h``)."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)

    def d2(step):
        return (f(x - step) - 2.0 * f(x) + f(x + step)) / step**2

    row = [d2(h / 2**j) for j in range(levels + 1)]
    for k in range(1, levels + 1):
        fac = 4.0**k
        row = [(fac * row[j + 1] - row[j]) / (fac - 1.0) for j in range(len(row) - 1)]
    return row[0]


def fd_first_derivative(f: Evaluator, x, h):
    """Central first difference with one Richardson step over ``h, h/2``."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)

    def d1(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)

    return (4.0 * d1(h / 2) - d1(h)) / 3.0


def bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Locate a sign change of ``f`` in ``[lo, hi]`` to width ``tol``."""
    flo, fhi = float(f(lo)), float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not flo * fhi < 0:
        raise NoSignChange(f"f({lo:g})={flo:g} and f({hi:g})={fhi:g} have the same sign")
    a, b = float(lo), float(hi)
    while abs(b - a) > tol:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = float(f(m))
        if fm == 0.0:
            return m
        if (fm < 0) == (flo < 0):
            a, flo = m, fm
        else:
            b = m
    return 0.5 * (a + b)
