"""Solvable potentials, their eigenfunctions and nodeless seed solutions.

Every function here is assembled from factors whose logarithmic derivatives
are known in closed form (powers of ``x``, ``sin``, ``cos``, ``sinh``,
``cosh``; exponentials; one Laguerre or Jacobi polynomial of an argument).
That gives, for each seed, an overflow-free ``log|phi|`` plus exact first
and second log-derivatives, from which the Rayleigh quotient
``(-phi'' + V phi) / phi`` is evaluated without finite-difference noise.

Energies of nodeless seeds are *measured* with that quotient, then compared
with the closed-form value; a disagreement beyond ``1e-6`` relative is a
construction error.  A separately tabulated energy formula is kept for each
seed and any mismatch against the measured value is reported in
``NodelessSolution.diagnostics`` instead of raised.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import orthopoly
from .errors import (
    BoundaryCheckFailed,
    ConstructionCheckFailed,
    EmptyRange,
    IndexOutOfRange,
    MixedOwners,
    NodeDetected,
    ParamOutOfRange,
    QuadratureFailure,
)
from .interval import Interval
from .numerics import QuadSettings, bisect_root, gap_zone, graded_grid, log_quad, log_tail

__all__ = [
    "Family",
    "Interval",
    "PotentialSpec",
    "NodelessSolution",
    "IndexBracket",
    "BoundaryReport",
    "bracket_prime",
    "make_potential",
    "eigenfunction",
    "virtual_state",
    "overshoot_state",
    "seed_bracket",
    "SEED_KINDS",
    "SeedKind",
    "custom_nodeless",
    "nodeless_scan",
    "check_boundary_conditions",
    "rayleigh_quotient",
    "wronskian",
    "wronskian_function",
]

Evaluator = Callable[[np.ndarray], np.ndarray]

RAYLEIGH_REL_TOL = 1e-7
ENERGY_MATCH_REL_TOL = 1e-6
SCAN_POINTS = 1024


class Family(enum.Enum):
    RADIAL_OSCILLATOR = "radial_oscillator"
    POSCHL_TELLER = "poschl_teller"
    HYPERBOLIC_PT = "hyperbolic_pt"
    ROSEN_MORSE = "rosen_morse"
    ECKART = "eckart"
    FREE_PARTICLE = "free_particle"
    INFINITE_WELL = "infinite_well"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_").replace(" ", "_")
        key = _FAMILY_ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            known = ", ".join(f.value for f in cls if f is not cls.CUSTOM)
            raise ParamOutOfRange(f"unknown potential family {name!r}; known: {known}") from None


_FAMILY_ALIASES = {
    "ro": "radial_oscillator",
    "radial": "radial_oscillator",
    "pt": "poschl_teller",
    "poeschl_teller": "poschl_teller",
    "hpt": "hyperbolic_pt",
    "hyperbolic_poschl_teller": "hyperbolic_pt",
    "rm": "rosen_morse",
    "free": "free_particle",
    "well": "infinite_well",
}


def bracket_prime(a: float) -> int:
    """Greatest integer strictly less than ``a``: ``[3]' = 2``, ``[2.1]' = 2``."""
    return math.ceil(a) - 1


@dataclass(frozen=True)
class IndexBracket:
    """Admissible integer degrees ``v`` with ``lower < v < upper`` (strict)."""

    lower: float
    upper: float

    @property
    def first(self) -> int:
        return math.floor(self.lower) + 1

    @property
    def last(self) -> int | None:
        return None if math.isinf(self.upper) else bracket_prime(self.upper)

    @property
    def empty(self) -> bool:
        return self.last is not None and self.last < self.first

    def contains(self, v: int) -> bool:
        return self.first <= v and (self.last is None or v <= self.last)

    def degrees(self, limit: int | None = None) -> range:
        """Admissible degrees, truncated at ``limit`` when the bracket is unbounded."""
        last = self.last
        if limit is not None:
            last = limit if last is None else min(last, limit)
        if last is None:
            raise ValueError("unbounded bracket needs a limit")
        return range(self.first, last + 1)

    def describe(self) -> str:
        if self.empty:
            return f"window ({self.lower:g}, {self.upper:g}): empty"
        if self.last is None:
            return "{" + f"{self.first},{self.first + 1},..." + "}"
        return "{" + ",".join(str(v) for v in range(self.first, self.last + 1)) + "}"


# ---------------------------------------------------------------------------
# log-derivative algebra
# ---------------------------------------------------------------------------

@dataclass
class _LogParts:
    """``log|f|``, ``(log f)'``, ``(log f)''`` and ``sign(f)`` on a grid."""

    L: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    sign: np.ndarray


class _Factor:
    """Elementary factor ``f(x)**power`` with closed-form log-derivatives."""

    def __init__(self, logabs, dlog, d2log, sign=None, power=1.0):
        self.logabs, self.dlog, self.d2log, self.sgn, self.power = logabs, dlog, d2log, sign, power

    def parts(self, x):
        c = self.power
        sign = np.ones_like(x)
        if self.sgn is not None:
            s = self.sgn(x)
            sign = s if c == 1.0 else s ** int(c)
        return _LogParts(c * self.logabs(x), c * self.dlog(x), c * self.d2log(x), sign)


def _log_sinh(x):
    ax = np.abs(x)
    return ax + np.log(-np.expm1(-2.0 * ax)) - math.log(2.0)


def _log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def _inv_sq(f):
    def g(x):
        with np.errstate(over="ignore"):
            return 1.0 / f(x) ** 2
    return g


def power_x(c):
    return _Factor(np.log, lambda x: 1.0 / x, lambda x: -1.0 / x**2, power=c)


def power_sin(c, k=1.0):
    return _Factor(
        lambda x: np.log(np.abs(np.sin(k * x))),
        lambda x: k / np.tan(k * x),
        lambda x: -(k**2) / np.sin(k * x) ** 2,
        sign=lambda x: np.sign(np.sin(k * x)),
        power=c,
    )


def power_cos(c):
    return _Factor(
        lambda x: np.log(np.cos(x)), lambda x: -np.tan(x), lambda x: -1.0 / np.cos(x) ** 2, power=c
    )


def power_sinh(c):
    return _Factor(_log_sinh, lambda x: 1.0 / np.tanh(x), lambda x: -_inv_sq(np.sinh)(x), power=c)


def power_cosh(c):
    return _Factor(_log_cosh, np.tanh, _inv_sq(np.cosh), power=c)


def exp_linear(k):
    return _Factor(lambda x: k * x, lambda x: np.full_like(x, k), lambda x: np.zeros_like(x))


def exp_quadratic(k):
    """``exp(k x^2)``."""
    return _Factor(lambda x: k * x * x, lambda x: 2.0 * k * x, lambda x: np.full_like(x, 2.0 * k))


@dataclass(frozen=True)
class _Argument:
    """Polynomial argument ``y(x)`` with derivatives and large-``|y|`` helpers."""

    y: Evaluator
    dy: Evaluator
    d2y: Evaluator
    log_abs_y: Evaluator | None = None
    dlog_y: Evaluator | None = None
    d2y_over_y: Evaluator | None = None


ARG_COS2X = _Argument(
    lambda x: np.cos(2.0 * x), lambda x: -2.0 * np.sin(2.0 * x), lambda x: -4.0 * np.cos(2.0 * x)
)
ARG_COSH2X = _Argument(
    lambda x: np.cosh(2.0 * x),
    lambda x: 2.0 * np.sinh(2.0 * x),
    lambda x: 4.0 * np.cosh(2.0 * x),
    log_abs_y=lambda x: _log_cosh(2.0 * x),
    dlog_y=lambda x: 2.0 * np.tanh(2.0 * x),
    d2y_over_y=lambda x: np.full_like(x, 4.0),
)
ARG_TANH = _Argument(
    np.tanh, _inv_sq(np.cosh), lambda x: -2.0 * np.tanh(x) * _inv_sq(np.cosh)(x)
)
ARG_COTH = _Argument(
    lambda x: 1.0 / np.tanh(x),
    lambda x: -_inv_sq(np.sinh)(x),
    lambda x: 2.0 / (np.tanh(x) * np.sinh(x) ** 2),
    log_abs_y=lambda x: -np.log(np.tanh(x)),
    dlog_y=lambda x: -2.0 / np.sinh(2.0 * x),
    d2y_over_y=lambda x: 2.0 / np.sinh(x) ** 2,
)
ARG_X2 = _Argument(
    lambda x: x * x,
    lambda x: 2.0 * x,
    lambda x: np.full_like(x, 2.0),
    log_abs_y=lambda x: 2.0 * np.log(np.abs(x)),
    dlog_y=lambda x: 2.0 / x,
    d2y_over_y=lambda x: 2.0 / x**2,
)
ARG_MINUS_X2 = _Argument(
    lambda x: -x * x,
    lambda x: -2.0 * x,
    lambda x: np.full_like(x, -2.0),
    log_abs_y=lambda x: 2.0 * np.log(np.abs(x)),
    dlog_y=lambda x: 2.0 / x,
    d2y_over_y=lambda x: 2.0 / x**2,
)

_HUGE_ARG = 1e100


class _PolyFactor:
    """Laguerre or Jacobi polynomial of degree ``n`` evaluated at ``arg(x)``."""

    def __init__(self, kind, n, params, arg: _Argument):
        self.kind, self.n, self.params, self.arg = kind, n, tuple(params), arg

    def _log_abs(self, order, y):
        n = self.n - order
        if n < 0:
            return np.full_like(y, -np.inf), np.zeros_like(y)
        if self.kind == "laguerre":
            (a,) = self.params
            la, s = orthopoly.laguerre_log_abs(n, a + order, y)
            return la, s * (-1.0) ** order
        a, b = self.params
        c = math.prod((self.n + a + b + i) / 2 for i in range(1, order + 1))
        la, s = orthopoly.jacobi_log_abs(n, a + order, b + order, y)
        with np.errstate(divide="ignore"):
            return la + math.log(abs(c)) if c != 0 else la - np.inf, s * np.sign(c)

    def _lead(self):
        n = self.n
        if self.kind == "laguerre":
            return (-1.0) ** n / math.factorial(n)
        a, b = self.params
        return math.prod((n + a + b + i) / 2 for i in range(1, n + 1)) / math.factorial(n)

    def parts(self, x):
        arg = self.arg
        y = arg.y(x)
        huge = ~np.isfinite(y) | (np.abs(y) > _HUGE_ARG)
        L = np.empty_like(x)
        d1 = np.empty_like(x)
        d2 = np.empty_like(x)
        sign = np.empty_like(x)
        mod = ~huge
        if np.any(mod):
            ym = y[mod]
            l0, s0 = self._log_abs(0, ym)
            l1, s1 = self._log_abs(1, ym)
            l2, s2 = self._log_abs(2, ym)
            with np.errstate(over="ignore", invalid="ignore"):
                r1 = s0 * s1 * np.exp(l1 - l0)
                r2 = s0 * s2 * np.exp(l2 - l0)
                dy = arg.dy(x[mod])
                first = r1 * dy
                L[mod] = l0
                d1[mod] = first
                d2[mod] = r2 * dy**2 + r1 * arg.d2y(x[mod]) - first**2
                sign[mod] = s0
        if np.any(huge):
            if arg.log_abs_y is None:
                raise ConstructionCheckFailed("polynomial argument overflowed")
            xh = x[huge]
            lead = self._lead()
            n = self.n
            if lead == 0:
                raise ConstructionCheckFailed("degenerate leading coefficient at large argument")
            ly = arg.log_abs_y(xh)
            g1 = arg.dlog_y(xh)
            L[huge] = math.log(abs(lead)) + n * ly
            d1[huge] = n * g1
            d2[huge] = n * (n - 1) * g1**2 + n * arg.d2y_over_y(xh) - (n * g1) ** 2
            sy = np.sign(y[huge]) if n % 2 else 1.0
            sign[huge] = math.copysign(1.0, lead) * sy
        return _LogParts(L, d1, d2, sign)


class _Product:
    """Product of factors; the sum of their log-parts."""

    def __init__(self, factors, global_sign=1.0):
        self.factors = tuple(factors)
        self.global_sign = global_sign

    def parts(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        L = np.zeros_like(x)
        d1 = np.zeros_like(x)
        d2 = np.zeros_like(x)
        sign = np.full_like(x, self.global_sign)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for f in self.factors:
                p = f.parts(x)
                L = L + p.L
                d1 = d1 + p.d1
                d2 = d2 + p.d2
                sign = sign * p.sign
        if scalar:
            return _LogParts(L[0], d1[0], d2[0], sign[0])
        return _LogParts(L, d1, d2, sign)

    def flipped(self):
        return _Product(self.factors, -self.global_sign)

    # evaluators -----------------------------------------------------------

    def log_abs(self, x):
        return self.parts(x).L

    def value(self, x):
        p = self.parts(x)
        with np.errstate(over="ignore"):
            return p.sign * np.exp(p.L)

    def deriv(self, x):
        p = self.parts(x)
        with np.errstate(over="ignore", invalid="ignore"):
            return p.sign * np.exp(p.L) * p.d1

    def second_deriv(self, x):
        p = self.parts(x)
        with np.errstate(over="ignore", invalid="ignore"):
            return p.sign * np.exp(p.L) * (p.d2 + p.d1**2)

    def dlog(self, x):
        return self.parts(x).d1


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialSpec:
    """A concrete potential: family, parameters, domain and spectrum data.

    ``index_base`` is the first valid eigenstate index (1 for the infinite
    well, whose modes are labelled by their number of half-wavelengths;
    0 elsewhere).  ``n_bound`` counts eigenstates from ``index_base``.
    """

    family: Family
    params: tuple[tuple[str, float], ...]
    domain: Interval
    V: Evaluator = field(compare=False, repr=False)
    n_bound: float = field(compare=False)
    ground_energy: float | None = field(compare=False)
    index_base: int = field(default=0, compare=False)
    tag: str = ""
    _eigen: Callable | None = field(default=None, compare=False, repr=False)
    _energy: Callable | None = field(default=None, compare=False, repr=False)
    _V_reflected: Callable | None = field(default=None, compare=False, repr=False)
    _eigen_reflected: Callable | None = field(default=None, compare=False, repr=False)

    @property
    def p(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def indices(self) -> range:
        top = self.index_base + self.n_bound
        if math.isinf(top):
            raise ValueError("infinitely many eigenstates; slice explicitly")
        return range(self.index_base, int(top))

    def has_index(self, n: int) -> bool:
        return int(n) == n and self.index_base <= n < self.index_base + self.n_bound

    def eigen_energy(self, n: int) -> float:
        self._require(n)
        return float(self._energy(n))

    def eigen_fn(self, n: int) -> tuple[Evaluator, Evaluator]:
        self._require(n)
        prod = self._eigen(n)
        return prod.value, prod.deriv

    # evaluation near a finite upper end ------------------------------------
    #
    # Points mapped close to hi are known more precisely through their gap
    # ``hi - y`` than through ``y`` itself; families with a reflection
    # identity evaluate there in the gap variable.

    def _near_hi(self, gap):
        return np.asarray(gap, dtype=float) < 0.25 * self.domain.length

    def V_split(self, y, gap=None):
        """``V(y)``, using ``gap = hi - y`` where that is the better input."""
        if gap is None or self._V_reflected is None:
            return self.V(y)
        near = self._near_hi(gap)
        with np.errstate(all="ignore"):
            return np.where(near, self._V_reflected(np.where(near, gap, 1.0)), self.V(y))

    def eigen_split(self, n: int):
        """Eigenfunction ``n`` as ``f(y, gap=None)`` (see :meth:`V_split`)."""
        value = self.eigen_fn(n)[0]
        if self._eigen_reflected is None:
            return lambda y, gap=None: value(y)
        reflected = self._eigen_reflected(n)

        def f(y, gap=None):
            if gap is None:
                return value(y)
            near = self._near_hi(gap)
            with np.errstate(all="ignore"):
                return np.where(near, reflected(np.where(near, gap, 1.0)), value(y))

        return f

    def _require(self, n):
        if not self.has_index(n):
            raise IndexOutOfRange(
                f"{self.family.value}{dict(self.params)} has no eigenstate {n} "
                f"(valid indices start at {self.index_base}, count {self.n_bound})"
            )

    def __str__(self):
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.family.value}({ps})"


_REQUIRED = {
    Family.RADIAL_OSCILLATOR: ("g",),
    Family.POSCHL_TELLER: ("g", "h"),
    Family.HYPERBOLIC_PT: ("g", "h"),
    Family.ROSEN_MORSE: ("h", "mu"),
    Family.ECKART: ("g", "mu"),
    Family.FREE_PARTICLE: ("kappa",),
    Family.INFINITE_WELL: ("width",),
}

PARAMETERS = _REQUIRED

CONSTRAINTS = {
    Family.RADIAL_OSCILLATOR: "g > 1/2",
    Family.POSCHL_TELLER: "g,h > 1/2",
    Family.HYPERBOLIC_PT: "h > g > 1/2",
    Family.ROSEN_MORSE: "h > sqrt(mu) > 0",
    Family.ECKART: "sqrt(mu) > g > 1/2",
    Family.FREE_PARTICLE: "kappa > 0",
    Family.INFINITE_WELL: "width > 0",
}

FORMULAS = {
    Family.RADIAL_OSCILLATOR: "V = x^2 + g(g-1)/x^2 on (0, inf)",
    Family.POSCHL_TELLER: "V = g(g-1)/sin^2 x + h(h-1)/cos^2 x on (0, pi/2)",
    Family.HYPERBOLIC_PT: "V = g(g-1)/sinh^2 x - h(h+1)/cosh^2 x on (0, inf)",
    Family.ROSEN_MORSE: "V = -h(h+1)/cosh^2 x + 2 mu tanh x on (-inf, inf)",
    Family.ECKART: "V = g(g-1)/sinh^2 x - 2 mu coth x on (0, inf)",
    Family.FREE_PARTICLE: "V = 0 on (-inf, inf)",
    Family.INFINITE_WELL: "V = 0 on (0, width), hard walls",
}

SEED_KINDS = {
    Family.RADIAL_OSCILLATOR: ("virtual",),
    Family.POSCHL_TELLER: ("virtual",),
    Family.HYPERBOLIC_PT: ("virtual", "overshoot"),
    Family.ROSEN_MORSE: ("overshoot",),
    Family.ECKART: ("overshoot",),
    Family.FREE_PARTICLE: ("virtual",),
    Family.INFINITE_WELL: (),
}


def _violation(family, p) -> str | None:
    f = Family
    if family is f.RADIAL_OSCILLATOR:
        return None if p["g"] > 0.5 else "g > 1/2"
    if family is f.POSCHL_TELLER:
        return None if p["g"] > 0.5 and p["h"] > 0.5 else "g,h > 1/2"
    if family is f.HYPERBOLIC_PT:
        if not p["g"] > 0.5:
            return "g > 1/2"
        return None if p["h"] > p["g"] else "h > g"
    if family is f.ROSEN_MORSE:
        if not p["mu"] > 0:
            return "mu > 0"
        return None if p["h"] > math.sqrt(p["mu"]) else "h > sqrt(mu)"
    if family is f.ECKART:
        if not p["g"] > 0.5:
            return "g > 1/2"
        return None if math.sqrt(p["mu"]) > p["g"] else "sqrt(mu) > g"
    if family is f.FREE_PARTICLE:
        return None if p["kappa"] > 0 else "kappa > 0"
    if family is f.INFINITE_WELL:
        return None if p["width"] > 0 else "width > 0"
    return None


def _rm_ab(h, mu, n):
    s = h - n
    return s + mu / s, s - mu / s


def _eckart_ab(g, mu, n):
    s = g + n
    return -s + mu / s, -s - mu / s


def _eigen_product(family, p, n) -> _Product:
    f = Family
    if family is f.RADIAL_OSCILLATOR:
        g = p["g"]
        return _Product([exp_quadratic(-0.5), power_x(g),
                         _PolyFactor("laguerre", n, (g - 0.5,), ARG_X2)])
    if family is f.POSCHL_TELLER:
        g, h = p["g"], p["h"]
        return _Product([power_sin(g), power_cos(h),
                         _PolyFactor("jacobi", n, (g - 0.5, h - 0.5), ARG_COS2X)])
    if family is f.HYPERBOLIC_PT:
        g, h = p["g"], p["h"]
        return _Product([power_sinh(g), power_cosh(-h),
                         _PolyFactor("jacobi", n, (g - 0.5, -h - 0.5), ARG_COSH2X)])
    if family is f.ROSEN_MORSE:
        h, mu = p["h"], p["mu"]
        s = h - n
        return _Product([exp_linear(-mu / s), power_cosh(-s),
                         _PolyFactor("jacobi", n, _rm_ab(h, mu, n), ARG_TANH)])
    if family is f.ECKART:
        g, mu = p["g"], p["mu"]
        s = g + n
        return _Product([exp_linear(-mu / s), power_sinh(s),
                         _PolyFactor("jacobi", n, _eckart_ab(g, mu, n), ARG_COTH)])
    if family is f.INFINITE_WELL:
        return _Product([power_sin(1.0, k=n * math.pi / p["width"])])
    raise IndexOutOfRange(f"{family.value} has no bound states")


def _eigen_energy(family, p, n) -> float:
    f = Family
    if family is f.RADIAL_OSCILLATOR:
        return 4 * n + 2 * p["g"] + 1
    if family is f.POSCHL_TELLER:
        return (p["g"] + p["h"] + 2 * n) ** 2
    if family is f.HYPERBOLIC_PT:
        return -((p["h"] - p["g"] - 2 * n) ** 2)
    if family is f.ROSEN_MORSE:
        s = p["h"] - n
        return -(s**2) - p["mu"] ** 2 / s**2
    if family is f.ECKART:
        s = p["g"] + n
        return -(s**2) - p["mu"] ** 2 / s**2
    if family is f.INFINITE_WELL:
        return (n * math.pi / p["width"]) ** 2
    raise IndexOutOfRange(f"{family.value} has no bound states")


def _potential_fn(family, p) -> Evaluator:
    f = Family
    if family is f.RADIAL_OSCILLATOR:
        g = p["g"]
        return lambda x: x**2 + g * (g - 1) / x**2
    if family is f.POSCHL_TELLER:
        g, h = p["g"], p["h"]
        return lambda x: g * (g - 1) / np.sin(x) ** 2 + h * (h - 1) / np.cos(x) ** 2
    if family is f.HYPERBOLIC_PT:
        g, h = p["g"], p["h"]
        return lambda x: g * (g - 1) * _inv_sq(np.sinh)(x) - h * (h + 1) * _inv_sq(np.cosh)(x)
    if family is f.ROSEN_MORSE:
        h, mu = p["h"], p["mu"]
        return lambda x: -h * (h + 1) * _inv_sq(np.cosh)(x) + 2 * mu * np.tanh(x)
    if family is f.ECKART:
        g, mu = p["g"], p["mu"]
        return lambda x: g * (g - 1) * _inv_sq(np.sinh)(x) - 2 * mu / np.tanh(x)
    return lambda x: np.zeros_like(np.asarray(x, dtype=float))


def _potential_expr(spec: PotentialSpec):
    """sympy expression of ``V`` (used for higher Wronskian derivatives)."""
    import sympy as sp

    x = sp.Symbol("x", real=True)
    p = {k: sp.Float(v) for k, v in spec.params}
    f = Family
    fam = spec.family
    if fam is f.RADIAL_OSCILLATOR:
        g = p["g"]
        return x, x**2 + g * (g - 1) / x**2
    if fam is f.POSCHL_TELLER:
        g, h = p["g"], p["h"]
        return x, g * (g - 1) / sp.sin(x) ** 2 + h * (h - 1) / sp.cos(x) ** 2
    if fam is f.HYPERBOLIC_PT:
        g, h = p["g"], p["h"]
        return x, g * (g - 1) / sp.sinh(x) ** 2 - h * (h + 1) / sp.cosh(x) ** 2
    if fam is f.ROSEN_MORSE:
        h, mu = p["h"], p["mu"]
        return x, -h * (h + 1) / sp.cosh(x) ** 2 + 2 * mu * sp.tanh(x)
    if fam is f.ECKART:
        g, mu = p["g"], p["mu"]
        return x, g * (g - 1) / sp.sinh(x) ** 2 - 2 * mu * sp.coth(x)
    if fam in (f.FREE_PARTICLE, f.INFINITE_WELL):
        return x, sp.Integer(0)
    return x, None


def _n_bound(family, p) -> float:
    f = Family
    if family in (f.RADIAL_OSCILLATOR, f.POSCHL_TELLER, f.INFINITE_WELL):
        return math.inf
    if family is f.HYPERBOLIC_PT:
        return bracket_prime((p["h"] - p["g"]) / 2) + 1
    if family is f.ROSEN_MORSE:
        return bracket_prime(p["h"] - math.sqrt(p["mu"])) + 1
    if family is f.ECKART:
        return bracket_prime(math.sqrt(p["mu"]) - p["g"]) + 1
    return 0


def _domain(family, p) -> Interval:
    f = Family
    if family is f.POSCHL_TELLER:
        return Interval(0.0, math.pi / 2)
    if family in (f.RADIAL_OSCILLATOR, f.HYPERBOLIC_PT, f.ECKART):
        return Interval(0.0, math.inf)
    if family is f.INFINITE_WELL:
        return Interval(0.0, p["width"])
    return Interval(-math.inf, math.inf)


def _reflections(family, p) -> dict:
    """Evaluators in the gap ``hi - y`` for families with a finite upper end."""
    if family is Family.POSCHL_TELLER:
        # x -> pi/2 - x swaps sin and cos, i.e. g and h, and cos 2x -> -cos 2x
        swapped = {"g": p["h"], "h": p["g"]}
        V = _potential_fn(family, swapped)
        return {
            "_V_reflected": V,
            "_eigen_reflected": lambda n: _Product(
                _eigen_product(family, swapped, n).factors, (-1.0) ** n
            ).value,
        }
    if family is Family.INFINITE_WELL:
        w = p["width"]
        return {
            "_V_reflected": _potential_fn(family, p),
            "_eigen_reflected": lambda n: (
                lambda d: (-1.0) ** (n + 1) * np.sin(n * math.pi / w * np.asarray(d, dtype=float))
            ),
        }
    return {}


def make_potential(family, params: dict | None = None, **kwargs) -> PotentialSpec:
    """Instantiate a named potential family.

    >>> make_potential("radial_oscillator", g=1.0).V(2.0)
    4.0

    Raises
    ------
    ParamOutOfRange
        Unknown family, missing/unknown parameter, or a violated range
        constraint (the message names the inequality).
    """
    fam = Family.parse(family)
    if fam is Family.CUSTOM:
        raise ParamOutOfRange("custom potentials are built with custom_nodeless()")
    given = dict(params or {})
    given.update(kwargs)
    need = _REQUIRED[fam]
    missing = [k for k in need if k not in given]
    extra = [k for k in given if k not in need]
    if missing or extra:
        raise ParamOutOfRange(
            f"{fam.value} takes parameters {', '.join(need)}"
            + (f"; missing {missing}" if missing else "")
            + (f"; unknown {extra}" if extra else "")
        )
    p = {k: float(given[k]) for k in need}
    if any(not math.isfinite(v) for v in p.values()):
        raise ParamOutOfRange(f"{fam.value} parameters must be finite, got {p}")
    bad = _violation(fam, p)
    if bad is not None:
        raise ParamOutOfRange(
            f"{fam.value} requires {CONSTRAINTS[fam]} (violated: {bad}; got "
            + ", ".join(f"{k}={v:g}" for k, v in p.items())
            + ")"
        )
    n_bound = _n_bound(fam, p)
    index_base = 1 if fam is Family.INFINITE_WELL else 0
    if fam is Family.FREE_PARTICLE:
        ground = 0.0  # bottom of the continuum
    else:
        ground = _eigen_energy(fam, p, index_base)
    return PotentialSpec(
        family=fam,
        params=tuple(p.items()),
        domain=_domain(fam, p),
        V=_potential_fn(fam, p),
        n_bound=n_bound,
        ground_energy=ground,
        index_base=index_base,
        _eigen=lambda n: _eigen_product(fam, p, n),
        _energy=lambda n: _eigen_energy(fam, p, n),
        **_reflections(fam, p),
    )


# ---------------------------------------------------------------------------
# Rayleigh quotient
# ---------------------------------------------------------------------------

def rayleigh_points(domain: Interval, n: int = 10) -> np.ndarray:
    """``n`` interior sample points, uniform in the compactified coordinate."""
    u_lo, u_hi = domain.comp_bounds
    u = u_lo + (u_hi - u_lo) * (0.1 + 0.8 * np.arange(n) / (n - 1))
    return domain.from_comp(u)


def _analytic_quotient(prod: _Product, V: Evaluator, xs):
    p = prod.parts(xs)
    return V(xs) - (p.d2 + p.d1**2)


def rayleigh_quotient(sol, xs=None, method: str = "fd", h: float = 1e-2) -> np.ndarray:
    """``(-phi'' + V phi)/phi`` at ``xs`` for a seed or eigenfunction.

    ``method="fd"`` differentiates the locally rescaled function
    ``exp(log|phi(t)| - log|phi(x)|)`` numerically (central differences with
    two Richardson steps), independent of the closed-form derivatives and
    immune to overflow; ``method="analytic"`` uses the closed forms.
    """
    from .numerics import fd_second_derivative

    owner = sol.owner
    if xs is None:
        xs = rayleigh_points(owner.domain)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if method == "analytic":
        return owner.V(xs) - (sol.d2log(xs) + sol.dlog(xs) ** 2)
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    dom = owner.domain
    out = np.empty_like(xs)
    for i, x0 in enumerate(xs):
        step = h * min(1.0, x0 - dom.lo, dom.hi - x0)
        L0 = float(np.asarray(sol.log_abs(np.array([x0])))[0])
        # keep exp(L(t) - L0) within O(1) over the stencil
        Lp, Lm = np.asarray(sol.log_abs(np.array([x0 + step, x0 - step])), dtype=float)
        slope = abs(Lp - Lm) / (2.0 * step)
        if slope * step > 1.0:
            step = 1.0 / slope
        g = lambda t: np.exp(np.asarray(sol.log_abs(t), dtype=float) - L0)  # noqa: E731
        out[i] = float(owner.V(np.array([x0]))[0]) - fd_second_derivative(g, np.array([x0]), step, levels=2)[0]
    return out


def _spread(q, ref) -> float:
    return float((np.max(q) - np.min(q)) / max(abs(ref), 1.0))


# ---------------------------------------------------------------------------
# nodeless seeds
# ---------------------------------------------------------------------------

class SeedKind(enum.Enum):
    VIRTUAL = "virtual"
    OVERSHOOT = "overshoot"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BoundaryReport:
    A_holds: bool
    B_holds: bool
    diagnostics: dict

    @property
    def ok(self) -> bool:
        return self.A_holds and self.B_holds


@dataclass(frozen=True, eq=False)
class NodelessSolution:
    """A positive solution ``phi_0`` of ``H_0 phi_0 = E phi_0`` without nodes.

    Evaluators are vectorised.  ``log_abs`` and ``dlog``/``d2log`` are the
    logarithm of ``phi_0`` and its first two derivatives; use them instead of
    ``value`` wherever ``phi_0`` can overflow.
    """

    owner: PotentialSpec
    kind: SeedKind
    degree: int | None
    energy: float
    value: Evaluator = field(repr=False)
    log_abs: Evaluator = field(repr=False)
    deriv: Evaluator = field(repr=False)
    dlog: Evaluator = field(repr=False)
    d2log: Evaluator = field(repr=False)
    closed_form_energy: float | None = None
    tabulated_energy: float | None = None
    rayleigh_spread: float = 0.0
    diagnostics: tuple[str, ...] = ()
    boundary: BoundaryReport | None = field(default=None, repr=False)
    sign: Evaluator | None = field(default=None, repr=False)
    log_abs_gap: Evaluator | None = field(default=None, repr=False)

    @property
    def scan_fn(self) -> Evaluator:
        """Evaluator for node scans: the exact sign when known, else ``value``.

        ``value`` itself under- or overflows far out on infinite domains,
        which a scan would misread as a zero.
        """
        return self.sign if self.sign is not None else self.value

    def second_deriv(self, x):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.value(x) * (self.d2log(x) + self.dlog(x) ** 2)

    def __str__(self):
        deg = "" if self.degree is None else f" v={self.degree}"
        return f"{self.kind.value} seed{deg} of {self.owner} (E={self.energy:.12g})"


def seed_bracket(spec: PotentialSpec, kind) -> IndexBracket:
    """Admissible degrees for a virtual or overshoot seed of ``spec``.

    Raises ``IndexOutOfRange`` when the family has no seeds of that kind.
    """
    kind = SeedKind(kind) if not isinstance(kind, SeedKind) else kind
    fam, p = spec.family, spec.p
    f = Family
    if kind is SeedKind.VIRTUAL:
        if fam is f.RADIAL_OSCILLATOR:
            return IndexBracket(-1.0, math.inf)
        if fam is f.POSCHL_TELLER:
            return IndexBracket(-1.0, p["h"] - 0.5)
        if fam is f.HYPERBOLIC_PT:
            return IndexBracket(-1.0, (p["h"] - p["g"]) / 2)
        if fam is f.FREE_PARTICLE:
            return IndexBracket(-1.0, 1.0)
    elif kind is SeedKind.OVERSHOOT:
        if fam is f.HYPERBOLIC_PT:
            return IndexBracket(p["h"] - p["g"], math.inf)
        if fam is f.ROSEN_MORSE:
            return IndexBracket(p["h"], p["h"] + p["mu"] / p["h"])
        if fam is f.ECKART:
            return IndexBracket(max(p["mu"] / p["g"] - p["g"], -1.0), math.inf)
    raise IndexOutOfRange(f"{fam.value} has no {kind.value} seeds")


def _seed_data(spec, kind: SeedKind, v: int):
    """(product, closed-form energy, tabulated energy) for a catalog seed."""
    fam, p = spec.family, spec.p
    f = Family
    if kind is SeedKind.VIRTUAL:
        if fam is f.RADIAL_OSCILLATOR:
            g = p["g"]
            prod = _Product([exp_quadratic(0.5), power_x(g),
                             _PolyFactor("laguerre", v, (g - 0.5,), ARG_MINUS_X2)])
            return prod, -(4 * v + 2 * g + 1), -4 * v - 2 * g + 3
        if fam is f.POSCHL_TELLER:
            g, h = p["g"], p["h"]
            prod = _Product([power_sin(g), power_cos(1 - h),
                             _PolyFactor("jacobi", v, (g - 0.5, 0.5 - h), ARG_COS2X)])
            e = (g - h + 1 + 2 * v) ** 2
            return prod, e, e
        if fam is f.HYPERBOLIC_PT:
            g, h = p["g"], p["h"]
            prod = _Product([power_sinh(g), power_cosh(h + 1),
                             _PolyFactor("jacobi", v, (g - 0.5, h + 0.5), ARG_COSH2X)])
            tab = -((h - g) ** 2) - (2 * v + 2 * g + 1) * (2 * v + 2 * h + 1)
            return prod, -((g + h + 2 * v + 1) ** 2), tab
        if fam is f.FREE_PARTICLE:
            k = p["kappa"]
            return _Product([exp_linear(k)]), -k * k, -k * k
    if kind is SeedKind.OVERSHOOT:
        if fam is f.HYPERBOLIC_PT:
            g, h = p["g"], p["h"]
            e = -((h - g - 2 * v) ** 2)
            return _eigen_product(fam, p, v), e, e
        if fam in (f.ROSEN_MORSE, f.ECKART):
            e = _eigen_energy(fam, p, v)
            return _eigen_product(fam, p, v), e, e
    raise IndexOutOfRange(f"{fam.value} has no {kind.value} seeds")


def _seed_reflection(spec, kind: SeedKind, v: int) -> _Product | None:
    """The seed as a function of ``hi - x`` (finite upper ends only)."""
    if spec.family is Family.POSCHL_TELLER and kind is SeedKind.VIRTUAL:
        # x -> pi/2 - x: sin <-> cos and cos 2x -> -cos 2x, which swaps the
        # Jacobi parameters up to the sign (-1)^v
        g, h = spec.p["g"], spec.p["h"]
        return _Product([power_sin(1 - h), power_cos(g),
                         _PolyFactor("jacobi", v, (0.5 - h, g - 0.5), ARG_COS2X)])
    return None


def _build_seed(spec, kind, v, *, check=True) -> NodelessSolution:
    kind = SeedKind(kind) if not isinstance(kind, SeedKind) else kind
    bracket = seed_bracket(spec, kind)
    if bracket.empty:
        raise EmptyRange(
            f"{spec}: no integer {kind.value} degree in {bracket.describe()}"
        )
    if int(v) != v or not bracket.contains(int(v)):
        raise IndexOutOfRange(
            f"{spec}: {kind.value} degree v={v} outside admissible {bracket.describe()}"
        )
    v = int(v)
    prod, closed, tabulated = _seed_data(spec, kind, v)
    ref = spec.domain.reference_point()
    if prod.parts(np.array([ref])).sign[0] < 0:
        prod = prod.flipped()

    reflected = _seed_reflection(spec, kind, v)
    xs = rayleigh_points(spec.domain)
    q = _analytic_quotient(prod, spec.V, xs)
    energy = float(np.mean(q))
    spread = _spread(q, energy)
    label = f"{kind.value} seed v={v} of {spec}"
    if not np.all(np.isfinite(q)) or spread > RAYLEIGH_REL_TOL:
        raise ConstructionCheckFailed(
            f"{label}: Rayleigh quotient not constant (relative spread {spread:.3g})"
        )
    if abs(energy - closed) > ENERGY_MATCH_REL_TOL * max(1.0, abs(energy)):
        raise ConstructionCheckFailed(
            f"{label}: measured energy {energy:.15g} disagrees with closed form {closed:.15g}"
        )
    diagnostics = []
    if abs(tabulated - energy) > ENERGY_MATCH_REL_TOL * max(1.0, abs(energy)):
        diagnostics.append(
            f"tabulated energy formula gives {tabulated:.12g} but the Rayleigh quotient "
            f"gives {energy:.12g}; the measured value is used"
        )
    if spec.ground_energy is not None and not energy < spec.ground_energy:
        raise ConstructionCheckFailed(
            f"{label}: energy {energy:.12g} is not below the ground state {spec.ground_energy:.12g}"
        )
    sol = NodelessSolution(
        owner=spec,
        kind=kind,
        degree=v,
        energy=energy,
        value=prod.value,
        log_abs=prod.log_abs,
        deriv=prod.deriv,
        dlog=prod.dlog,
        d2log=lambda x: prod.parts(x).d2,
        closed_form_energy=float(closed),
        tabulated_energy=float(tabulated),
        rayleigh_spread=spread,
        diagnostics=tuple(diagnostics),
        sign=_sign_only(prod),
        log_abs_gap=reflected.log_abs if reflected is not None else None,
    )
    if not check:
        return sol
    if not nodeless_scan(sol.scan_fn, spec.domain, SCAN_POINTS):
        raise NodeDetected(f"{label}: sign change found on the scan grid")
    report = check_boundary_conditions(sol)
    if not report.ok:
        raise BoundaryCheckFailed(f"{label}: {_boundary_failure(report)}")
    object.__setattr__(sol, "boundary", report)
    return sol


def _boundary_failure(report) -> str:
    parts = []
    if not report.A_holds:
        parts.append("condition (A) violated: int 1/phi^2 does not diverge at the lower end")
    if not report.B_holds:
        parts.append("condition (B) violated: int 1/phi^2 does not vanish at the upper end")
    return "; ".join(parts)


def _sign_only(prod: _Product) -> Evaluator:
    """Sign of the product, zero only at genuine zeros of a factor.

    Scanning this instead of the value keeps under- or overflow of the
    magnitude (``exp(83 x)`` at ``x = -20``) from posing as a node.
    """
    def f(x):
        p = prod.parts(x)
        return np.where(np.isneginf(p.L), 0.0, p.sign)
    return f


def virtual_state(spec: PotentialSpec, v: int, *, check: bool = True) -> NodelessSolution:
    """Virtual-state seed of degree ``v`` (radial oscillator, PT, hPT, free particle).

    The energy is measured from the Rayleigh quotient; nodelessness and the
    boundary conditions are verified before returning.
    """
    if spec.family not in (Family.RADIAL_OSCILLATOR, Family.POSCHL_TELLER,
                           Family.HYPERBOLIC_PT, Family.FREE_PARTICLE):
        raise IndexOutOfRange(f"{spec.family.value} has no virtual-state seeds")
    return _build_seed(spec, SeedKind.VIRTUAL, v, check=check)


def overshoot_state(spec: PotentialSpec, v: int, *, check: bool = True) -> NodelessSolution:
    """Overshoot-eigenfunction seed of degree ``v`` (hPT, Rosen-Morse, Eckart)."""
    if spec.family not in (Family.HYPERBOLIC_PT, Family.ROSEN_MORSE, Family.ECKART):
        raise IndexOutOfRange(f"{spec.family.value} has no overshoot seeds")
    return _build_seed(spec, SeedKind.OVERSHOOT, v, check=check)


def eigenfunction(spec: PotentialSpec, n: int):
    """Bound state ``n`` of ``spec`` as ``(value, deriv, energy)``.

    The energy is checked against the Rayleigh quotient of the returned
    function before it is handed out.
    """
    spec._require(n)
    prod = spec._eigen(n)
    energy = spec.eigen_energy(n)
    xs = rayleigh_points(spec.domain)
    q = _analytic_quotient(prod, spec.V, xs)
    ok = np.isfinite(q)
    if not np.any(ok) or np.max(np.abs(q[ok] - energy)) > RAYLEIGH_REL_TOL * max(1.0, abs(energy)):
        raise ConstructionCheckFailed(f"eigenstate {n} of {spec}: Rayleigh quotient != {energy}")
    if spec.family is Family.INFINITE_WELL:
        k = n * math.pi / spec.p["width"]
        return (lambda x: np.sin(k * np.asarray(x, dtype=float)),
                lambda x: k * np.cos(k * np.asarray(x, dtype=float)), energy)
    return prod.value, prod.deriv, energy


_custom_counter = itertools.count(1)


def custom_nodeless(
    value: Evaluator,
    deriv: Evaluator,
    second_deriv: Evaluator,
    energy_hint: float,
    domain: Interval,
    *,
    log_abs: Evaluator | None = None,
    log_abs_gap: Evaluator | None = None,
    check_boundaries: bool = True,
    name: str | None = None,
):
    """Wrap a user-supplied positive function as a seed.

    The potential is *defined* so that the seed solves it exactly:
    ``V_0 = phi'' / phi + energy_hint``.  Returns ``(PotentialSpec,
    NodelessSolution)``.  ``log_abs`` and ``log_abs_gap`` (``log|phi|`` in
    terms of ``hi - x``) are optional precision aids for tail integrals.

    Raises
    ------
    NodeDetected
        ``value`` changes sign (or vanishes) on a 256-point probe grid.
    BoundaryCheckFailed
        Condition (A) or (B) fails numerically (skipped when
        ``check_boundaries`` is false).
    """
    energy = float(energy_hint)

    def _arr(f):
        return lambda x: np.asarray(f(np.asarray(x, dtype=float)), dtype=float)

    value, deriv, second_deriv = _arr(value), _arr(deriv), _arr(second_deriv)
    if log_abs is None:
        def log_abs(x):
            with np.errstate(divide="ignore"):
                return np.log(np.abs(value(x)))
    else:
        log_abs = _arr(log_abs)

    def V(x):
        return second_deriv(x) / value(x) + energy

    def dlog(x):
        return deriv(x) / value(x)

    def d2log(x):
        return second_deriv(x) / value(x) - dlog(x) ** 2

    tag = name or f"custom-{next(_custom_counter)}"
    spec = PotentialSpec(
        family=Family.CUSTOM,
        params=(),
        domain=domain,
        V=V,
        n_bound=0,
        ground_energy=None,
        tag=tag,
    )
    if not nodeless_scan(value, domain, 256):
        raise NodeDetected(f"custom seed {tag} changes sign on {domain}")
    ref = domain.reference_point()
    if value(np.array([ref]))[0] < 0:
        raise NodeDetected(f"custom seed {tag} must be positive (sign convention)")
    sol = NodelessSolution(
        owner=spec,
        kind=SeedKind.CUSTOM,
        degree=None,
        energy=energy,
        value=value,
        log_abs=log_abs,
        deriv=deriv,
        dlog=dlog,
        d2log=d2log,
        log_abs_gap=_arr(log_abs_gap) if log_abs_gap is not None else None,
    )
    if check_boundaries:
        report = check_boundary_conditions(sol)
        if not report.ok:
            raise BoundaryCheckFailed(f"custom seed {tag}: {_boundary_failure(report)}")
        object.__setattr__(sol, "boundary", report)
    return spec, sol


# ---------------------------------------------------------------------------
# scans and boundary checks
# ---------------------------------------------------------------------------

def nodeless_scan(fn: Evaluator, domain: Interval, n_points: int = SCAN_POINTS) -> bool:
    """True when ``fn`` keeps one strict sign on a graded grid of the domain.

    Adjacent samples of opposite sign are refined by bisection; a sign
    change that survives refinement is a node.
    """
    if n_points < 64:
        raise ValueError("nodeless_scan needs n_points >= 64")
    xs = graded_grid(domain, n_points)
    with np.errstate(all="ignore"):
        vals = np.asarray(fn(xs), dtype=float)
    if np.any(np.isnan(vals)) or np.any(vals == 0):
        return False
    s = np.sign(vals)
    flips = np.flatnonzero(s[1:] != s[:-1])
    for i in flips:
        a, b = float(xs[i]), float(xs[i + 1])

        def f(t):
            with np.errstate(all="ignore"):
                return float(np.asarray(fn(np.array([t])), dtype=float)[0])

        try:
            r = bisect_root(f, a, b, tol=1e-13 * max(1.0, abs(a), abs(b)))
        except Exception:
            continue
        left, right = f(max(a, r - 1e-9 * (b - a))), f(min(b, r + 1e-9 * (b - a)))
        if left == 0 or right == 0 or np.sign(left) != np.sign(right):
            return False
    return True


_A_THRESHOLD = math.log(1e6)
# boundary probes need a few digits, and near a finite nonzero endpoint the
# abscissae themselves carry relative noise eps*|end|/distance
_PROBE_SETTINGS = QuadSettings(rel_tol=1e-8)
_B_THRESHOLD = math.log(1e-10)
_SLOPE_MIN = 1e-3


def _probe_offsets(domain: Interval, side: str, exact_gaps: bool = False):
    """Distances from the endpoint (finite) or steps outwards (infinite).

    Unless ``exact_gaps`` (the integrand is known in the gap variable), a
    finite nonzero endpoint limits distances to what ``end +- d`` resolves.
    """
    end = domain.lo if side == "lo" else domain.hi
    if math.isfinite(end):
        span = min(1.0, 0.5 * domain.length) if domain.finite else 1.0
        out = []
        k = 1
        while True:
            d = span * 10.0 ** (-k)
            x = end + d if side == "lo" else end - d
            if d < 1e-300:
                break
            if not exact_gaps and (x == end or d < 1e3 * np.finfo(float).eps * abs(end)):
                break
            out.append(d)
            k += 1
        return out
    return [2.0**k for k in range(0, 31)]


def _extrapolates(log_I, log_scale, sign) -> bool:
    """Steady power-law-or-faster trend of ``log I`` versus ``log_scale``."""
    if len(log_I) < 5:
        return False
    slopes = np.diff(log_I[-5:]) / np.diff(log_scale[-5:])
    slopes = sign * slopes
    return bool(np.all(slopes > _SLOPE_MIN) and slopes[-1] >= 0.5 * slopes[0])


def check_boundary_conditions(sol: NodelessSolution, settings: QuadSettings | None = None) -> BoundaryReport:
    """Probe ``I(x) = int_x^b dt/phi^2`` towards both endpoints.

    (A) holds when ``I`` increases past ``1e6`` approaching ``lo``; (B) when
    it decreases below ``1e-10`` approaching ``hi``.  If the probes run out
    of representable or resolvable points first (slow power laws at a
    finite endpoint), the condition is accepted when ``log I`` keeps a steady non-vanishing
    slope against ``log`` distance over the last five probes.
    """
    dom = sol.owner.domain
    settings = settings or _PROBE_SETTINGS
    logf = lambda t: -2.0 * np.asarray(sol.log_abs(t), dtype=float)  # noqa: E731
    logf_gap = None
    if sol.log_abs_gap is not None and dom.hi_finite:
        logf_gap = lambda g: -2.0 * np.asarray(sol.log_abs_gap(g), dtype=float)  # noqa: E731
    x_ref = dom.reference_point()
    lo_anchor = dom.lo if dom.lo_finite else None
    log_I_ref = log_tail(logf, x_ref, dom, settings, logf_gap)

    # (A): accumulate panels from x_ref down towards lo
    offs = _probe_offsets(dom, "lo")
    xs_a, logs_a = [], []
    prev_x, log_J = x_ref, -math.inf
    for d in offs:
        x = dom.lo + d if dom.lo_finite else x_ref - d
        if x >= prev_x:
            continue
        try:
            piece = log_quad(logf, x, prev_x, settings, anchor=lo_anchor)
        except QuadratureFailure:
            break
        log_J = float(np.logaddexp(log_J, piece))
        xs_a.append(x)
        logs_a.append(float(np.logaddexp(log_J, log_I_ref)))
        prev_x = x
        if len(logs_a) >= 4 and logs_a[-1] > _A_THRESHOLD and logs_a[-1] > logs_a[-2]:
            break
    logs_a = np.array(logs_a)
    scale_a = np.log(np.abs(np.array(xs_a) - (dom.lo if dom.lo_finite else x_ref)))
    increasing = bool(np.all(np.diff(logs_a[-4:]) > 0)) if len(logs_a) >= 4 else False
    if increasing and logs_a[-1] > _A_THRESHOLD:
        a_ok, a_how = True, "threshold"
    elif dom.lo_finite and increasing and _extrapolates(logs_a, scale_a, -1.0):
        a_ok, a_how = True, "power-law extrapolation"
    elif not dom.lo_finite and increasing and _extrapolates(logs_a, scale_a, +1.0):
        a_ok, a_how = True, "growth extrapolation"
    else:
        a_ok, a_how = False, "failed"

    # (B): direct tails towards hi
    offs = _probe_offsets(dom, "hi", exact_gaps=logf_gap is not None)
    xs_b, logs_b = [], []
    for d in offs:
        x = dom.hi - d if dom.hi_finite else x_ref + d
        if x <= x_ref:
            continue
        try:
            if logf_gap is not None and x >= gap_zone(dom):
                val = log_quad(logf_gap, 0.0, d, settings, anchor=0.0)
            else:
                val = log_tail(logf, x, dom, settings, logf_gap)
        except QuadratureFailure:
            break
        xs_b.append(x)
        logs_b.append(val)
        if len(logs_b) >= 4 and logs_b[-1] < _B_THRESHOLD and logs_b[-1] < logs_b[-2]:
            break
    logs_b = np.array(logs_b)
    if dom.hi_finite:
        scale_b = np.log(np.array(offs[: len(xs_b)] if len(xs_b) else [], dtype=float))
    else:
        scale_b = np.log(np.abs(x_ref - np.array(xs_b)))
    decreasing = bool(np.all(np.diff(logs_b[-4:]) < 0)) if len(logs_b) >= 4 else False
    if decreasing and logs_b[-1] < _B_THRESHOLD:
        b_ok, b_how = True, "threshold"
    elif dom.hi_finite and decreasing and _extrapolates(logs_b, scale_b, +1.0):
        b_ok, b_how = True, "power-law extrapolation"
    elif not dom.hi_finite and decreasing and _extrapolates(logs_b, scale_b, -1.0):
        b_ok, b_how = True, "decay extrapolation"
    else:
        b_ok, b_how = False, "failed"

    with np.errstate(over="ignore"):
        probes_a = list(zip(xs_a, np.exp(logs_a).tolist()))
        probes_b = list(zip(xs_b, np.exp(logs_b).tolist()))
    return BoundaryReport(
        A_holds=a_ok,
        B_holds=b_ok,
        diagnostics={
            "A_method": a_how,
            "B_method": b_how,
            "A_probes": probes_a,
            "B_probes": probes_b,
            "log_I_A_last": float(logs_a[-1]) if len(logs_a) else math.nan,
            "log_I_B_last": float(logs_b[-1]) if len(logs_b) else math.nan,
        },
    )


# ---------------------------------------------------------------------------
# Wronskians
# ---------------------------------------------------------------------------

def _derivative_rows(sols, order_max):
    """Coefficient functions ``(A_j, B_j)`` with ``phi^(j) = A_j phi + B_j phi'``.

    Built from ``phi'' = (V - E) phi``; orders above 2 need derivatives of
    ``V``, obtained symbolically.
    """
    spec = sols[0].owner
    if order_max <= 2:
        return None
    import sympy as sp

    x, V = _potential_expr(spec)
    if V is None:
        raise ValueError("higher Wronskians need a symbolic potential (catalog families only)")
    rows = []
    for sol in sols:
        q = V - sp.Float(sol.energy)
        A, B = [sp.Integer(1), sp.Integer(0)], [sp.Integer(0), sp.Integer(1)]
        for j in range(1, order_max):
            A.append(sp.diff(A[j], x) + B[j] * q)
            B.append(A[j] + sp.diff(B[j], x))
        rows.append([
            (sp.lambdify(x, A[j], "numpy"), sp.lambdify(x, B[j], "numpy"))
            for j in range(order_max + 1)
        ])
    return rows


def wronskian_function(sols) -> Evaluator:
    """Evaluator ``x -> W[phi_1, ..., phi_M](x)`` (for use with ``nodeless_scan``)."""
    sols = list(sols)
    if not sols:
        raise ValueError("need at least one solution")
    owner = sols[0].owner
    if any(s.owner != owner for s in sols):
        raise MixedOwners("Wronskian members must share one potential")
    M = len(sols)
    rows = _derivative_rows(sols, M - 1)

    def W(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        mat = np.empty(x.shape + (M, M))
        q_vals = owner.V(x)
        for k, sol in enumerate(sols):
            phi = sol.value(x)
            dphi = sol.deriv(x)
            for j in range(M):
                if j == 0:
                    mat[..., j, k] = phi
                elif j == 1:
                    mat[..., j, k] = dphi
                elif j == 2 and rows is None:
                    mat[..., j, k] = (q_vals - sol.energy) * phi
                else:
                    A, B = rows[k][j]
                    mat[..., j, k] = np.broadcast_to(A(x), x.shape) * phi + np.broadcast_to(B(x), x.shape) * dphi
        out = np.linalg.det(mat)
        return out[0] if scalar else out

    return W


def wronskian(sols, x):
    """``det(d^{j-1} phi_k / dx^{j-1})`` at ``x``."""
    return wronskian_function(sols)(x)
