"""Mapping kernels, composed potentials and chains of compositions.

A nodeless seed ``phi_0`` of ``H_0`` on ``(a, b)`` and a target interval
``(c, d)`` define

    I(x)    = int_x^b dt / phi_0(t)^2
    chi_0   = phi_0 (alpha + I),           alpha = 1/(d - c)  (0 if d = inf)
    psi_0   = c + 1/(alpha + I)

``psi_0`` maps ``(a, b)`` monotonically onto ``(c, d)`` and ``chi_0`` is a
second solution of ``H_0`` at the seed energy.  Any eigenfunction ``phi_m``
of a System 1 on ``(c, d)`` is transplanted to ``chi_0 * phi_m(psi_0)``,
which solves the composed Hamiltonian with potential

    V_C = V_0 - E_0 + chi_0^-4 V_1(psi_0)

at the position-dependent eigenvalue ``E_m chi_0^-4``.

All quantities are computed from ``log chi_0 = log|phi_0| + log(alpha + I)``
so that weights like ``chi_0^-4`` never overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .catalog import NodelessSolution, PotentialSpec, eigenfunction
from .errors import (
    IndexOutOfRange,
    MappingCheckFailed,
    QuadratureFailure,
    SeedOwnerMismatch,
    TargetLowerInfinite,
)
from .interval import Interval
from .numerics import MonotoneTable, QuadSettings, tabulate_tail_integral

__all__ = [
    "Faults",
    "MappingKernel",
    "Composition",
    "CompositionChain",
    "GridSample",
    "build_mapping",
    "compose",
    "composed_solution",
    "iterate",
    "sample_grid",
    "chebyshev_points",
]

Evaluator = Callable[[np.ndarray], np.ndarray]

MAPPING_TOL = 1e-6
DEFAULT_KNOTS = 128
DEFAULT_MARGIN = 1e-3


@dataclass(frozen=True)
class Faults:
    """Deliberate corruptions used to demonstrate that verification bites.

    ``energy_offset`` is added to the subtracted seed energy in the composed
    potential, ``weight_exponent`` replaces 4 in the weight ``chi^-4`` (the
    potential keeps the true exponent), and ``alpha_scale`` multiplies the
    mapping constant of every kernel.
    """

    energy_offset: float = 0.0
    weight_exponent: float = 4.0
    alpha_scale: float = 1.0

    @property
    def active(self) -> bool:
        return self != Faults()


NO_FAULTS = Faults()


def _arr(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class MappingKernel:
    """``(chi_0, psi_0)`` built from a seed and a target interval."""

    source: Interval
    target: Interval
    alpha: float
    seed: NodelessSolution
    I: MonotoneTable = field(repr=False)

    def log_alpha_plus_I(self, x):
        logI = self.I.log_value(_arr(x))
        if self.alpha == 0:
            return logI
        return np.logaddexp(math.log(self.alpha), logI)

    def log_chi(self, x):
        x = _arr(x)
        return np.asarray(self.seed.log_abs(x), dtype=float) + self.log_alpha_plus_I(x)

    def chi(self, x):
        with np.errstate(over="ignore"):
            return np.exp(self.log_chi(x))

    def psi(self, x):
        with np.errstate(over="ignore"):
            return self.target.lo + np.exp(-self.log_alpha_plus_I(x))

    def gap(self, x):
        """``d - psi_0(x)`` without cancellation (``None`` when ``d = inf``).

        ``d - c - 1/(alpha + I) = I / (alpha (alpha + I))`` when ``d - c``
        equals ``1/alpha``.
        """
        if not self.target.hi_finite or self.alpha == 0:
            return None
        x = _arr(x)
        la = math.log(self.alpha)
        logI = self.I.log_value(x)
        offset = (self.target.hi - self.target.lo) - 1.0 / self.alpha
        with np.errstate(under="ignore"):
            return offset + np.exp(logI - la - np.logaddexp(la, logI))

    def psi_prime(self, x):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(-2.0 * self.log_chi(x))

    def chi_prime(self, x):
        """``phi_0' (alpha + I) - 1/phi_0``."""
        x = _arr(x)
        L = np.asarray(self.seed.log_abs(x), dtype=float)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            return np.exp(self.log_chi(x)) * self.seed.dlog(x) - np.exp(-L)

    def psi_via_ratio(self, x):
        """``c + phi_0/chi_0``, the second expression for ``psi_0`` (finite ``d``)."""
        x = _arr(x)
        with np.errstate(over="ignore", invalid="ignore"):
            return self.target.lo + self.seed.value(x) / self.chi(x)


def _endpoint_probes(interval: Interval, side: str, n: int = 30) -> np.ndarray:
    """Points marching geometrically towards one end of ``interval``."""
    ref = interval.reference_point()
    if side == "lo":
        if interval.lo_finite:
            d = (ref - interval.lo) * 10.0 ** -np.arange(1, 301, 10)
            x = interval.lo + d
            return x[(x > interval.lo) & (d > 1e3 * np.finfo(float).eps * abs(interval.lo))][:n]
        return ref - 2.0 ** np.arange(0, n)
    if interval.hi_finite:
        d = (interval.hi - ref) * 10.0 ** -np.arange(1, 301, 10)
        x = interval.hi - d
        return x[(x < interval.hi) & (d > 1e3 * np.finfo(float).eps * abs(interval.hi))][:n]
    return ref + 2.0 ** np.arange(0, n)


def _march(kernel: MappingKernel, side: str, done) -> tuple[np.ndarray, np.ndarray]:
    """Probe ``log(psi_0 - c)`` towards one source end until ``done`` holds.

    Probes that can no longer be integrated (the seed's logarithm exceeds
    what double precision resolves) end the march early.
    """
    xs, logs = [], []
    for x in _endpoint_probes(kernel.source, side):
        try:
            val = -float(kernel.log_alpha_plus_I(np.array([x]))[0])
        except QuadratureFailure:
            break
        xs.append(x)
        logs.append(val)
        if done(val):
            break
    return np.array(xs), np.array(logs)


def _check_kernel(kernel: MappingKernel, tol: float = MAPPING_TOL) -> list[str]:
    """Problems with the endpoint limits or monotonicity of ``psi_0``."""
    problems = []
    c, d = kernel.target.lo, kernel.target.hi
    scale = (d - c) if kernel.target.hi_finite else 1.0
    goal_lo = math.log(0.01 * tol * scale)
    lo_x, lo_logs = _march(kernel, "lo", lambda v: v < goal_lo)
    if not len(lo_logs) or not lo_logs[-1] <= math.log(tol * scale):
        last = c + math.exp(lo_logs[-1]) if len(lo_logs) else math.nan
        problems.append(f"psi_0 -> {last:.10g} at the lower end, expected c = {c:g}")
    if kernel.target.hi_finite:
        def close(v):
            return abs(c + math.exp(v) - d) <= 0.01 * tol * scale

        hi_x, hi_logs = _march(kernel, "hi", close)
        last = c + math.exp(hi_logs[-1]) if len(hi_logs) else math.nan
        if not abs(last - d) <= tol * scale:
            problems.append(f"psi_0 -> {last:.10g} at the upper end, expected d = {d:g}")
    else:
        # psi_0 - c = 1/I may overflow; judge growth on its logarithm
        goal = math.log(1e6)
        hi_x, hi_logs = _march(kernel, "hi", lambda v: v > goal)
        if not (len(hi_logs) and hi_logs[-1] > goal and np.all(np.diff(hi_logs) >= 0)):
            problems.append("psi_0 not unbounded towards the upper end")
    grid = kernel.source.from_comp(np.linspace(*kernel.source.comp_bounds, 258)[1:-1])
    try:
        p = kernel.psi(grid)
    except QuadratureFailure as exc:
        return problems + [f"psi_0 not computable on the interior grid: {exc}"]
    if np.any(np.diff(p) < 0) or not np.all(np.isfinite(p)):
        problems.append("psi_0 is not monotone increasing on the interior grid")
    return problems


def build_mapping(
    seed: NodelessSolution,
    target: Interval,
    settings: QuadSettings | None = None,
    *,
    n_knots: int = DEFAULT_KNOTS,
    alpha_scale: float = 1.0,
    check: bool = True,
) -> MappingKernel:
    """Tabulate ``I`` for ``seed`` and wire the kernel onto ``target``.

    Raises
    ------
    TargetLowerInfinite
        ``target.lo`` is ``-inf``; ``psi_0 = c + ...`` needs a finite ``c``.
    MappingCheckFailed
        ``psi_0`` does not reach ``c`` and ``d`` (within ``1e-6 (d - c)``) at
        the innermost probes, or is not monotone.
    """
    if not target.lo_finite:
        raise TargetLowerInfinite(
            f"target interval {target} has lo = -inf; a finite lower end c is required"
        )
    alpha = 1.0 / (target.hi - target.lo) if target.hi_finite else 0.0
    alpha *= alpha_scale
    table = tabulate_tail_integral(seed.log_abs, seed.owner.domain, n_knots, settings, seed.log_abs_gap)
    kernel = MappingKernel(source=seed.owner.domain, target=target, alpha=alpha, seed=seed, I=table)
    if check:
        problems = _check_kernel(kernel)
        if problems:
            raise MappingCheckFailed(f"mapping from {seed}: " + "; ".join(problems))
    return kernel


class _Staged:
    """Shared evaluation of a chain ``x -> psi_0 -> psi_1 -> ...``."""

    stages: tuple
    terminal_system: PotentialSpec
    faults: Faults

    @property
    def source(self) -> Interval:
        return self.stages[0][0].source

    @property
    def kernels(self) -> list[MappingKernel]:
        return [k for k, _ in self.stages]

    def _walk(self, x, with_gap=False):
        """Return ``(y_K, sum log chi_j(y_j), V_chain)`` (plus ``d_K - y_K``).

        The terminal system is evaluated through the exact gap to its upper
        end where that is more precise than ``y_K``.
        """
        y = _arr(x)
        log_chi_sum = np.zeros_like(y)
        V = np.zeros_like(y)
        gap = None
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            for j, (kernel, energy) in enumerate(self.stages):
                Vj = kernel.seed.owner.V(y) - energy
                V = Vj if j == 0 else V + np.exp(-4.0 * log_chi_sum) * Vj
                log_chi_sum = log_chi_sum + kernel.log_chi(y)
                if j == len(self.stages) - 1:
                    gap = kernel.gap(y)
                y = kernel.psi(y)
            V = V + np.exp(-4.0 * log_chi_sum) * self.terminal_system.V_split(y, gap)
        if with_gap:
            return y, log_chi_sum, V, gap
        return y, log_chi_sum, V

    def potential(self, x):
        return self._walk(x)[2]

    def mapped(self, x):
        """Composite map onto the terminal system's domain."""
        return self._walk(x)[0]

    def log_chi_total(self, x):
        return self._walk(x)[1]

    def log_weight(self, x):
        return -self.faults.weight_exponent * self.log_chi_total(x)

    def weight(self, x):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_weight(x))

    def transplant(self, fn: Evaluator) -> Evaluator:
        """``x -> (prod chi_j) * fn(composite map)``; linear in ``fn``."""

        def out(x):
            y, lc, _ = self._walk(x)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                return np.exp(lc) * np.asarray(fn(y), dtype=float)

        return out

    def eigen_energy(self, m: int) -> float:
        return self.terminal_system.eigen_energy(m)

    def solution(self, m: int) -> Evaluator:
        eigenfunction(self.terminal_system, m)  # validates and checks the energy
        split = self.terminal_system.eigen_split(m)

        def out(x):
            y, lc, _, gap = self._walk(x, with_gap=True)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                return np.exp(lc) * np.asarray(split(y, gap), dtype=float)

        return out

    def modes(self, count: int) -> list[int]:
        """The first ``count`` valid eigenstate indices of the terminal system."""
        base = self.terminal_system.index_base
        return [m for m in range(base, base + count) if self.terminal_system.has_index(m)]


@dataclass(frozen=True, eq=False)
class Composition(_Staged):
    """System 0 composed with System 1 through one mapping kernel."""

    kernel: MappingKernel
    system1: PotentialSpec
    E0_tilde: float
    faults: Faults = NO_FAULTS

    @property
    def stages(self):
        return ((self.kernel, self.E0_tilde),)

    @property
    def terminal_system(self):
        return self.system1

    def V_C(self, x):
        return self.potential(x)


@dataclass(frozen=True, eq=False)
class CompositionChain(_Staged):
    """Several compositions in sequence; ``stages[k] = (kernel_k, E_k)``."""

    stages: tuple
    terminal_system: PotentialSpec
    faults: Faults = NO_FAULTS

    def V_chain(self, x):
        return self.potential(x)

    @classmethod
    def from_composition(cls, comp: Composition) -> "CompositionChain":
        return cls(stages=comp.stages, terminal_system=comp.system1, faults=comp.faults)


def compose(
    seed: NodelessSolution,
    system1: PotentialSpec,
    settings: QuadSettings | None = None,
    *,
    n_knots: int = DEFAULT_KNOTS,
    faults: Faults = NO_FAULTS,
) -> Composition:
    """Compose the seed's system with ``system1``.

    With active ``faults`` the construction-time mapping check is skipped so
    that the corruption reaches the verification stage.
    """
    kernel = build_mapping(
        seed, system1.domain, settings, n_knots=n_knots,
        alpha_scale=faults.alpha_scale, check=not faults.active,
    )
    return Composition(
        kernel=kernel, system1=system1, E0_tilde=seed.energy + faults.energy_offset, faults=faults
    )


def composed_solution(comp, m: int):
    """``(phi_m^C, (E_m, weight))`` with ``H_C phi_m^C = E_m * weight * phi_m^C``."""
    if not comp.terminal_system.has_index(m):
        raise IndexOutOfRange(f"{comp.terminal_system} has no eigenstate {m}")
    return comp.solution(m), (comp.eigen_energy(m), comp.weight)


def iterate(
    comp,
    seed1: NodelessSolution,
    system2: PotentialSpec,
    settings: QuadSettings | None = None,
    *,
    n_knots: int = DEFAULT_KNOTS,
) -> CompositionChain:
    """Append a stage: map System 1 onto ``system2`` with a seed of System 1."""
    if seed1.owner != comp.terminal_system:
        raise SeedOwnerMismatch(
            f"seed belongs to {seed1.owner}, but the chain ends in {comp.terminal_system}"
        )
    faults = comp.faults
    kernel = build_mapping(
        seed1, system2.domain, settings, n_knots=n_knots,
        alpha_scale=faults.alpha_scale, check=not faults.active,
    )
    return CompositionChain(
        stages=tuple(comp.stages) + ((kernel, seed1.energy),),
        terminal_system=system2,
        faults=faults,
    )


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def chebyshev_points(interval: Interval, n: int, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """Chebyshev-Lobatto points on the margin-shrunk (compactified) interval."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < margin < 0.5:
        raise ValueError("margin must lie in (0, 0.5)")
    u_lo, u_hi = interval.comp_bounds
    span = u_hi - u_lo
    a, b = u_lo + margin * span, u_hi - margin * span
    u = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * np.arange(n) / (n - 1))
    u[0], u[-1] = a, b
    x = interval.from_comp(u)
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid too fine to be strictly increasing")
    return x


@dataclass(frozen=True)
class GridSample:
    xs: np.ndarray
    columns: dict
    margin: float

    @property
    def names(self) -> list[str]:
        return list(self.columns)


def sample_grid(comp, n: int, margin: float = DEFAULT_MARGIN, modes: Sequence[int] = ()) -> GridSample:
    """Evaluate potential, map, ``chi``, weight and requested modes on a grid.

    For a chain, ``psi0`` is the composite map onto the terminal domain and
    ``chi0`` the product of all stage factors.
    """
    xs = chebyshev_points(comp.source, n, margin)
    y, lc, V = comp._walk(xs)
    cols = {
        "V_C": V,
        "psi0": y,
        "chi0": np.exp(lc),
        "weight": comp.weight(xs),
    }
    for m in sorted(set(int(m) for m in modes)):
        cols[f"phi_C_{m}"] = composed_solution(comp, m)[0](xs)
    return GridSample(xs=xs, columns=cols, margin=margin)
