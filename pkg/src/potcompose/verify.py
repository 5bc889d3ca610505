"""Independent numerical checks of a constructed composition.

Derivatives here are always finite differences of the evaluators, never the
closed-form chain-rule expressions used during construction, and norms are
recomputed on the System 1 side by plain quadrature.  A check never raises
on failure; it returns a :class:`CheckResult` with ``passed=False``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import check_boundary_conditions, eigenfunction, nodeless_scan, rayleigh_quotient
from .compose import DEFAULT_MARGIN, MAPPING_TOL, MappingKernel, _march, chebyshev_points
from .errors import PotComposeError
from .numerics import QuadSettings, adaptive_quad, fd_second_derivative

__all__ = [
    "CheckResult",
    "VerificationReport",
    "residual_check",
    "orthogonality_check",
    "mapping_check",
    "seed_checks",
    "full_report",
]

RESIDUAL_FLOOR = 1e-12
FD_STEP = 1e-2
# relative step ladder for the residual's second derivative
FD_LADDER = (1e-1, 3e-2, 1e-2, 3e-3)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    x: float | None = None
    detail: str = ""

    def row(self) -> str:
        return f"{self.name},{'pass' if self.passed else 'fail'},{self.worst:.6e},{self.tol:.1e}"


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    gram: dict = field(default_factory=dict, compare=False)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def text(self) -> str:
        lines = []
        for c in self.checks:
            where = "" if c.x is None else f" at x={c.x:.6g}"
            extra = f" ({c.detail})" if c.detail else ""
            lines.append(
                f"{'PASS' if c.passed else 'FAIL'} {c.name}: worst {c.worst:.3e} "
                f"vs tol {c.tol:.1e}{where}{extra}"
            )
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)

    def rows(self) -> str:
        return "\n".join(["name,pass,worst,tol"] + [c.row() for c in self.checks])


def _step(interval, xs, rel=FD_STEP):
    dist = np.minimum(xs - interval.lo, interval.hi - xs)
    return rel * np.minimum(1.0, dist)


def _second_derivative(fn, interval, xs):
    """Finite-difference ``fn''`` with a per-point step from ``FD_LADDER``.

    Large steps suffer truncation, small ones amplify rounding by ``1/h^2``;
    at every point the step whose estimate agrees best with the next
    smaller one is kept.
    """
    est = np.array([fd_second_derivative(fn, xs, _step(interval, xs, r), levels=2) for r in FD_LADDER])
    with np.errstate(invalid="ignore"):
        err = np.abs(np.diff(est, axis=0))
    err = np.where(np.isfinite(err), err, np.inf)
    pick = np.argmin(err, axis=0)
    return est[pick, np.arange(xs.size)]


def residual_check(comp, m: int, n_points: int = 64, margin: float = DEFAULT_MARGIN,
                   tol: float = 1e-6) -> CheckResult:
    """Relative residual of ``H_C phi = E_m w phi`` on a Chebyshev grid.

    ``R = -phi'' + V_C phi - E_m w phi`` with ``phi''`` by finite
    differences (two Richardson levels, step chosen per point), normalised by
    ``|phi''| + |V_C phi| + |E_m w phi| + 1e-12``.
    """
    name = f"residual[m={m}]"
    if n_points < 16:
        raise ValueError("n_points must be at least 16")
    try:
        fn = comp.solution(m)
        E = comp.eigen_energy(m)
        xs = chebyshev_points(comp.source, n_points, margin)
        with np.errstate(all="ignore"):
            d2 = _second_derivative(fn, comp.source, xs)
            phi = fn(xs)
            V = comp.potential(xs)
            w = comp.weight(xs)
            R = -d2 + V * phi - E * w * phi
            S = np.abs(d2) + np.abs(V * phi) + np.abs(E * w * phi) + RESIDUAL_FLOOR
            rel = np.abs(R) / S
    except PotComposeError as exc:
        return CheckResult(name, False, math.inf, tol, None, str(exc))
    rel = np.where(np.isfinite(rel), rel, np.inf)
    i = int(np.argmax(rel))
    return CheckResult(name, bool(rel[i] <= tol), float(rel[i]), tol, float(xs[i]))


def orthogonality_check(comp, max_m: int, tol: float = 1e-8, settings: QuadSettings | None = None,
                        diag_tol: float | None = None, modes: Sequence[int] | None = None):
    """Weighted Gram matrix of composed solutions against target-side norms.

    ``G[m][n] = int_a^b phi_m^C phi_n^C w dx``; passes when every
    off-diagonal satisfies ``|G_mn| <= tol sqrt(G_mm G_nn)`` and every
    diagonal matches ``int_c^d phi_m^2 dy`` to relative ``diag_tol``
    (default ``tol``).  Modes run over the valid indices ``<= max_m`` of the
    terminal system unless given explicitly.

    Returns ``(CheckResult, gram, norms, modes)``.
    """
    diag_tol = tol if diag_tol is None else diag_tol
    settings = settings or QuadSettings(rel_tol=1e-11, abs_tol=1e-15)
    sys1 = comp.terminal_system
    if modes is None:
        modes = [m for m in range(sys1.index_base, max_m + 1) if sys1.has_index(m)]
    modes = list(modes)
    name = "orthogonality"
    k = len(modes)
    gram = np.full((k, k), np.nan)
    norms = np.full(k, np.nan)
    if k == 0:
        return CheckResult(name, False, math.inf, tol, None, "no valid modes"), gram, norms, modes
    try:
        fns = [comp.solution(m) for m in modes]
        tgt = [eigenfunction(sys1, m)[0] for m in modes]

        def integrand(fi, fj):
            def g(x):
                with np.errstate(all="ignore"):
                    out = fi(x) * fj(x) * comp.weight(x)
                return np.where(np.isfinite(out), out, 0.0)
            return g

        lo, hi = comp.source.lo, comp.source.hi
        for i in range(k):
            gram[i, i] = adaptive_quad(integrand(fns[i], fns[i]), lo, hi, settings)[0]
            norms[i] = adaptive_quad(
                lambda y, f=tgt[i]: f(y) ** 2, sys1.domain.lo, sys1.domain.hi, settings
            )[0]
        for i in range(k):
            for j in range(i + 1, k):
                # off-diagonals vanish: resolve them to a fraction of the
                # tolerance relative to the diagonal scale
                floor = 1e-3 * tol * math.sqrt(abs(gram[i, i] * gram[j, j]))
                s = QuadSettings(settings.rel_tol, max(settings.abs_tol, floor), settings.max_depth)
                gram[i, j] = gram[j, i] = adaptive_quad(integrand(fns[i], fns[j]), lo, hi, s)[0]
    except PotComposeError as exc:
        return CheckResult(name, False, math.inf, tol, None, str(exc)), gram, norms, modes
    diag = np.diag(gram)
    scale = np.sqrt(np.abs(np.outer(diag, diag)))
    off = np.abs(gram - np.diag(diag)) / np.where(scale > 0, scale, np.inf)
    off_worst = float(np.max(off)) if k > 1 else 0.0
    diag_err = np.abs(diag - norms) / np.abs(norms)
    diag_worst = float(np.max(diag_err))
    passed = bool(np.all(diag > 0) and off_worst <= tol and diag_worst <= diag_tol)
    detail = f"max off-diagonal ratio {off_worst:.3e}, max diagonal error {diag_worst:.3e} (tol {diag_tol:.1e})"
    result = CheckResult(name, passed, max(off_worst, diag_worst), tol, None, detail)
    return result, gram, norms, modes


def mapping_check(kernel: MappingKernel, tol: float = MAPPING_TOL, name: str = "mapping") -> CheckResult:
    """``psi_0`` tends to ``c`` and ``d`` monotonically, and is increasing.

    The end limits are probed geometrically; 1000 random ordered pairs from
    the margin-shrunk interior (fixed seed) test monotonicity.
    """
    c, d = kernel.target.lo, kernel.target.hi
    scale = (d - c) if kernel.target.hi_finite else 1.0
    worst = 0.0
    where = None
    problems = []
    try:
        lo_x, lo_logs = _march(kernel, "lo", lambda v: v < math.log(0.01 * tol * scale))
        gap_lo = np.exp(lo_logs) if len(lo_logs) else np.array([math.inf])
        if np.any(np.diff(gap_lo) > 0):
            problems.append("psi_0 not monotone approaching the lower end")
        worst = max(worst, gap_lo[-1] / scale)
        where = float(lo_x[-1]) if len(lo_x) else None
        if not gap_lo[-1] <= tol * scale:
            problems.append(f"psi_0 - c = {gap_lo[-1]:.3e} at the innermost lower probe")
        if kernel.target.hi_finite:
            hi_x, hi_logs = _march(kernel, "hi", lambda v: abs(c + math.exp(v) - d) <= 0.01 * tol * scale)
            gap_hi = np.abs(d - (c + np.exp(hi_logs))) if len(hi_logs) else np.array([math.inf])
            if np.any(np.diff(gap_hi) > 0):
                problems.append("psi_0 not monotone approaching the upper end")
            if gap_hi[-1] / scale > worst:
                worst, where = gap_hi[-1] / scale, float(hi_x[-1]) if len(hi_x) else None
            if not gap_hi[-1] <= tol * scale:
                problems.append(f"d - psi_0 = {gap_hi[-1]:.3e} at the innermost upper probe")
        else:
            hi_x, hi_logs = _march(kernel, "hi", lambda v: v > math.log(1e6))
            if not (len(hi_logs) and hi_logs[-1] > math.log(1e6) and np.all(np.diff(hi_logs) >= 0)):
                problems.append("psi_0 not unbounded increasing towards the upper end")
        rng = np.random.default_rng(0)
        u_lo, u_hi = kernel.source.comp_bounds
        span = u_hi - u_lo
        u = np.sort(rng.uniform(u_lo + DEFAULT_MARGIN * span, u_hi - DEFAULT_MARGIN * span, (1000, 2)), axis=1)
        u = u[u[:, 1] > u[:, 0]]
        x1, x2 = kernel.source.from_comp(u[:, 0]), kernel.source.from_comp(u[:, 1])
        keep = x2 > x1
        bad = int(np.sum(~(kernel.psi(x2[keep]) > kernel.psi(x1[keep]))))
        if bad:
            problems.append(f"{bad} of {int(keep.sum())} random pairs violate monotonicity")
    except PotComposeError as exc:
        problems.append(str(exc))
        worst = math.inf
    return CheckResult(name, not problems, float(worst), tol, where, "; ".join(problems))


def seed_checks(seed, energy_used: float, label: str = "seed", rayleigh_tol: float = 1e-7) -> list[CheckResult]:
    """Boundary conditions, nodelessness and Rayleigh constancy of a seed.

    The Rayleigh quotient must be constant and equal to the energy actually
    subtracted in the composed potential.
    """
    out = []
    dom = seed.owner.domain
    try:
        rep = check_boundary_conditions(seed)
        ok = rep.A_holds and rep.B_holds
        detail = f"A={rep.A_holds} ({rep.diagnostics['A_method']}), B={rep.B_holds} ({rep.diagnostics['B_method']})"
    except PotComposeError as exc:
        ok, detail = False, str(exc)
    out.append(CheckResult(f"{label}.boundary", ok, 0.0 if ok else 1.0, 0.0, None, detail))
    ok = nodeless_scan(seed.scan_fn, dom, 1024)
    out.append(CheckResult(f"{label}.nodeless", ok, 0.0 if ok else 1.0, 0.0))
    try:
        q = rayleigh_quotient(seed)
        dev = np.abs(q - energy_used) / max(1.0, abs(energy_used))
        i = int(np.argmax(dev))
        out.append(CheckResult(f"{label}.rayleigh", bool(dev[i] <= rayleigh_tol), float(dev[i]),
                               rayleigh_tol, None, f"quotient {q[i]:.12g} vs energy {energy_used:.12g}"))
    except PotComposeError as exc:
        out.append(CheckResult(f"{label}.rayleigh", False, math.inf, rayleigh_tol, None, str(exc)))
    return out


def full_report(comp, modes: Sequence[int] | None = None, *, n_points: int = 64,
                margin: float = DEFAULT_MARGIN, residual_tol: float = 1e-6,
                orth_tol: float = 1e-8, orth_diag_tol: float | None = None,
                mapping_tol: float = MAPPING_TOL, settings: QuadSettings | None = None,
                orthogonality: bool = True) -> VerificationReport:
    """Run every check on a composition or chain; checks sorted by name."""
    sys1 = comp.terminal_system
    if modes is None:
        modes = comp.modes(min(5, int(min(sys1.n_bound, 5))))
    modes = sorted(modes)
    checks = [residual_check(comp, m, n_points, margin, residual_tol) for m in modes]
    gram = {}
    if orthogonality and modes:
        res, G, norms, used = orthogonality_check(
            comp, max(modes), orth_tol, settings, diag_tol=orth_diag_tol, modes=modes
        )
        checks.append(res)
        gram = {"modes": used, "gram": G, "norms": norms}
    for k, (kernel, energy) in enumerate(comp.stages):
        checks.append(mapping_check(kernel, mapping_tol, name=f"mapping[stage{k}]"))
        checks.extend(seed_checks(kernel.seed, energy, label=f"seed[stage{k}]"))
    checks.sort(key=lambda c: c.name)
    return VerificationReport(tuple(checks), gram)
