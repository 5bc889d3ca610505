import math

import numpy as np
import pytest
from scipy import integrate

from potcompose.catalog import (
    Interval,
    custom_nodeless,
    make_potential,
    virtual_state,
)
from potcompose.compose import (
    CompositionChain,
    build_mapping,
    chebyshev_points,
    compose,
    composed_solution,
    iterate,
    sample_grid,
)
from potcompose.errors import (
    IndexOutOfRange,
    MappingCheckFailed,
    SeedOwnerMismatch,
    TargetLowerInfinite,
)
from potcompose.numerics import QuadSettings, fd_first_derivative, fd_second_derivative

INF = math.inf


@pytest.fixture(scope="module")
def exp_seed():
    return virtual_state(make_potential("free_particle", kappa=1.0), 0)


@pytest.fixture(scope="module")
def well():
    return make_potential("infinite_well", width=1.0)


@pytest.fixture(scope="module")
def free_well(exp_seed, well):
    return compose(exp_seed, well)


@pytest.fixture(scope="module")
def ro_seed():
    return virtual_state(make_potential("radial_oscillator", g=1.0), 0)


def _psi_closed(x, alpha=1.0):
    return 1.0 / (alpha + np.exp(-2 * x) / 2)


def _chi_closed(x, alpha=1.0):
    return np.exp(x) * (alpha + np.exp(-2 * x) / 2)


# -- kernels ---------------------------------------------------------------

def test_free_particle_kernel_exact_values(exp_seed):
    k = build_mapping(exp_seed, Interval(0, 1))
    assert k.alpha == 1.0
    assert k.I(0.0) == pytest.approx(0.5, rel=1e-13)
    assert k.psi(0.0) == pytest.approx(2 / 3, rel=1e-13)
    assert k.chi(0.0) == pytest.approx(1.5, rel=1e-13)
    assert k.psi_prime(0.0) == pytest.approx(4 / 9, rel=1e-13)
    x = np.linspace(-8, 8, 100)
    assert np.allclose(k.psi(x), _psi_closed(x), rtol=1e-12, atol=0)
    assert np.allclose(k.chi(x), _chi_closed(x), rtol=1e-12, atol=0)


def test_half_line_target(exp_seed):
    k = build_mapping(exp_seed, Interval(0, INF))
    assert k.alpha == 0.0
    x = np.array([-3.0, 0.0, 2.0, 10.0])
    assert np.allclose(k.psi(x), 2 * np.exp(2 * x), rtol=1e-12)
    assert k.gap(x) is None
    assert k.psi(300.0) == INF or k.psi(300.0) > 1e200


def test_target_lower_infinite(exp_seed):
    with pytest.raises(TargetLowerInfinite):
        build_mapping(exp_seed, Interval(-INF, 5))


def test_gap_is_exact_near_upper_end(exp_seed):
    k = build_mapping(exp_seed, Interval(0, 1))
    x = np.array([5.0, 15.0, 30.0])
    # 1 - psi = (e^{-2x}/2) / (1 + e^{-2x}/2)
    e = np.exp(-2 * x) / 2
    assert np.allclose(k.gap(x), e / (1 + e), rtol=1e-12)


def test_mapping_rejects_bounded_tail():
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    _, s = custom_nodeless(one, zero, zero, 0.0, Interval(0, 1), check_boundaries=False)
    with pytest.raises(MappingCheckFailed, match="lower end"):
        build_mapping(s, Interval(0, 1))


# -- compositions ----------------------------------------------------------

def test_free_well_potential_is_one(free_well):
    x = np.linspace(-10, 10, 201)
    assert np.max(np.abs(free_well.V_C(x) - 1.0)) < 1e-12


def test_free_particle_onto_pt_with_trivial_potential(exp_seed):
    pt = make_potential("poschl_teller", g=1.0, h=1.0)
    comp = compose(exp_seed, pt)
    assert comp.kernel.alpha == pytest.approx(2 / math.pi, rel=1e-15)
    a = 2 / math.pi
    assert comp.kernel.psi(0.0) == pytest.approx(1 / (a + 0.5), rel=1e-13)
    assert comp.kernel.chi(0.0) == pytest.approx(a + 0.5, rel=1e-13)
    assert comp.V_C(0.0) == pytest.approx(1.0, rel=1e-13)


def test_free_particle_onto_pt_nontrivial(exp_seed):
    pt = make_potential("poschl_teller", g=2.0, h=3.0)
    comp = compose(exp_seed, pt)
    a = 2 / math.pi
    for x in (-1.0, 0.0, 0.7):
        chi = _chi_closed(x, a)
        y = _psi_closed(x, a)
        V1 = 2.0 / math.sin(y) ** 2 + 6.0 / math.cos(y) ** 2
        assert comp.V_C(x) == pytest.approx(1.0 + V1 / chi**4, rel=1e-11)


def test_radial_oscillator_seed_on_well(ro_seed, well):
    comp = compose(ro_seed, well)
    assert comp.E0_tilde == pytest.approx(-3.0, rel=1e-12)
    x = np.array([0.2, 1.0, 2.5, 5.0])
    assert np.allclose(comp.V_C(x), x**2 + 3, rtol=1e-12)


def test_composed_solution_closed_form(free_well):
    f, (E, w) = composed_solution(free_well, 1)
    assert f(0.0) == pytest.approx(1.5 * math.sin(2 * math.pi / 3), rel=1e-12)
    assert f(0.0) == pytest.approx(1.29904, abs=1e-5)
    assert E == pytest.approx(math.pi**2)
    assert w(0.0) == pytest.approx(1.5**-4, rel=1e-12)
    with pytest.raises(IndexOutOfRange):
        composed_solution(free_well, 0)


def test_transplant_is_linear(free_well):
    zero = free_well.transplant(lambda y: np.zeros_like(y))
    assert np.all(zero(np.linspace(-5, 5, 11)) == 0.0)


def test_sample_grid_shapes(free_well):
    g = sample_grid(free_well, 3, 0.25, [])
    assert g.xs.shape == (3,)
    assert g.names == ["V_C", "psi0", "chi0", "weight"]
    g = sample_grid(free_well, 101, 0.01, [1])
    x = g.xs
    expect = _chi_closed(x) * np.sin(math.pi * _psi_closed(x))
    assert np.allclose(g.columns["phi_C_1"], expect, rtol=1e-9, atol=1e-12)
    assert np.all(np.diff(x) > 0)


def test_sample_grid_half_line(ro_seed, well):
    comp = compose(ro_seed, well)
    g = sample_grid(comp, 50, 1e-3, [1])
    assert np.isfinite(g.xs[-1])
    assert g.xs[-1] == pytest.approx(np.arctanh(1 - 1e-3), rel=1e-12)
    assert all(np.all(np.isfinite(c)) for c in g.columns.values())


def test_chebyshev_points_contract():
    x = chebyshev_points(Interval(0, 1), 5, 0.1)
    assert x[0] == pytest.approx(0.1) and x[-1] == pytest.approx(0.9)
    with pytest.raises(ValueError):
        chebyshev_points(Interval(0, 1), 1)
    with pytest.raises(ValueError):
        chebyshev_points(Interval(0, 1), 5, 0.5)


# -- kernel invariants -----------------------------------------------------

KERNEL_CASES = [
    ("radial_oscillator", dict(g=1.0), "virtual", 0, "infinite_well", dict(width=1.0)),
    ("poschl_teller", dict(g=1.5, h=2.6), "virtual", 2, "infinite_well", dict(width=2.0)),
    ("hyperbolic_pt", dict(g=1.0, h=2.5), "overshoot", 2, "poschl_teller", dict(g=2.0, h=2.0)),
    ("eckart", dict(g=1.0, mu=9.0), "overshoot", 9, "infinite_well", dict(width=1.0)),
    ("rosen_morse", dict(h=2.0, mu=3.0), "overshoot", 3, "poschl_teller", dict(g=2.0, h=2.0)),
]


def _seed(fam, p, kind, v):
    from potcompose.catalog import overshoot_state

    spec = make_potential(fam, **p)
    return (virtual_state if kind == "virtual" else overshoot_state)(spec, v)


@pytest.fixture(scope="module", params=range(len(KERNEL_CASES)))
def kernel(request):
    fam, p, kind, v, fam1, p1 = KERNEL_CASES[request.param]
    return build_mapping(_seed(fam, p, kind, v), make_potential(fam1, **p1).domain)


def _interior(kernel, n, seed=0, margin=0.02):
    rng = np.random.default_rng(seed)
    u_lo, u_hi = kernel.source.comp_bounds
    span = u_hi - u_lo
    u = rng.uniform(u_lo + margin * span, u_hi - margin * span, n)
    return np.sort(kernel.source.from_comp(u))


def test_psi_two_expressions(kernel):
    x = _interior(kernel, 100)
    c = kernel.target.lo
    a = kernel.psi(x)
    b = kernel.psi_via_ratio(x)
    assert np.max(np.abs(a - b)) <= 1e-10 * (abs(c) + 1.0 / kernel.alpha)


def test_psi_monotone_and_slope(kernel):
    x = _interior(kernel, 200, seed=1)
    p = kernel.psi(x)
    assert np.all(np.diff(p) > 0)
    assert np.all(kernel.psi_prime(x) > 0)
    for xi in x[::10]:
        h = 1e-4 * min(1.0, xi - kernel.source.lo, kernel.source.hi - xi)
        fd = fd_first_derivative(kernel.psi, xi, h)
        assert fd == pytest.approx(kernel.psi_prime(xi), rel=1e-6)


def test_chi_solves_seed_equation(kernel):
    seed = kernel.seed
    V0 = seed.owner.V
    for xi in _interior(kernel, 30, seed=2, margin=0.1):
        dist = min(1.0, xi - kernel.source.lo, kernel.source.hi - xi)
        # rescale so chi stays O(1) across the stencil
        L0 = float(kernel.log_chi(xi))
        g = lambda t: np.exp(kernel.log_chi(t) - L0)
        d2 = fd_second_derivative(g, xi, 1e-2 * dist, levels=2)
        res = abs(-d2 + (V0(xi) - seed.energy))
        assert res / (abs(d2) + abs(V0(xi))) <= 1e-6


def test_chi_prime_matches_fd(kernel):
    for xi in _interior(kernel, 30, seed=3, margin=0.1):
        dist = min(1.0, xi - kernel.source.lo, kernel.source.hi - xi)
        L0 = float(kernel.log_chi(xi))
        g = lambda t: np.exp(kernel.log_chi(t) - L0)
        fd = fd_first_derivative(g, xi, 1e-3 * dist) * math.exp(L0)
        assert kernel.chi_prime(xi) == pytest.approx(fd, rel=1e-6)


# -- chains ----------------------------------------------------------------

def test_one_stage_chain_reproduces_composition(ro_seed):
    pt = make_potential("poschl_teller", g=2.0, h=2.0)
    comp = compose(ro_seed, pt)
    chain = CompositionChain.from_composition(comp)
    x = _interior(comp.kernel, 50)
    k = comp.kernel
    direct = ro_seed.owner.V(x) - ro_seed.energy + np.exp(-4 * k.log_chi(x)) * pt.V(k.psi(x))
    assert np.allclose(chain.V_chain(x), comp.V_C(x), rtol=1e-10, atol=0)
    assert np.allclose(comp.V_C(x), direct, rtol=1e-10, atol=0)


@pytest.fixture(scope="module")
def two_stage(exp_seed, well):
    pt = make_potential("poschl_teller", g=1.5, h=2.6)
    comp = compose(exp_seed, pt)
    seed1 = virtual_state(pt, 0)
    return comp, seed1, iterate(comp, seed1, well)


def test_chain_nested_closed_form(two_stage):
    comp, seed1, chain = two_stage
    a0 = 2 / math.pi
    tight = dict(epsabs=0, epsrel=1e-13, limit=500)
    for x in (0.0, -0.8, 1.3):
        y = _psi_closed(x, a0)
        # independent tail integral of the PT virtual seed
        I1, _ = integrate.quad(lambda t: math.exp(-2 * float(seed1.log_abs(t))), y, math.pi / 2, **tight)
        chi1 = math.exp(float(seed1.log_abs(y))) * (1.0 + I1)
        z = 1.0 / (1.0 + I1)
        expect = _chi_closed(x, a0) * chi1 * math.sin(math.pi * z)
        assert chain.solution(1)(x) == pytest.approx(expect, rel=1e-9)
        assert chain.mapped(x) == pytest.approx(z, rel=1e-11)
        V = (
            1.0
            + (seed1.owner.V(y) - seed1.energy) / _chi_closed(x, a0) ** 4
        )
        assert chain.V_chain(x) == pytest.approx(V, rel=1e-10)


def test_chain_stage_energies(two_stage):
    comp, seed1, chain = two_stage
    assert [e for _, e in chain.stages] == [comp.E0_tilde, seed1.energy]
    assert chain.terminal_system.family.value == "infinite_well"


def test_iterate_owner_mismatch(free_well, well):
    other = virtual_state(make_potential("poschl_teller", g=1.5, h=2.6), 0)
    with pytest.raises(SeedOwnerMismatch):
        iterate(free_well, other, well)


def test_iterate_propagates_mapping_failure(exp_seed, well):
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    spec1, bad_seed = custom_nodeless(one, zero, zero, 0.0, Interval(0, 1), check_boundaries=False)
    comp = compose(exp_seed, spec1)
    with pytest.raises(MappingCheckFailed):
        iterate(comp, bad_seed, well)


def test_tighter_quadrature_agrees(exp_seed, well, ro_seed):
    a = compose(ro_seed, well)
    b = compose(ro_seed, well, QuadSettings(rel_tol=1e-13))
    x = np.linspace(0.1, 4, 17)
    assert np.allclose(a.kernel.psi(x), b.kernel.psi(x), rtol=1e-10)
