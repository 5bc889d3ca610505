import math

import numpy as np
import pytest
from scipy import integrate

from potcompose.catalog import (
    Interval,
    custom_nodeless,
    eigenfunction,
    make_potential,
    overshoot_state,
    virtual_state,
)
from potcompose.compose import Faults, build_mapping, compose, iterate
from potcompose.verify import (
    full_report,
    mapping_check,
    orthogonality_check,
    residual_check,
    seed_checks,
)


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
def ro_comp(well):
    return compose(virtual_state(make_potential("radial_oscillator", g=1.0), 0), well)


# --- residual ---------------------------------------------------------------

def test_residual_free_well_closed_form(free_well):
    r = residual_check(free_well, 1, tol=1e-7)
    assert r.passed and r.worst < 1e-7


def test_residual_detects_energy_corruption(exp_seed, well):
    bad = compose(exp_seed, well, faults=Faults(energy_offset=0.1))
    assert not residual_check(bad, 1).passed


def test_residual_radial_oscillator_modes(ro_comp):
    for m in ro_comp.modes(5):
        r = residual_check(ro_comp, m, tol=1e-6)
        assert r.passed, r


def test_residual_rejects_small_grids(free_well):
    with pytest.raises(ValueError):
        residual_check(free_well, 1, n_points=8)


def test_residual_invalid_mode_is_a_failed_entry(free_well):
    r = residual_check(free_well, 0)
    assert not r.passed and r.worst == math.inf


# --- orthogonality ----------------------------------------------------------

def test_orthogonality_free_well(free_well):
    res, G, norms, modes = orthogonality_check(free_well, 4, tol=1e-8)
    assert modes == [1, 2, 3, 4]
    assert res.passed, res
    assert np.allclose(np.diag(G), 0.5, rtol=1e-8, atol=0)
    assert np.allclose(norms, 0.5, rtol=1e-10, atol=0)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-8 * 0.5
    assert np.all(np.diag(G) > 0)


def test_orthogonality_pt_target_jacobi_norm_oracle(exp_seed):
    pt = make_potential("poschl_teller", g=2.0, h=2.0)
    comp = compose(exp_seed, pt)
    res, G, norms, modes = orthogonality_check(comp, 3, tol=1e-8, diag_tol=1e-7)
    assert modes == [0, 1, 2, 3]
    assert res.passed, res
    for i, m in enumerate(modes):
        f = eigenfunction(pt, m)[0]
        oracle, _ = integrate.quad(lambda y: float(f(y)) ** 2, 0.0, math.pi / 2,
                                   epsabs=0, epsrel=1e-12, limit=200)
        assert G[i, i] == pytest.approx(oracle, rel=1e-7)


def test_change_of_variables_identity(ro_comp):
    # weighted source-side integrals equal plain target-side integrals
    res, G, norms, modes = orthogonality_check(ro_comp, 4, tol=1e-8)
    tgt = [eigenfunction(ro_comp.system1, m)[0] for m in modes]
    scale = np.sqrt(np.outer(np.diag(G), np.diag(G)))
    for i in range(len(modes)):
        for j in range(i, len(modes)):
            plain, _ = integrate.quad(lambda y: float(tgt[i](y) * tgt[j](y)), 0.0, 1.0,
                                      epsabs=1e-14, epsrel=1e-12, limit=200)
            assert abs(G[i, j] - plain) <= 1e-7 * scale[i, j]


# --- mapping ----------------------------------------------------------------

def test_mapping_free_kernel(free_well):
    k = free_well.kernel
    r = mapping_check(k)
    assert r.passed, r
    assert k.psi(-20.0) < 1e-8
    assert 1.0 - k.psi(20.0) < 1e-8


def test_mapping_fails_for_constant_seed_at_lower_end(well):
    _, const = custom_nodeless(
        lambda x: np.ones_like(x), lambda x: np.zeros_like(x), lambda x: np.zeros_like(x),
        0.0, Interval(0.0, 1.0), check_boundaries=False, name="constant",
    )
    k = build_mapping(const, well.domain, check=False)
    r = mapping_check(k)
    assert not r.passed
    assert "lower" in r.detail


def test_mapping_half_line_target(exp_seed):
    k = build_mapping(exp_seed, Interval(0.0, math.inf))
    r = mapping_check(k)
    assert r.passed, r


# --- seed checks and full report --------------------------------------------

def test_seed_checks_pass_and_flag_energy(exp_seed):
    assert all(c.passed for c in seed_checks(exp_seed, exp_seed.energy))
    bad = {c.name: c.passed for c in seed_checks(exp_seed, exp_seed.energy + 0.1)}
    assert not bad["seed.rayleigh"]


def test_full_report_free_well(free_well):
    rep = full_report(free_well)
    assert rep.overall, rep.text()
    names = [c.name for c in rep.checks]
    assert names == sorted(names)
    assert "orthogonality" in names and "mapping[stage0]" in names
    assert rep.text().splitlines()[-1] == "overall: PASS"
    assert rep.rows().splitlines()[0] == "name,pass,worst,tol"
    assert len(rep.rows().splitlines()) == len(rep.checks) + 1


def test_full_report_lists_failing_checks(exp_seed, well):
    rep = full_report(compose(exp_seed, well, faults=Faults(energy_offset=0.1)))
    assert not rep.overall
    assert any(n.startswith("residual") for n in rep.failing)
    assert "overall: FAIL" in rep.text()


def test_full_report_two_stage_chain(exp_seed, well):
    pt = make_potential("poschl_teller", g=1.5, h=2.6)
    chain = iterate(compose(exp_seed, pt), virtual_state(pt, 0), well)
    rep = full_report(chain, modes=[1, 2, 3], residual_tol=1e-5)
    names = [c.name for c in rep.checks]
    assert "mapping[stage0]" in names and "mapping[stage1]" in names
    assert "seed[stage1].rayleigh" in names
    assert rep.overall, rep.text()


def test_report_is_deterministic(free_well):
    a = full_report(free_well, orthogonality=False)
    b = full_report(free_well, orthogonality=False)
    assert a.rows() == b.rows()


@pytest.mark.parametrize("fault", [
    Faults(energy_offset=0.1),
    Faults(weight_exponent=3.9),
    Faults(alpha_scale=1.01),
], ids=["energy", "weight", "alpha"])
def test_fault_injection_flips_a_check(exp_seed, well, fault):
    rep = full_report(compose(exp_seed, well, faults=fault))
    assert not rep.overall


# --- property: seed matrix x {well, PT(2,2)} --------------------------------

SEED_MATRIX = [
    ("free_particle", dict(kappa=1.0), "virtual", 0),
    ("radial_oscillator", dict(g=1.0), "virtual", 0),
    ("radial_oscillator", dict(g=2.3), "virtual", 2),
    ("poschl_teller", dict(g=1.5, h=2.6), "virtual", 2),
    ("hyperbolic_pt", dict(g=1.0, h=2.5), "virtual", 0),
    ("hyperbolic_pt", dict(g=1.0, h=2.5), "overshoot", 2),
    ("rosen_morse", dict(h=2.0, mu=3.0), "overshoot", 3),
    ("eckart", dict(g=1.0, mu=9.0), "overshoot", 9),
]
TARGETS = [("infinite_well", dict(width=1.0)), ("poschl_teller", dict(g=2.0, h=2.0))]


@pytest.mark.parametrize("target", TARGETS, ids=lambda t: t[0])
@pytest.mark.parametrize("case", SEED_MATRIX, ids=lambda c: f"{c[0]}-{c[2]}{c[3]}")
def test_full_report_seed_matrix(case, target):
    fam, p, kind, v = case
    spec = make_potential(fam, **p)
    seed = (virtual_state if kind == "virtual" else overshoot_state)(spec, v)
    rep = full_report(compose(seed, make_potential(target[0], **target[1])),
                      n_points=64, residual_tol=1e-6, orth_tol=1e-8)
    assert rep.overall, rep.text()
