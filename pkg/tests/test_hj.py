import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings

from metapop_hj.errors import DegenerateBoundary, DegenerateQuadratic, FitnessPositive
from metapop_hj.ess import DIMORPHIC, MONOMORPHIC, solve_ess, source_sink_ess
from metapop_hj.hj import (adaptive_simpson, default_grid, distance_from,
                           fitness_series, source_sink_u, u_dimorphic,
                           u_monomorphic, u_profile, u_taylor)
from metapop_hj.model import ModelParams, PopState, effective_fitness

from conftest import ASYM_MONO, ORACLES, SYM_DIM, SYM_MONO, oracle_params
from strategies import two_way_params


def _profile(p, n=4001):
    e = solve_ess(p)
    return e, u_profile(default_grid(p, n), e, p)


def test_adaptive_simpson_polynomial_and_kink():
    a = np.array([0.0, -1.0])
    b = np.array([2.0, 1.0])
    out = adaptive_simpson(lambda x: x ** 3, a, b)
    assert out == pytest.approx([4.0, 0.0], abs=1e-13)
    kink = adaptive_simpson(np.abs, np.array([-1.0]), np.array([0.7]), tol=1e-13)
    assert kink[0] == pytest.approx(0.5 + 0.245, abs=1e-12)


def test_distance_from_linear_speed():
    grid = np.linspace(-1, 1, 21)
    d = distance_from(0.3, grid, lambda x: np.ones_like(x))
    assert d == pytest.approx(np.abs(grid - 0.3), abs=1e-13)


def test_monomorphic_symmetric_even():
    e, prof = _profile(SYM_MONO)
    u = prof.u
    assert np.abs(u - u[::-1]).max() < 1e-10
    assert u.max() == 0.0
    assert prof.grid[np.argmax(u)] == pytest.approx(0.0, abs=1e-12)


def test_monomorphic_decreasing_away_from_optimum():
    e, prof = _profile(ASYM_MONO)
    right = prof.grid > e.z_star
    assert np.all(np.diff(prof.u[right]) < 0)
    assert np.all(np.diff(prof.u[~right]) > 0)
    assert u_monomorphic([e.z_star], e, ASYM_MONO).u[0] == 0.0


@pytest.mark.parametrize("p", [SYM_MONO, ASYM_MONO, SYM_DIM, oracle_params("asym_mono_b")])
def test_eikonal_residual(p):
    e, prof = _profile(p)
    z, u = prof.grid, prof.u
    h = z[1] - z[0]
    du = (u[2:] - u[:-2]) / (2 * h)
    W = effective_fitness(z[1:-1], e.N_star, p)
    keep = np.ones_like(du, dtype=bool)
    if e.kind == DIMORPHIC:
        # skip the crease where the two branches meet
        crease = z[1 + np.argmin(np.where(np.abs(z[1:-1]) < 1, u[1:-1], 0.0))]
        keep = np.abs(z[1:-1] - crease) > 3 * h
    assert np.abs(du ** 2 + W)[keep].max() < 1e-5


@pytest.mark.parametrize("p", [SYM_MONO, ASYM_MONO, SYM_DIM])
def test_zero_level_matches_support(p):
    e, prof = _profile(p)
    h = prof.grid[1] - prof.grid[0]
    # the optimum need not be a grid node; u is quadratic there
    assert -h * h <= prof.u.max() <= 0.0
    top = prof.grid[prof.u > -1e-2 * h * h]
    top = np.append(top, prof.grid[np.argmax(prof.u)])
    for z in top:
        assert min(abs(z - s) for s in e.support) <= h


def test_quadrature_refinement():
    e = solve_ess(ASYM_MONO)
    grid = default_grid(ASYM_MONO, 801)
    a = u_monomorphic(grid, e, ASYM_MONO, tol=1e-12).u
    b = u_monomorphic(grid, e, ASYM_MONO, tol=5e-13).u
    assert np.abs(a - b).max() < 1e-9


def test_lipschitz_bound():
    e, prof = _profile(ASYM_MONO, 801)
    z = prof.grid
    speed = np.sqrt(np.maximum(-effective_fitness(z, e.N_star, ASYM_MONO), 0.0))
    du = np.abs(np.diff(prof.u))
    bound = np.maximum(speed[1:], speed[:-1]) * np.diff(z)
    assert np.all(du <= bound * (1 + 1e-9))


def test_dimorphic_profile_symmetry_and_peaks():
    e, prof = _profile(SYM_DIM)
    zD = e.support[1]
    assert np.abs(prof.u - prof.u[::-1]).max() < 1e-10
    at = u_dimorphic(np.array([-zD, zD]), e, SYM_DIM).u
    assert at == pytest.approx([0.0, 0.0], abs=1e-15)
    inner = (prof.grid > -zD) & (prof.grid < zD)
    ui = prof.u[inner]
    # single interior local minimum
    d = np.sign(np.diff(ui))
    assert np.count_nonzero(np.diff(d) > 0) == 1


def test_kind_checks():
    with pytest.raises(ValueError):
        u_monomorphic(np.zeros(3), solve_ess(SYM_DIM), SYM_DIM)
    with pytest.raises(ValueError):
        u_dimorphic(np.zeros(3), solve_ess(SYM_MONO), SYM_MONO)


def test_fitness_positive_raises():
    e = solve_ess(SYM_MONO)
    bad = replace(e, N_star=PopState(0.5, 0.5))
    with pytest.raises(FitnessPositive):
        u_monomorphic(default_grid(SYM_MONO, 101), bad, SYM_MONO)


# ------------------------------------------------------------- Taylor data

def test_taylor_symmetric_example():
    e = solve_ess(SYM_MONO)
    t = u_taylor(e.z_star, e.N_star, SYM_MONO)
    assert t.a2 == pytest.approx(1 / 12, abs=1e-12)
    assert t.A == pytest.approx(1 / math.sqrt(12), abs=1e-12)
    assert abs(t.B) < 1e-10
    assert t.A > 0


@pytest.mark.parametrize("name", sorted(ORACLES["correctors"]))
def test_taylor_matches_oracle(name):
    p = oracle_params(name)
    ref = ORACLES["correctors"][name]
    e = solve_ess(p)
    t = u_taylor(e.z_star, e.N_star, p)
    assert t.A == pytest.approx(ref["A"], abs=1e-10)
    assert t.B == pytest.approx(ref["B"], abs=1e-10)
    assert t.C == pytest.approx(ref["C"], abs=1e-10)


@pytest.mark.parametrize("p", [SYM_MONO, ASYM_MONO, oracle_params("asym_mono_b")])
def test_taylor_matches_quadrature_fit(p):
    e = solve_ess(p)
    t = u_taylor(e.z_star, e.N_star, p)
    s = np.linspace(-0.05, 0.05, 401)
    u = u_monomorphic(e.z_star + s, e, p).u
    V = np.vander(s, 8, increasing=True)
    c = np.linalg.lstsq(V, u, rcond=None)[0]
    assert -2 * c[2] == pytest.approx(t.A, rel=1e-4)
    assert c[3] == pytest.approx(t.B, rel=1e-4, abs=1e-8)
    assert c[4] == pytest.approx(t.C, rel=1e-4)
    # the stored polynomial matches u to fifth order
    r = u - t(e.z_star + s)
    assert np.abs(r).max() < 5 * 0.05 ** 5


def test_fitness_series_value_and_slope():
    p = ASYM_MONO
    e = solve_ess(p)
    w = fitness_series(e.z_star, e.N_star, p)
    assert abs(w[0]) < 1e-10 and abs(w[1]) < 1e-8
    h = 1e-3
    W = lambda z: effective_fitness(z, e.N_star, p)
    second = (W(e.z_star + h) - 2 * W(e.z_star) + W(e.z_star - h)) / h ** 2
    assert 2 * w[2] == pytest.approx(second, rel=1e-5)


@given(two_way_params())
@settings(max_examples=20)
def test_taylor_positive_curvature(p):
    e = solve_ess(p)
    if e.kind == MONOMORPHIC and not e.boundary_case:
        assert u_taylor(e.z_star, e.N_star, p).A > 0


def test_flat_peak_raises():
    p = ModelParams.symmetric(1.5, 0.5, 1.0, 1.0, 1.0)
    e = solve_ess(p)
    with pytest.raises(DegenerateQuadratic):
        u_taylor(e.z_star, e.N_star, p)


# ------------------------------------------------------------- source-sink

def test_source_sink_dimorphic_profile():
    p = oracle_params("ss_dim")
    sse = source_sink_ess(p)
    grid = default_grid(p, 2001)
    prof = source_sink_u(grid, sse, p)
    assert prof.u1 == pytest.approx(-0.5 * math.sqrt(p.g1) * (grid + p.theta) ** 2)
    assert prof.u1.max() == pytest.approx(0.0, abs=1e-15)
    assert not prof.u2_theta_negative
    lo, hi = prof.near_minus_theta
    assert lo < -p.theta < hi
    lo2, hi2 = prof.near_plus_theta
    assert lo2 < p.theta < hi2
    k = np.argmin(np.abs(grid - p.theta))
    assert prof.u2_upper[k] == pytest.approx(0.0, abs=1e-12)
    assert np.all(prof.u2_upper >= prof.u1 - 1e-12)


def test_source_sink_monomorphic_profile():
    p = oracle_params("ss_mono")
    sse = source_sink_ess(p)
    prof = source_sink_u(default_grid(p, 1001), sse, p)
    assert prof.u2_theta_negative
    assert prof.near_plus_theta is None
    assert prof.near_minus_theta is not None


def test_source_sink_equality_raises():
    p = ModelParams(1.0, 0.25, 1.0, 1.0, 1.0, 1.0, 0.5, 0.0, 0.5)
    sse = source_sink_ess(p)
    assert sse.source_gap == 0.0
    with pytest.raises(DegenerateBoundary):
        source_sink_u(default_grid(p, 101), sse, p)
