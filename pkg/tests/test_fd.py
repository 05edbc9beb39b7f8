import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metapop_hj.errors import Extinction, NonConvergence, RegimeError
from metapop_hj.ess import solve_ess
from metapop_hj.fd import (SWEEP_COLUMNS, GridSolution, asymptotic_predictor,
                           conservation_defects, density_moments,
                           epsilon_sweep_compare, extract_numeric_moments,
                           gaussian_init, init_centers, steady_state_solve,
                           trapezoid, u_from_density)
from metapop_hj.hj import u_profile
from metapop_hj.model import ModelParams
from metapop_hj.moments import FD

from conftest import ASYM_MONO, ORACLES, SYM_DIM, SYM_MONO, cached_solve, oracle_params


@pytest.mark.parametrize("key", sorted(ORACLES["fd"]))
def test_matches_high_order_oracle(key):
    name, eps = key.split("@")
    ref = ORACLES["fd"][key]
    gs = cached_solve(oracle_params(name), float(eps))
    assert gs.N1 == pytest.approx(ref["N1"], rel=1e-6)
    assert gs.N2 == pytest.approx(ref["N2"], rel=1e-6)


def test_symmetric_solution():
    gs = cached_solve(SYM_MONO, 0.05)
    assert abs(gs.N1 - gs.N2) < 1e-8
    assert gs.z[np.argmax(gs.n1 + gs.n2)] == pytest.approx(0.0, abs=gs.h)
    assert np.abs(gs.n1 - gs.n2[::-1]).max() < 1e-8
    m = extract_numeric_moments(gs)
    assert m.mean[0] == pytest.approx(-m.mean[1], abs=1e-8)
    assert min(m.variance) > 0
    assert m.source == FD


@pytest.mark.parametrize("p", [SYM_MONO, ASYM_MONO, SYM_DIM])
def test_solution_invariants(p):
    gs = cached_solve(p, 0.05)
    assert (gs.n1 >= 0).all() and (gs.n2 >= 0).all()
    assert gs.residual < 1e-10
    assert gs.N1 == pytest.approx(trapezoid(gs.n1, gs.h), abs=1e-12)
    assert gs.N2 == pytest.approx(trapezoid(gs.n2, gs.h), abs=1e-12)
    assert max(abs(d) for d in conservation_defects(gs, p)) < 1e-8
    assert gs.N1 + gs.N2 <= 2 * max(p.r1, p.r2)


def test_grid_refinement():
    a = cached_solve(ASYM_MONO, 0.05)
    b = cached_solve(ASYM_MONO, 0.05, n_pts=6401)
    assert b.N1 == pytest.approx(a.N1, rel=1e-6)
    assert b.N2 == pytest.approx(a.N2, rel=1e-6)


def test_initialisations_agree():
    p = ASYM_MONO
    sols = [cached_solve(p, 0.05, init=c) for c in init_centers(p).values()]
    for s in sols[1:]:
        assert s.N1 == pytest.approx(sols[0].N1, rel=1e-6)
        assert s.N2 == pytest.approx(sols[0].N2, rel=1e-6)


def test_explicit_initial_pair():
    z = np.linspace(-4, 4, 801)
    n1, n2 = gaussian_init(z, 0.5, var=0.5, mass=0.3)
    gs = steady_state_solve(SYM_MONO, 0.1, L=4.0, n_pts=801, init=(n1, n2))
    assert gs.N1 == pytest.approx(gs.N2, rel=1e-6)
    assert n1.max() > 0  # caller's arrays are not consumed


def test_dimorphic_peaks_approach_optimum():
    zD = math.sqrt(0.9375)
    peaks = []
    for eps in (0.1, 0.05):
        gs = cached_solve(SYM_DIM, eps)
        right = gs.z > 0
        peaks.append(gs.z[right][np.argmax(gs.n1[right] + gs.n2[right])])
        left = gs.z < 0
        assert gs.z[left][np.argmax(gs.n1[left] + gs.n2[left])] == pytest.approx(-peaks[-1])
    assert abs(peaks[1] - zD) < abs(peaks[0] - zD)
    assert abs(peaks[1] - zD) < 0.02


def test_source_sink_habitat1_exact():
    p = oracle_params("ss_mono")
    gs = cached_solve(p, 0.05)
    N1_exact = (p.r1 - p.m1 - 0.05 * math.sqrt(p.g1)) / p.kappa1
    assert gs.N1 == pytest.approx(N1_exact, rel=1e-6)

    def u1_error(gs):
        u1, _ = u_from_density(gs)
        exact = (-0.5 * math.sqrt(p.g1) * (gs.z + p.theta) ** 2
                 + 0.05 * math.log(p.g1 ** 0.25 * N1_exact))
        near = np.abs(gs.z + p.theta) < 1.0
        return np.nanmax(np.abs(u1 - exact)[near])

    # second-order discretisation error of the discrete Laplacian
    coarse, fine = u1_error(gs), u1_error(cached_solve(p, 0.05, n_pts=6401))
    assert coarse < 5e-5
    assert coarse / fine == pytest.approx(4.0, rel=0.1)


# ------------------------------------------------------------- moments and u

@given(st.floats(-1.0, 1.0), st.floats(0.05, 0.5))
def test_manufactured_gaussian_moments(a, s):
    z = np.linspace(-5, 5, 4001)
    n = np.exp(-(z - a) ** 2 / (2 * s * s)) / math.sqrt(2 * math.pi * s * s)
    N, mean, var, skew = density_moments(z, n)
    assert N == pytest.approx(1.0, abs=1e-9)
    assert mean == pytest.approx(a, abs=1e-9)
    assert var == pytest.approx(s * s, rel=1e-7)
    assert abs(skew) < 1e-7


def test_u_from_density_masks_zeros():
    z = np.linspace(-1, 1, 5)
    n = np.array([0.0, 1e-310, 1.0, 2.0, 0.5])
    gs = GridSolution(z, n, n, 1.0, 1.0, 0.1, 0.0, 0)
    u1, u2 = u_from_density(gs)
    assert np.isnan(u1[:2]).all()
    assert u1[2] == pytest.approx(0.1 * math.log(math.sqrt(2 * math.pi * 0.1)))


def test_u_from_density_approaches_hj_profile():
    p = SYM_MONO
    e = solve_ess(p)
    maxima, dists = [], []
    for eps in (0.1, 0.05, 0.025):
        gs = cached_solve(p, eps)
        u1, _ = u_from_density(gs)
        maxima.append(np.nanmax(u1))
        window = np.abs(gs.z) <= p.theta + 1
        ref = u_profile(gs.z[window], e, p).u
        dists.append(np.nanmax(np.abs(u1[window] - ref)))
    assert maxima[0] < maxima[1] < maxima[2] < 0.05
    assert dists[0] > dists[1] > dists[2]


def test_sweep_table():
    rows = epsilon_sweep_compare(SYM_MONO, [0.1, 0.05, 0.025])
    assert all(len(r) == len(SWEEP_COLUMNS) for r in rows)
    by = {(r[0], r[1]): r for r in rows}
    for q in ("N1", "N2"):
        assert 2 <= by[(0.1, q)][5] <= 8
        assert 2 <= by[(0.05, q)][5] <= 8
        assert math.isnan(by[(0.025, q)][5])
    skew = []
    for eps in (0.1, 0.05, 0.025):
        # habitats are mirror images; each one is skewed toward its optimum
        s1, s2 = by[(eps, "skewness1")][2], by[(eps, "skewness2")][2]
        assert s1 == pytest.approx(-s2, abs=1e-8)
        assert by[(eps, "skewness1")][3] == pytest.approx(0.0, abs=1e-9)
        skew.append(abs(s1))
    assert skew[0] > skew[1] > skew[2]
    ratios = [by[(e, "variance1")][2] / by[(e, "variance1")][3] for e in (0.1, 0.05, 0.025)]
    assert ratios[0] < ratios[1] < ratios[2] < 1


def test_sweep_custom_predictor():
    pred = asymptotic_predictor(SYM_MONO)
    rows = epsilon_sweep_compare(SYM_MONO, [0.1], predict=pred)
    assert rows[0][3] == pred(0.1).N_eps[0]
    with pytest.raises(ValueError):
        epsilon_sweep_compare(SYM_MONO, [0.05, 0.1])


def test_source_sink_predictor():
    p = oracle_params("ss_mono")
    m = asymptotic_predictor(p)(0.05)
    assert m.N_eps[0] == pytest.approx((p.r1 - p.m1 - 0.05 * math.sqrt(p.g1)) / p.kappa1)
    assert m.mean[0] == pytest.approx(-p.theta)


# ------------------------------------------------------------- preconditions

def test_preconditions():
    with pytest.raises(ValueError):
        steady_state_solve(SYM_MONO, 0.0)
    with pytest.raises(ValueError):
        steady_state_solve(SYM_MONO, 0.1, L=SYM_MONO.theta + 1.0)
    with pytest.raises(ValueError):
        steady_state_solve(SYM_MONO, 0.1, n_pts=400)
    with pytest.raises(ValueError):
        steady_state_solve(SYM_MONO, 0.1, n_pts=801, init=(np.ones(3), np.ones(3)))
    with pytest.raises(RegimeError):
        steady_state_solve(ModelParams.symmetric(1.0, 1.0, 1.0, 0.0, 1.0), 0.1)


def test_non_convergence_reports_residual():
    with pytest.raises(NonConvergence) as info:
        steady_state_solve(SYM_MONO, 0.1, n_pts=801, max_steps=5)
    assert info.value.iterations == 5
    assert info.value.residual > 0


def test_extinction():
    p = SYM_MONO
    z = np.linspace(-p.theta - 3, p.theta + 3, 801)
    with pytest.raises(Extinction):
        steady_state_solve(p, 0.1, n_pts=801, init=(np.zeros_like(z), np.zeros_like(z)))
