"""Finite-eps steady states of the two-habitat system by parabolic relaxation.

Relaxes

    d_t n_i = eps^2 n_i'' + n_i (R_i(z, N_i) - m_i) + m_j n_j

on a uniform grid over [-L, L] with no-flux ends (ghost-point reflection).
Each step is IMEX: diffusion and the negative part of the local rate are
implicit (an M-matrix, so positivity is preserved), while the positive part
and the migration inflow are explicit with N_i frozen at the start of the
step. A fixed point of the step is a steady state regardless of dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from ._accel import HAVE_NUMBA, njit
from .correctors import corrector_set, source_sink_correctors, source_sink_taylor
from .errors import Extinction, NonConvergence, RegimeError
from .ess import solve_ess, source_sink_ess
from .hj import u_taylor
from .model import SOURCE_SINK, ModelParams, check_assumptions
from .moments import FD, MomentSummary, moment_summary

DEFAULT_TOL = 1e-10
DEFAULT_MAX_STEPS = 2_000_000
DEFAULT_N_PTS = 3201
DT_FACTOR = 0.1
EXTINCTION_MASS = 1e-12
DENSITY_FLOOR = 1e-300

CONVERGED, MAX_STEPS, EXTINCT = 0, 1, 2


@dataclass(frozen=True)
class GridSolution:
    z: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    N1: float
    N2: float
    eps: float
    residual: float
    iterations: int

    @property
    def h(self) -> float:
        return float(self.z[1] - self.z[0])

    def summary(self) -> dict:
        return {"eps": float(self.eps), "N1": float(self.N1), "N2": float(self.N2),
                "residual": float(self.residual), "iterations": int(self.iterations),
                "L": float(self.z[-1]), "n_pts": int(self.z.size)}


def trapezoid(y: np.ndarray, h: float) -> float:
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


def _params_vector(p: ModelParams) -> np.ndarray:
    return np.array([p.r1, p.r2, p.g1, p.g2, p.kappa1, p.kappa2, p.m1, p.m2, p.theta])


@njit(cache=True)
def _thomas(sub, diag, sup, rhs, out, cp, dp):
    n = diag.size
    cp[0] = sup[0] / diag[0]
    dp[0] = rhs[0] / diag[0]
    for k in range(1, n):
        den = diag[k] - sub[k] * cp[k - 1]
        cp[k] = sup[k] / den
        dp[k] = (rhs[k] - sub[k] * dp[k - 1]) / den
    out[n - 1] = dp[n - 1]
    for k in range(n - 2, -1, -1):
        out[k] = dp[k] - cp[k] * out[k + 1]


@njit(cache=True)
def _relax_numba(n1, n2, z, h, eps, par, dt_factor, tol, max_steps):
    r1, r2, g1, g2, k1, k2, m1, m2, th = (par[0], par[1], par[2], par[3], par[4],
                                          par[5], par[6], par[7], par[8])
    n = z.size
    base1 = np.empty(n)
    base2 = np.empty(n)
    for k in range(n):
        base1[k] = r1 - g1 * (z[k] + th) ** 2 - m1
        base2[k] = r2 - g2 * (z[k] - th) ** 2 - m2
    sub = np.empty(n)
    sup = np.empty(n)
    diag = np.empty(n)
    rhs = np.empty(n)
    new1 = np.empty(n)
    new2 = np.empty(n)
    cp = np.empty(n)
    dp = np.empty(n)
    c1 = np.empty(n)
    c2 = np.empty(n)
    d2h = eps * eps / (h * h)
    residual = np.inf
    it = 0
    status = 1
    while it < max_steps:
        N1 = h * (n1.sum() - 0.5 * (n1[0] + n1[n - 1]))
        N2 = h * (n2.sum() - 0.5 * (n2[0] + n2[n - 1]))
        if N1 + N2 < 1e-12:
            status = 2
            break
        rate = max(m1, m2, k1 * N1, k2 * N2)
        for k in range(n):
            c1[k] = base1[k] - k1 * N1
            c2[k] = base2[k] - k2 * N2
            if c1[k] > rate:
                rate = c1[k]
            if c2[k] > rate:
                rate = c2[k]
        dt = dt_factor / rate
        a = dt * d2h
        for hab in range(2):
            c = c1 if hab == 0 else c2
            cur = n1 if hab == 0 else n2
            other = n2 if hab == 0 else n1
            mig = m2 if hab == 0 else m1
            for k in range(n):
                ck = c[k]
                neg = ck if ck < 0.0 else 0.0
                pos = ck - neg
                diag[k] = 1.0 + 2.0 * a - dt * neg
                sub[k] = -a
                sup[k] = -a
                rhs[k] = cur[k] * (1.0 + dt * pos) + dt * mig * other[k]
            sup[0] = -2.0 * a
            sub[n - 1] = -2.0 * a
            _thomas(sub, diag, sup, rhs, new1 if hab == 0 else new2, cp, dp)
        residual = 0.0
        for k in range(n):
            if new1[k] < 0.0:
                new1[k] = 0.0
            if new2[k] < 0.0:
                new2[k] = 0.0
            d = abs(new1[k] - n1[k])
            if d > residual:
                residual = d
            d = abs(new2[k] - n2[k])
            if d > residual:
                residual = d
            n1[k] = new1[k]
            n2[k] = new2[k]
        residual /= dt
        it += 1
        if residual < tol:
            status = 0
            break
    return residual, it, status


def _relax_numpy(n1, n2, z, h, eps, par, dt_factor, tol, max_steps):
    r1, r2, g1, g2, k1, k2, m1, m2, th = par
    n = z.size
    base = (r1 - g1 * (z + th) ** 2 - m1, r2 - g2 * (z - th) ** 2 - m2)
    kap, mig = (k1, k2), (m2, m1)
    d2h = eps * eps / (h * h)
    ab = np.empty((3, n))
    dens = [n1, n2]
    residual = np.inf
    it = 0
    status = MAX_STEPS
    while it < max_steps:
        N = (trapezoid(n1, h), trapezoid(n2, h))
        if N[0] + N[1] < EXTINCTION_MASS:
            status = EXTINCT
            break
        c = [base[i] - kap[i] * N[i] for i in range(2)]
        rate = max(m1, m2, k1 * N[0], k2 * N[1], c[0].max(), c[1].max())
        dt = dt_factor / rate
        a = dt * d2h
        new = []
        for i in range(2):
            neg = np.minimum(c[i], 0.0)
            pos = c[i] - neg
            ab[0, :] = -a
            ab[0, 1] = -2.0 * a
            ab[1, :] = 1.0 + 2.0 * a - dt * neg
            ab[2, :] = -a
            ab[2, -2] = -2.0 * a
            rhs = dens[i] * (1.0 + dt * pos) + dt * mig[i] * dens[1 - i]
            new.append(np.maximum(solve_banded((1, 1), ab, rhs,
                                               overwrite_b=True, check_finite=False), 0.0))
        residual = max(np.abs(new[0] - n1).max(), np.abs(new[1] - n2).max()) / dt
        n1[:] = new[0]
        n2[:] = new[1]
        it += 1
        if residual < tol:
            status = CONVERGED
            break
    return residual, it, status


def gaussian_init(z: np.ndarray, center: float, var: float = 1.0, mass: float = 1.0):
    g = mass * np.exp(-(z - center) ** 2 / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return g, g.copy()


def init_centers(p: ModelParams) -> dict:
    """The three prescribed starting points: centred at 0 and at each optimum."""
    return {"center": 0.0, "minus_theta": -p.theta, "plus_theta": p.theta}


def steady_state_solve(p: ModelParams, eps: float, L: float | None = None,
                       n_pts: int = DEFAULT_N_PTS, init=None, tol: float = DEFAULT_TOL,
                       max_steps: int = DEFAULT_MAX_STEPS, dt_factor: float = DT_FACTOR,
                       use_numba: bool | None = None) -> GridSolution:
    """Relax to the steady state on [-L, L] (default L = theta + 3).

    ``init`` is a pair of density arrays on the grid, a scalar centre for a
    variance-1 Gaussian in both habitats, or None (centre 0).
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    report = check_assumptions(p)
    if not report.ok:
        raise RegimeError(report.message)
    if L is None:
        L = p.theta + 3.0
    if L < p.theta + 2.0:
        raise ValueError(f"half-width L={L:g} must be at least theta + 2 = {p.theta + 2:g}")
    if n_pts < 801:
        raise ValueError(f"n_pts={n_pts} must be at least 801")
    z = np.linspace(-L, L, n_pts)
    h = float(z[1] - z[0])
    if init is None or np.isscalar(init):
        n1, n2 = gaussian_init(z, 0.0 if init is None else float(init))
    else:
        n1 = np.array(init[0], dtype=float, copy=True)
        n2 = np.array(init[1], dtype=float, copy=True)
        if n1.shape != z.shape or n2.shape != z.shape:
            raise ValueError("initial densities must match the grid")
    if use_numba is None:
        use_numba = HAVE_NUMBA
    kernel = _relax_numba if use_numba else _relax_numpy
    residual, it, status = kernel(n1, n2, z, h, float(eps), _params_vector(p),
                                  float(dt_factor), float(tol), int(max_steps))
    if status == EXTINCT:
        raise Extinction(f"total mass fell below {EXTINCTION_MASS:g} after {it} steps")
    if status != CONVERGED:
        raise NonConvergence(f"relaxation did not converge in {it} steps",
                             residual=float(residual), iterations=int(it))
    return GridSolution(z, n1, n2, trapezoid(n1, h), trapezoid(n2, h), float(eps),
                        float(residual), int(it))


def density_moments(z: np.ndarray, n: np.ndarray) -> tuple:
    """(mass, mean, central variance, standardised third moment) by the trapezoid rule."""
    h = float(z[1] - z[0])
    N = trapezoid(n, h)
    mean = trapezoid(z * n, h) / N
    d = z - mean
    var = trapezoid(d * d * n, h) / N
    skew = trapezoid(d ** 3 * n, h) / N / var ** 1.5
    return N, mean, var, skew


def extract_numeric_moments(gs: GridSolution) -> MomentSummary:
    m = [density_moments(gs.z, n) for n in (gs.n1, gs.n2)]
    return MomentSummary(gs.eps, (m[0][0], m[1][0]), (m[0][1], m[1][1]),
                         (m[0][2], m[1][2]), (m[0][3], m[1][3]), source=FD)


def u_from_density(gs: GridSolution) -> tuple:
    """u_eps,i = eps log(sqrt(2 pi eps) n_i); NaN where n_i <= 1e-300."""
    out = []
    scale = math.sqrt(2.0 * math.pi * gs.eps)
    for n in (gs.n1, gs.n2):
        u = np.full(n.shape, np.nan)
        ok = n > DENSITY_FLOOR
        u[ok] = gs.eps * np.log(scale * n[ok])
        out.append(u)
    return tuple(out)


def conservation_defects(gs: GridSolution, p: ModelParams) -> tuple:
    """int n_i (R_i - m_i) + m_j N_j for each habitat; zero at a steady state."""
    h = gs.h
    z = gs.z
    R1 = p.r1 - p.g1 * (z + p.theta) ** 2 - p.kappa1 * gs.N1
    R2 = p.r2 - p.g2 * (z - p.theta) ** 2 - p.kappa2 * gs.N2
    d1 = trapezoid(gs.n1 * R1, h) + p.m2 * gs.N2 - p.m1 * gs.N1
    d2 = trapezoid(gs.n2 * R2, h) + p.m1 * gs.N1 - p.m2 * gs.N2
    return d1, d2


def asymptotic_predictor(p: ModelParams):
    """eps -> MomentSummary from the monomorphic ESS, its Taylor data and correctors."""
    if check_assumptions(p).regime == SOURCE_SINK:
        sse = source_sink_ess(p)
        cs = source_sink_correctors(sse, p)
        ut = source_sink_taylor(p)
        return lambda eps: moment_summary(sse.patch2, ut, cs, eps)
    ess = solve_ess(p)
    ut = u_taylor(ess.z_star, ess.N_star, p)
    cs = corrector_set(ess, ut, p)
    return lambda eps: moment_summary(ess, ut, cs, eps)


SWEEP_QUANTITIES = ("N", "mean", "variance", "skewness")
SWEEP_COLUMNS = ("eps", "quantity", "fd", "asymptotic", "error", "ratio")


def epsilon_sweep_compare(p: ModelParams, eps_list, predict=None, **solve_kwargs) -> list:
    """Rows (eps, quantity, fd, asymptotic, error, ratio).

    ``ratio`` is error(eps)/error(next eps in the list), NaN on the last entry.
    ``predict`` maps eps to an asymptotic MomentSummary (default: the
    corrector-based expansion).
    """
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be positive and strictly decreasing")
    if predict is None:
        predict = asymptotic_predictor(p)
    fd = [extract_numeric_moments(steady_state_solve(p, e, **solve_kwargs)) for e in eps_list]
    asym = [predict(e) for e in eps_list]
    attr = {"N": "N_eps", "mean": "mean", "variance": "variance", "skewness": "skewness"}
    rows = []
    for k, e in enumerate(eps_list):
        for q in SWEEP_QUANTITIES:
            for i in range(2):
                f = getattr(fd[k], attr[q])[i]
                a = getattr(asym[k], attr[q])[i]
                err = abs(f - a)
                if k + 1 < len(eps_list):
                    nxt = abs(getattr(fd[k + 1], attr[q])[i] - getattr(asym[k + 1], attr[q])[i])
                    ratio = err / nxt if nxt > 0 else math.inf
                else:
                    ratio = math.nan
                rows.append((e, f"{q}{i + 1}", f, a, err, ratio))
    return rows
