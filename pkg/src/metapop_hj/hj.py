"""Limit profile u of the scaled log-density and its local Taylor data.

u(z) = -|int_{z*}^{z} sqrt(-W(x)) dx| from each ESS point (maximum over the
points in the dimorphic case). The integrand has a |z - z*| kink at the ESS
point, so z* is always inserted as a breakpoint before the per-cell
adaptive Simpson rule runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import series
from .errors import DegenerateBoundary, DegenerateQuadratic, FitnessPositive
from .ess import DIMORPHIC, MONOMORPHIC, Ess, SourceSinkEss
from .model import ModelParams, PopState, effective_fitness

QUAD_TOL = 1e-12
FITNESS_TOL = 1e-8
_EPS = np.finfo(float).eps
MIN_WIDTH = 1e-10


@dataclass(frozen=True)
class UProfile:
    grid: np.ndarray
    u: np.ndarray
    ess_ref: Ess | None = None

    def to_rows(self):
        return [(float(z), float(v)) for z, v in zip(self.grid, self.u)]


@dataclass(frozen=True)
class UTaylor:
    """u(z) = -A/2 s^2 + B s^3 + C s^4 + O(s^5), s = z - z_star."""
    z_star: float
    A: float
    B: float
    C: float
    # -W(z) = a2 s^2 + a3 s^3 + a4 s^4 + ...
    a2: float
    a3: float
    a4: float

    def __call__(self, z):
        s = np.asarray(z) - self.z_star
        return -0.5 * self.A * s ** 2 + self.B * s ** 3 + self.C * s ** 4

    def to_record(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("z_star", "A", "B", "C", "a2", "a3", "a4")}


@dataclass(frozen=True)
class SourceSinkProfile:
    grid: np.ndarray
    u1: np.ndarray
    u2_upper: np.ndarray
    # (lo, hi) intervals where u2 is pinned to a parabola; None if absent
    near_minus_theta: tuple
    near_plus_theta: tuple | None
    u2_theta_negative: bool
    patch2_kind: str


def default_grid(p: ModelParams, n: int = 4001, pad: float = 3.0) -> np.ndarray:
    return np.linspace(-p.theta - pad, p.theta + pad, n)


def adaptive_simpson(f, a, b, tol: float = QUAD_TOL, max_depth: int = 60) -> np.ndarray:
    """Integrals of ``f`` over each [a[k], b[k]], refined independently per cell.

    ``f`` must accept a 1-D array. Cells are processed in vectorised batches;
    each split halves the local tolerance.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out = np.zeros(a.size)
    idx = np.arange(a.size)
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tols = np.full(a.size, tol)
    depth = 0
    while idx.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        # sqrt(-W) carries ~1e-8 roundoff noise where W vanishes; splitting
        # cells there never meets the tolerance, so cap by width and roundoff
        floor = 64.0 * _EPS * (np.abs(left) + np.abs(right))
        done = ((np.abs(delta) <= np.maximum(15.0 * tols, floor))
                | (b - a <= MIN_WIDTH * (1.0 + np.abs(m))) | (depth >= max_depth))
        np.add.at(out, idx[done], (left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        # children: left halves then right halves
        idx = np.concatenate([idx[keep], idx[keep]])
        a, m, b, fa, fm, fb, whole = (
            np.concatenate([a[keep], m[keep]]),
            np.concatenate([lm[keep], rm[keep]]),
            np.concatenate([m[keep], b[keep]]),
            np.concatenate([fa[keep], fm[keep]]),
            np.concatenate([flm[keep], frm[keep]]),
            np.concatenate([fm[keep], fb[keep]]),
            np.concatenate([left[keep], right[keep]]),
        )
        tols = np.concatenate([tols[keep], tols[keep]]) / 2.0
        depth += 1
    return out


def _speed(N: PopState, p: ModelParams):
    def f(x):
        return np.sqrt(np.maximum(-effective_fitness(x, N, p), 0.0))
    return f


def distance_from(z_star: float, grid, speed, tol: float = QUAD_TOL) -> np.ndarray:
    """|int_{z_star}^{z} speed(x) dx| at every grid point."""
    grid = np.asarray(grid, dtype=float)
    nodes = np.union1d(grid, [z_star])
    cells = adaptive_simpson(speed, nodes[:-1], nodes[1:], tol)
    k0 = int(np.searchsorted(nodes, z_star))
    acc = np.zeros(nodes.size)
    acc[k0 + 1:] = np.cumsum(cells[k0:])
    acc[:k0] = np.cumsum(cells[:k0][::-1])[::-1]
    return acc[np.searchsorted(nodes, grid)]


def _check_fitness(grid, N, p, support):
    W = effective_fitness(np.asarray(grid, dtype=float), N, p)
    bad = W > FITNESS_TOL
    if bad.any():
        z = np.asarray(grid)[bad][np.argmax(W[bad])]
        raise FitnessPositive(
            f"W = {W[bad].max():.3g} > 0 at z = {z:.6g} (support {support}); "
            "the profile formula needs W <= 0")


def u_monomorphic(grid, ess: Ess, p: ModelParams, tol: float = QUAD_TOL) -> UProfile:
    if ess.kind != MONOMORPHIC:
        raise ValueError("u_monomorphic needs a monomorphic ESS")
    grid = np.asarray(grid, dtype=float)
    _check_fitness(grid, ess.N_star, p, ess.support)
    u = -distance_from(ess.z_star, grid, _speed(ess.N_star, p), tol)
    return UProfile(grid, u, ess)


def u_dimorphic(grid, ess: Ess, p: ModelParams, tol: float = QUAD_TOL) -> UProfile:
    if ess.kind != DIMORPHIC:
        raise ValueError("u_dimorphic needs a dimorphic ESS")
    grid = np.asarray(grid, dtype=float)
    _check_fitness(grid, ess.N_star, p, ess.support)
    speed = _speed(ess.N_star, p)
    branches = [-distance_from(z, grid, speed, tol) for z in ess.support]
    return UProfile(grid, np.maximum(*branches), ess)


def u_profile(grid, ess: Ess, p: ModelParams, tol: float = QUAD_TOL) -> UProfile:
    if ess.kind == MONOMORPHIC:
        return u_monomorphic(grid, ess, p, tol)
    return u_dimorphic(grid, ess, p, tol)


def fitness_series(z_star: float, N: PopState, p: ModelParams, order: int = 4) -> np.ndarray:
    """Taylor coefficients of W(z_star + s; N) in s, exact up to ``order``."""
    zs1 = z_star + p.theta
    zs2 = z_star - p.theta
    a = [p.r1 - p.m1 - p.kappa1 * N[0] - p.g1 * zs1 ** 2, -2.0 * p.g1 * zs1, -p.g1]
    b = [p.r2 - p.m2 - p.kappa2 * N[1] - p.g2 * zs2 ** 2, -2.0 * p.g2 * zs2, -p.g2]
    a, b = series.trunc(a, order), series.trunc(b, order)
    if p.m1 * p.m2 == 0.0:
        # W = max(a, b): the branch active at z_star governs the local expansion
        if abs(a[0] - b[0]) <= 1e-12:
            raise DegenerateQuadratic("both fitness branches are active at z_star")
        return a if a[0] > b[0] else b
    d = a - b
    q = series.mul(d, d, order)
    q[0] += 4.0 * p.m1 * p.m2
    return 0.5 * (a + b + series.sqrt(q, order))


def u_taylor(z_star: float, N: PopState, p: ModelParams) -> UTaylor:
    w = fitness_series(z_star, N, p, 4)
    a2, a3, a4 = -w[2], -w[3], -w[4]
    if not a2 >= 1e-12:
        raise DegenerateQuadratic(f"-W has quadratic coefficient {a2:.3g} at z*={z_star:.6g}")
    A = math.sqrt(a2)
    B = -a3 / (6.0 * A)
    C = -0.25 * A * (a4 / (2.0 * a2) - a3 ** 2 / (8.0 * a2 ** 2))
    return UTaylor(z_star, A, B, C, a2, a3, a4)


def _component(mask: np.ndarray, k: int):
    """Index range of the run of True values in ``mask`` containing ``k``."""
    if not mask[k]:
        return None
    lo = k
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    hi = k
    while hi < mask.size - 1 and mask[hi + 1]:
        hi += 1
    return lo, hi


def source_sink_u(grid, sse: SourceSinkEss, p: ModelParams,
                  tol: float = QUAD_TOL, match_tol: float = 1e-10) -> SourceSinkProfile:
    """Habitat-1 profile (an exact parabola) and what is known about habitat 2.

    The habitat-2 profile lies between the habitat-1 parabola and the upper
    bound built from the two optima; where both coincide it is pinned. Near
    +theta it is pinned to the habitat-2 parabola when patch 2 is dimorphic.
    """
    if abs(sse.source_gap) <= 1e-10:
        raise DegenerateBoundary(
            "source condition holds with equality; u2(theta) is not determined")
    grid = np.asarray(grid, dtype=float)
    th = p.theta
    N = sse.patch1.N_star
    u1 = -0.5 * math.sqrt(p.g1) * (grid + th) ** 2
    speed = _speed(N, p)
    upper = np.maximum(-distance_from(-th, grid, speed, tol),
                       -distance_from(th, grid, speed, tol))
    k_minus = int(np.argmin(np.abs(grid + th)))
    pinned = np.abs(upper - u1) <= match_tol * (1.0 + np.abs(u1))
    rng = _component(pinned, k_minus)
    near_minus = None if rng is None else (float(grid[rng[0]]), float(grid[rng[1]]))
    near_plus = None
    dimorphic = sse.patch2.kind == DIMORPHIC
    if dimorphic:
        par2 = -0.5 * math.sqrt(p.g2) * (grid - th) ** 2
        pinned2 = np.abs(upper - par2) <= match_tol * (1.0 + np.abs(par2))
        rng2 = _component(pinned2, int(np.argmin(np.abs(grid - th))))
        near_plus = None if rng2 is None else (float(grid[rng2[0]]), float(grid[rng2[1]]))
    return SourceSinkProfile(grid, u1, upper, near_minus, near_plus,
                             u2_theta_negative=not dimorphic,
                             patch2_kind=sse.patch2.kind)
