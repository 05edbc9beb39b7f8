"""Next-order data of the WKB expansion u_eps,i = u + eps v_i + eps^2 w_i.

Around a monomorphic ESS z* we write, with s = z - z*,

    v_i = v_i(z*) + D_i s + E_i s^2 + ...,   w_i = F_i + G_i s + ...,
    N_eps,i = N_i* + eps K_i + O(eps^2).

The gap v_2 - v_1 is explicit; every other coefficient follows from matching
powers of s in the eps-order equations. All matching is done by hand into
the scalar relations below; ``chain_residuals`` re-checks them with truncated
series arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import series
from .errors import DegenerateBoundary, LogDomain, SingularChain
from .ess import MONOMORPHIC, Ess, SourceSinkEss
from .hj import UTaylor, fitness_series
from .model import TWO_WAY, SOURCE_SINK, ModelParams, effective_fitness, growth_rate

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class CorrectorSet:
    v_offset: tuple
    D: tuple
    E: tuple
    F: tuple
    K: tuple
    lambda1: float
    lambda2: float
    lambda3: float
    # only the difference G_2 - G_1 is determined
    G_gap: float
    z_star: float
    regime: str = TWO_WAY
    notes: tuple = field(default=())

    def K_from_components(self, ut: UTaylor, N) -> tuple:
        A, B, C = ut.A, ut.B, ut.C
        return tuple(
            N[i] * (7.5 * B ** 2 / A ** 3 + 3.0 * (C + B * self.D[i]) / A ** 2
                    + (self.E[i] + 0.5 * self.D[i] ** 2) / A + self.F[i])
            for i in range(2))

    def to_record(self) -> dict:
        rec = {"regime": self.regime, "z_star": float(self.z_star)}
        for name in ("v_offset", "D", "E", "F", "K"):
            vals = getattr(self, name)
            rec[f"{name}1"] = float(vals[0])
            rec[f"{name}2"] = float(vals[1])
        for name in ("lambda1", "lambda2", "lambda3", "G_gap"):
            rec[name] = float(getattr(self, name))
        if self.notes:
            rec["notes"] = list(self.notes)
        return rec


def _require_mono(ess: Ess):
    if ess.kind != MONOMORPHIC:
        raise SingularChain(
            "correctors are only available for a monomorphic ESS; "
            "the dimorphic chain is not implemented")


def v_gap_profile(z, ess: Ess, p: ModelParams):
    """v_2(z) - v_1(z) = log((W - R_1 + m_1)/m_2) at the ESS population sizes."""
    _require_mono(ess)
    N = ess.N_star
    arg = (effective_fitness(z, N, p) - growth_rate(z, N[0], 1, p) + p.m1) / p.m2
    arg = np.asarray(arg, dtype=float)
    if np.any(arg <= 0):
        raise LogDomain("v-gap logarithm argument is not positive at the requested points")
    out = np.log(arg)
    return float(out) if out.ndim == 0 else out


def gap_series(z_star: float, N, p: ModelParams, order: int = 2) -> np.ndarray:
    """Taylor coefficients of v_2 - v_1 at z_star."""
    w = fitness_series(z_star, N, p, order)
    r1 = series.trunc([growth_rate(z_star, N[0], 1, p), -2.0 * p.g1 * (z_star + p.theta), -p.g1],
                      order)
    x = (w - r1) / p.m2
    x[0] += p.m1 / p.m2
    if not x[0] > 0:
        raise LogDomain("v-gap logarithm argument is not positive at z*")
    return series.log(x, order)


def corrector_set(ess: Ess, ut: UTaylor, p: ModelParams) -> CorrectorSet:
    _require_mono(ess)
    if p.m1 * p.m2 == 0:
        raise SingularChain("two-way corrector chain needs m1 m2 > 0")
    A, B, C = ut.A, ut.B, ut.C
    z = ess.z_star
    N1, N2 = ess.N_star
    k1, k2 = p.kappa1, p.kappa2

    rho = N1 / (p.m2 * N2)
    lam1 = 2.0 * p.g1 * rho * (z + p.theta)
    lam2 = rho * (p.g1 - A * A) - 0.5 * lam1 ** 2
    lam3 = 3.0 * B * lam1 / A ** 2 + lam2 / A

    # weight of the habitat-2 inflow in the habitat-1 equation, and its s-expansion
    S0 = p.m2 * N2 / N1 + p.m1 * N1 / N2
    p0 = p.m2 * (N2 / N1) / S0
    q = 2.0 * p0 * (1.0 - p0)
    p1 = q * lam1
    p2 = q * lam2 + q * (1.0 - 2.0 * p0) * lam1 ** 2

    # (K1, K2) = k_const + k_slope * Sigma, Sigma = D1 + D2, from
    #   -(1-p0) k1 K1 - p0 k2 K2 = A
    #   K2/N2 - K1/N1 - (k1 K1 - k2 K2)/S0 = lam3 + 0.5 lam1 Sigma / A
    M = np.array([[-(1.0 - p0) * k1, -p0 * k2],
                  [-1.0 / N1 - k1 / S0, 1.0 / N2 + k2 / S0]])
    k_const = np.linalg.solve(M, [A, lam3])
    k_slope = np.linalg.solve(M, [0.0, 0.5 * lam1 / A])
    dk = np.array([k1, -k2])
    dk_const, dk_slope = dk @ k_const, dk @ k_slope

    # s-terms: -6B = -2A (D1 + p0 lam1) + p1 dkappa, D1 = (Sigma - lam1)/2
    coef = -A + p1 * dk_slope
    if abs(coef) < SINGULAR_TOL:
        raise SingularChain(f"linear equation for D1 + D2 is degenerate (coefficient {coef:.3g})")
    rhs = -6.0 * B - A * lam1 + 2.0 * A * p0 * lam1 - p1 * dk_const
    sigma = rhs / coef
    K1, K2 = k_const + k_slope * sigma
    dkappa = k1 * K1 - k2 * K2
    D1 = 0.5 * (sigma - lam1)
    D2 = D1 + lam1

    # s^2-terms of the habitat-1 equation after eliminating w_2 - w_1
    E1 = (12.0 * C - 4.0 * A * p0 * lam2 - 2.0 * A * p1 * lam1
          + 6.0 * B * (D1 + p0 * lam1) + p2 * dkappa) / (4.0 * A)
    E2 = E1 + lam2

    base = 7.5 * B ** 2 / A ** 3
    F1 = K1 / N1 - base - 3.0 * (C + B * D1) / A ** 2 - (E1 + 0.5 * D1 ** 2) / A
    F2 = K2 / N2 - base - 3.0 * (C + B * D2) / A ** 2 - (E2 + 0.5 * D2 ** 2) / A

    S1 = lam1 * (p.m2 * N2 / N1 - p.m1 * N1 / N2)
    G_gap = -2.0 * A * lam1 / S0 - S1 * dkappa / S0 ** 2

    v_off = (math.log(N1 * math.sqrt(A)), math.log(N2 * math.sqrt(A)))
    return CorrectorSet(v_off, (D1, D2), (E1, E2), (F1, F2), (float(K1), float(K2)),
                        lam1, lam2, lam3, G_gap, z)


def chain_residuals(cs: CorrectorSet, ess: Ess, ut: UTaylor, p: ModelParams) -> dict:
    """Residuals of the defining eps-order relations, rebuilt with series arithmetic.

    Keys: ``eq{i}_s{k}`` is the s^k coefficient of the habitat-i equation with
    w_j - w_i eliminated; ``gap_s{k}`` compares the w-gap formula with
    (F_2 - F_1, G_2 - G_1); ``raw{i}_s{k}`` uses that gap directly (k <= 1);
    ``lambda{k}`` compares the stored gap coefficients with the log formula;
    ``K{i}`` rebuilds K_i from its components.
    """
    order = 2
    A, B, C = ut.A, ut.B, ut.C
    N1, N2 = ess.N_star
    lam = gap_series(ess.z_star, ess.N_star, p, order)
    du = np.array([0.0, -A, 3.0 * B])
    mddu = np.array([A, -6.0 * B, -12.0 * C])
    dv = [np.array([cs.D[i], 2.0 * cs.E[i], 0.0]) for i in range(2)]
    dlam = series.trunc(series.deriv(lam), order)
    dkappa = p.kappa1 * cs.K[0] - p.kappa2 * cs.K[1]
    e_pos = series.exp(lam, order)
    e_neg = series.exp(-lam, order)
    denom = p.m2 * e_pos + p.m1 * e_neg
    num = 2.0 * series.mul(du, dlam, order)
    num[0] += dkappa
    wgap = series.mul(num, series.reciprocal(denom, order), order)

    out = {}
    kappa = (p.kappa1, p.kappa2)
    K = cs.K
    for i in range(2):
        if i == 0:
            inflow = p.m2 * series.mul(e_pos, wgap, order)
        else:
            inflow = -p.m1 * series.mul(e_neg, wgap, order)
        rhs = 2.0 * series.mul(du, dv[i], order) + inflow
        rhs[0] -= kappa[i] * K[i]
        res = mddu - rhs
        for k in range(order + 1):
            out[f"eq{i + 1}_s{k}"] = float(res[k])

    direct = np.array([cs.F[1] - cs.F[0], cs.G_gap])
    for k in range(2):
        out[f"gap_s{k}"] = float(wgap[k] - direct[k])
    gap_lin = series.trunc(direct, order)
    for i in range(2):
        if i == 0:
            inflow = p.m2 * series.mul(e_pos, gap_lin, order)
        else:
            inflow = -p.m1 * series.mul(e_neg, gap_lin, order)
        rhs = 2.0 * series.mul(du, dv[i], order) + inflow
        rhs[0] -= kappa[i] * K[i]
        res = mddu - rhs
        for k in range(2):
            out[f"raw{i + 1}_s{k}"] = float(res[k])

    out["lambda0"] = float(lam[0] - math.log(N2 / N1))
    out["lambda1"] = float(lam[1] - (cs.D[1] - cs.D[0]))
    out["lambda2"] = float(lam[2] - (cs.E[1] - cs.E[0]))
    rebuilt = cs.K_from_components(ut, ess.N_star)
    for i in range(2):
        out[f"K{i + 1}"] = float(rebuilt[i] - K[i])
    return out


def source_sink_correctors(sse: SourceSinkEss, p: ModelParams) -> CorrectorSet:
    """Corrector data at -theta for the source-sink case with a monomorphic patch 2.

    Habitat 1 is an exact Gaussian, so A = sqrt(g1) and B = C = 0 there.
    """
    if abs(sse.source_gap) <= 1e-10:
        raise DegenerateBoundary("source condition holds with equality; no corrector data")
    if sse.patch2.kind != MONOMORPHIC:
        raise SingularChain(
            "source-sink correctors are only available when patch 2 is monomorphic")
    th = p.theta
    N1, N2 = sse.patch2.N_star
    sg = math.sqrt(p.g1)
    v1 = math.log(p.g1 ** 0.25 * N1)
    w1 = -sg / (p.kappa1 * N1)
    K1 = -sg / p.kappa1

    q0 = 4.0 * p.g2 * th ** 2 - p.r2 + p.kappa2 * N2
    q1 = -4.0 * p.g2 * th
    q2 = p.g2 - p.g1
    if not q0 > 0:
        raise LogDomain("habitat-2 v logarithm argument is not positive at -theta")
    v2 = math.log(p.m1 * p.g1 ** 0.25 * N1 / q0)
    D2 = -q1 / q0
    E2 = -(q2 / q0 - 0.5 * (q1 / q0) ** 2)

    # K2 = N2 (a + F2) and F2 = w1 - N2/(m1 N1) (sqrt(g1) + kappa2 K2)
    a = (E2 + 0.5 * D2 ** 2) / sg
    ratio = N2 / (p.m1 * N1)
    K2 = N2 * (a + w1 - ratio * sg) / (1.0 + N2 * ratio * p.kappa2)
    F2 = w1 - ratio * (sg + p.kappa2 * K2)
    nan = float("nan")
    return CorrectorSet((v1, v2), (0.0, D2), (0.0, E2), (w1, F2), (K1, K2),
                        D2, E2, nan, nan, -th, regime=SOURCE_SINK,
                        notes=("lambda3 and G_gap are not defined in the source-sink case",))


def source_sink_taylor(p: ModelParams) -> UTaylor:
    """Local data of u at -theta in the source-sink case: an exact parabola."""
    return UTaylor(-p.theta, math.sqrt(p.g1), 0.0, 0.0, p.g1, 0.0, 0.0)


def source_sink_residuals(cs: CorrectorSet, sse: SourceSinkEss, p: ModelParams) -> dict:
    """Residuals of the two linear relations fixing (K_2, F_2), and of v_2(-theta)."""
    N1, N2 = sse.patch2.N_star
    sg = math.sqrt(p.g1)
    K2, F2 = cs.K[1], cs.F[1]
    r_k = K2 - N2 * ((cs.E[1] + 0.5 * cs.D[1] ** 2) / sg + F2)
    r_w = sg - (-p.kappa2 * K2 + p.m1 * N1 / N2 * (cs.F[0] - F2))
    r_v = cs.v_offset[1] - math.log(p.g1 ** 0.25 * N2)
    return {"K2_relation": r_k, "w2_relation": r_w, "v2_offset": r_v}
