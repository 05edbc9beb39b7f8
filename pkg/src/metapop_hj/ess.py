"""Evolutionary stable strategies of the two-habitat model.

The monomorphic ESS is the fixed point of mu2 -> G(F(mu2)) in the transformed
population sizes; the dimorphic ESS has a closed form. Everything is solved
with bracketed bisection since all the maps involved are monotone on the
branches used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DimorphicRegime, DomainError, NoEquilibrium, NoRoot,
                     NotDimorphicRegime, RegimeError)
from .model import (SOURCE_SINK, TWO_WAY, ModelParams, MuState, PopState,
                    N_of_mu, effective_fitness_mu, growth_rate,
                    quartic_f_threshold, require_regime)
from .quartic import minimize_quartic
from .roots import bisect, expand_upper, shrink_toward

BOUNDARY_TOL = 1e-10
MONOMORPHIC = "monomorphic"
DIMORPHIC = "dimorphic"


@dataclass(frozen=True)
class DimorphismConditions:
    """Signed gaps of the three dimorphism inequalities (positive = holds).

    ``c2``/``c3`` and the equivalent forms ``alt2``/``alt3`` are None when
    ``c1 <= 0``, where the dimorphic candidate does not exist.
    """
    c1: float
    c2: float | None = None
    c3: float | None = None
    alt2: float | None = None
    alt3: float | None = None

    @property
    def applicable(self) -> bool:
        return self.c2 is not None

    @property
    def strict(self) -> bool:
        return (self.c1 > 0 and self.applicable
                and self.c2 > BOUNDARY_TOL and self.c3 > BOUNDARY_TOL)


@dataclass(frozen=True)
class DimorphicCandidate:
    z_D: float
    N: PopState
    mu_star: float
    boundary: bool = False


@dataclass(frozen=True)
class Ess:
    kind: str
    support: tuple
    # weights[k, i]: mass of habitat i carried at support point k
    weights: np.ndarray
    N_star: PopState
    mu_star: MuState | None
    boundary_case: bool = False
    conditions: DimorphismConditions | None = None
    notes: tuple = field(default=())

    @property
    def z_star(self) -> float:
        if self.kind != MONOMORPHIC:
            raise AttributeError("z_star is only defined for a monomorphic ESS")
        return self.support[0]

    def to_record(self) -> dict:
        rec = {
            "kind": self.kind,
            "support": [float(z) for z in self.support],
            "weights": [[float(w) for w in row] for row in self.weights],
            "N1": float(self.N_star[0]),
            "N2": float(self.N_star[1]),
            "mu1": None if self.mu_star is None else float(self.mu_star[0]),
            "mu2": None if self.mu_star is None else float(self.mu_star[1]),
            "boundary_case": bool(self.boundary_case),
        }
        c = self.conditions
        for key in ("c1", "c2", "c3"):
            val = None if c is None else getattr(c, key)
            rec[key] = None if val is None else float(val)
        if self.notes:
            rec["notes"] = list(self.notes)
        return rec


@dataclass(frozen=True)
class ResidentEquilibrium:
    z_resident: float
    mu_eq: MuState
    N_eq: PopState


@dataclass(frozen=True)
class SourceSinkEss:
    patch1: Ess
    patch2: Ess
    # m1 (r1 - m1)/kappa1 - 4 g2 theta^2 r2/kappa2; negative means patch 2 dimorphic
    source_gap: float

    def to_record(self) -> dict:
        return {"regime": SOURCE_SINK, "source_gap": float(self.source_gap),
                "patch1": self.patch1.to_record(), "patch2": self.patch2.to_record()}


# ---------------------------------------------------------------- dimorphic

def mu_star_dimorphic(p: ModelParams) -> float:
    return p.m1 * p.m2 / (4.0 * p.theta ** 2 * p.g1 * p.g2)


def dimorphic_candidate(p: ModelParams) -> DimorphicCandidate:
    ratio = p.m1 * p.m2 / (4.0 * p.g1 * p.g2 * p.theta ** 4)
    if ratio > 1.0 + 1e-12:
        raise NotDimorphicRegime(
            f"dim-1 fails: m1*m2/(4*g1*g2*theta^4) = {ratio:.6g} >= 1")
    mu = mu_star_dimorphic(p)
    z_D = math.sqrt(max(p.theta ** 2 - mu, 0.0))
    N1 = (p.m1 * p.m2 / (4.0 * p.theta ** 2 * p.g2) + p.r1 - p.m1) / p.kappa1
    N2 = (p.m1 * p.m2 / (4.0 * p.theta ** 2 * p.g1) + p.r2 - p.m2) / p.kappa2
    return DimorphicCandidate(z_D, PopState(N1, N2), mu,
                              boundary=abs(1.0 - ratio) <= 1e-12)


def dimorphism_conditions(p: ModelParams) -> DimorphismConditions:
    c1 = 1.0 - p.m1 * p.m2 / (4.0 * p.g1 * p.g2 * p.theta ** 4)
    if not c1 > 0:
        return DimorphismConditions(c1)
    cand = dimorphic_candidate(p)
    z, (N1, N2) = cand.z_D, cand.N
    c2 = p.m2 * N2 + (growth_rate(-z, N1, 1, p) - p.m1) * N1
    c3 = p.m1 * N1 + (growth_rate(z, N2, 2, p) - p.m2) * N2
    alt2 = p.m1 * N1 + (growth_rate(-z, N2, 2, p) - p.m2) * N2
    alt3 = p.m2 * N2 + (growth_rate(z, N1, 1, p) - p.m1) * N1
    return DimorphismConditions(c1, c2, c3, alt2, alt3)


def dimorphic_weights(p: ModelParams) -> np.ndarray:
    """Dirac weights nu[k, i] at k in (-z_D, +z_D) for habitat i."""
    cond = dimorphism_conditions(p)
    if not cond.strict:
        raise NotDimorphicRegime(_describe_failure(cond))
    cand = dimorphic_candidate(p)
    z, (N1, N2) = cand.z_D, cand.N
    a = growth_rate(-z, N1, 1, p) - p.m1
    b = growth_rate(z, N2, 2, p) - p.m2
    den = p.m1 * p.m2 - a * b
    nu_I = cond.c3 / den * np.array([p.m2, -a])
    nu_II = cond.c2 / den * np.array([-b, p.m1])
    return np.vstack([nu_I, nu_II])


def _describe_failure(cond: DimorphismConditions) -> str:
    if not cond.c1 > 0:
        return f"dim-1 fails: 1 - m1*m2/(4*g1*g2*theta^4) = {cond.c1:.6g} <= 0"
    bad = []
    if not cond.c2 > BOUNDARY_TOL:
        bad.append(f"dim-2 fails (gap {cond.c2:.6g})")
    if not cond.c3 > BOUNDARY_TOL:
        bad.append(f"dim-3 fails (gap {cond.c3:.6g})")
    return "; ".join(bad) or "dimorphism conditions hold"


# ---------------------------------------------------------------- F and G maps

def _min_f_level(mu1: float, mu2: float, theta: float) -> float:
    return minimize_quartic(mu1, mu2, theta).value


def F_map(mu2: float, p: ModelParams) -> tuple:
    """(mu1, z_bar) with min_z f(z; mu1, mu2) = f(z_bar) = m1 m2/(g1 g2)."""
    if not mu2 > 0:
        raise DomainError(f"F is defined for mu2 > 0, got {mu2!r}")
    c = quartic_f_threshold(p)
    if p.m1 * p.m2 < 4.0 * p.g1 * p.g2 * p.theta ** 4:
        mu = mu_star_dimorphic(p)
        if abs(mu2 - mu) <= 1e-14 * max(1.0, mu):
            raise DomainError("F is undefined at mu2 = mu*: f has two global minima")
    th = p.theta

    def level(mu1):
        return _min_f_level(mu1, mu2, th) - c

    hi = expand_upper(level, max(1.0, c / (mu2 + 4 * th * th)), True)
    mu1 = bisect(level, 0.0, hi)
    zbar = minimize_quartic(mu1, mu2, th).z
    return mu1, zbar


def G_map(mu1: float, z_bar: float, p: ModelParams) -> float:
    N1 = (p.g1 * mu1 + p.r1 - p.m1) / p.kappa1
    return ((p.kappa2 * p.g1 / p.m2) * ((z_bar + p.theta) ** 2 + mu1) * N1
            + p.m2 - p.r2) / p.g2


def G_of_F(mu2: float, p: ModelParams) -> float:
    return G_map(*F_map(mu2, p), p)


def G_of_F_one_sided(p: ModelParams) -> tuple:
    """Limits (G o F(mu*-), G o F(mu*+)) at the dimorphic level mu*."""
    cand = dimorphic_candidate(p)
    mu = cand.mu_star
    return G_map(mu, cand.z_D, p), G_map(mu, -cand.z_D, p)


# ---------------------------------------------------------------- monomorphic

def _mirror_ess(e: Ess) -> Ess:
    support = tuple(-z for z in e.support)[::-1]
    w = e.weights[::-1, ::-1].copy()
    mu = None if e.mu_star is None else MuState(e.mu_star[1], e.mu_star[0])
    cond = None
    if e.conditions is not None:
        c = e.conditions
        cond = DimorphismConditions(c.c1, c.c3, c.c2, c.alt3, c.alt2)
    return Ess(e.kind, support, w, PopState(e.N_star[1], e.N_star[0]), mu,
               e.boundary_case, cond, e.notes)


def monomorphic_ess(p: ModelParams) -> Ess:
    require_regime(p, TWO_WAY)
    if not p.r1 - p.m1 > 0:
        return _mirror_ess(monomorphic_ess(p.mirrored()))
    cond = dimorphism_conditions(p)
    if cond.strict:
        raise DimorphicRegime("all dimorphism conditions hold strictly; ESS is dimorphic")
    notes = []
    boundary = False

    if cond.applicable:
        cand = dimorphic_candidate(p)
        mu, zD = cand.mu_star, cand.z_D
        if abs(cond.c2) <= BOUNDARY_TOL or abs(cond.c3) <= BOUNDARY_TOL:
            z = -zD if abs(cond.c2) <= BOUNDARY_TOL else zD
            return Ess(MONOMORPHIC, (z,), np.array([[cand.N[0], cand.N[1]]]),
                       cand.N, MuState(mu, mu), True, cond,
                       ("dimorphism condition at equality",))

        def h(m2):
            return G_of_F(m2, p) - m2

        if cond.c3 < 0:
            # solution on (0, mu*), trait in (z_D, theta)
            hi = shrink_toward(h, mu, -1e-6 * mu, False)
            lo = _lower_bracket(h, min(hi, mu) * 0.5)
            interval = (zD, p.theta)
        else:
            # cond.c2 < 0: solution on (mu*, inf), trait in (-theta, -z_D)
            lo = shrink_toward(h, mu, 1e-6 * mu, True)
            hi = expand_upper(h, max(2.0 * mu, lo * 2.0), False)
            interval = (-p.theta, -zD)
    else:
        if abs(cond.c1) <= 1e-12:
            boundary = True
            notes.append("dim-1 at equality; treated as monomorphic")

        def h(m2):
            return G_of_F(m2, p) - m2

        hi = expand_upper(h, 1.0, False)
        lo = _lower_bracket(h, min(hi, 1.0) * 0.5)
        interval = (-p.theta, p.theta)

    mu2 = bisect(h, lo, hi)
    mu1, z = F_map(mu2, p)
    if not (interval[0] - 1e-9 <= z <= interval[1] + 1e-9):
        raise NoRoot(f"monomorphic ESS z={z:.6g} outside expected interval {interval}")
    N = N_of_mu(MuState(mu1, mu2), p)
    if min(N) <= 0:
        raise NoRoot(f"non-positive equilibrium population sizes {tuple(N)}")
    return Ess(MONOMORPHIC, (z,), np.array([[N[0], N[1]]]), N, MuState(mu1, mu2),
               boundary, cond, tuple(notes))


def _lower_bracket(h, start: float) -> float:
    x = start
    while x > 1e-300:
        if h(x) > 0:
            return x
        x *= 0.1
    raise NoRoot("could not bracket the fixed point from below")


def solve_ess(p: ModelParams) -> Ess:
    require_regime(p, TWO_WAY)
    cond = dimorphism_conditions(p)
    if cond.strict:
        cand = dimorphic_candidate(p)
        w = dimorphic_weights(p)
        return Ess(DIMORPHIC, (-cand.z_D, cand.z_D), w, cand.N,
                   MuState(cand.mu_star, cand.mu_star), False, cond)
    return monomorphic_ess(p)


# ---------------------------------------------------------------- residents

def resident_equilibrium(z_resident: float, p: ModelParams) -> ResidentEquilibrium:
    """Demographic equilibrium of a population concentrated at ``z_resident``.

    Fixed point of H o K, where K solves f(z_resident; mu1, mu2) = m1 m2/(g1 g2)
    for mu1 and H is the eigenvector relation giving mu2 back.
    """
    require_regime(p, TWO_WAY)
    if not p.r1 - p.m1 > 0:
        eq = resident_equilibrium(-z_resident, p.mirrored())
        return ResidentEquilibrium(z_resident, MuState(eq.mu_eq[1], eq.mu_eq[0]),
                                   PopState(eq.N_eq[1], eq.N_eq[0]))
    th, c = p.theta, quartic_f_threshold(p)
    a1 = (z_resident + th) ** 2
    a2 = (z_resident - th) ** 2

    def K(mu2):
        return c / (mu2 + a2) - a1

    def K_inv(mu1):
        return c / (mu1 + a1) - a2

    def H(mu1):
        N1 = (p.g1 * mu1 + p.r1 - p.m1) / p.kappa1
        return ((p.kappa2 * p.g1 / p.m2) * (a1 + mu1) * N1 + p.m2 - p.r2) / p.g2

    def h(mu2):
        return H(K(mu2)) - mu2

    left = -a2
    floor1 = max((p.m1 - p.r1) / p.g1, -a1)
    if floor1 > -a1:
        right = K_inv(floor1)
    else:
        right = expand_upper(h, max(1.0, abs(left) + 1.0), False)
    if not h(right) < 0:
        raise NoEquilibrium(f"no sign change for resident z={z_resident:.6g}")
    width = right - left
    lo = shrink_toward(h, left, 0.5 * width, True, min_width=1e-300)
    mu2 = bisect(h, lo, right)
    mu1 = K(mu2)
    N = N_of_mu(MuState(mu1, mu2), p)
    if min(N) < -1e-12:
        raise NoEquilibrium(f"negative resident population sizes {tuple(N)}")
    return ResidentEquilibrium(z_resident, MuState(mu1, mu2), N)


def invasion_fitness(z_mutant, res: ResidentEquilibrium, p: ModelParams):
    return effective_fitness_mu(z_mutant, res.mu_eq, p)


# ---------------------------------------------------------------- source-sink

def source_sink_ess(p: ModelParams) -> SourceSinkEss:
    if p.m2 != 0:
        raise RegimeError(f"source-sink ESS requires m2 = 0, got m2={p.m2:g}")
    require_regime(p, SOURCE_SINK)
    th = p.theta
    N1 = (p.r1 - p.m1) / p.kappa1
    inflow = p.m1 * (p.r1 - p.m1) / p.kappa1
    capacity = 4.0 * p.g2 * th ** 2 * p.r2 / p.kappa2
    gap = inflow - capacity
    if gap < 0:
        alpha = p.m1 * (p.r1 - p.m1) / (4.0 * p.g2 * th ** 2 * p.kappa1)
        beta = p.r2 / p.kappa2 - alpha
        N2 = p.r2 / p.kappa2
        N = PopState(N1, N2)
        patch2 = Ess(DIMORPHIC, (-th, th), np.array([[0.0, alpha], [0.0, beta]]),
                     N, None)
    else:
        b = p.r2 - 4.0 * p.g2 * th ** 2
        N2 = (b + math.sqrt(b * b + 4.0 * p.kappa2 * inflow)) / (2.0 * p.kappa2)
        N = PopState(N1, N2)
        notes = ("source condition at equality",) if gap == 0 else ()
        patch2 = Ess(MONOMORPHIC, (-th,), np.array([[0.0, N2]]), N, None,
                     boundary_case=gap == 0, notes=notes)
    patch1 = Ess(MONOMORPHIC, (-th,), np.array([[N1, 0.0]]), N, None)
    return SourceSinkEss(patch1, patch2, gap)
