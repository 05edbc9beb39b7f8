"""Two-habitat growth rates, effective fitness and the population-size transform.

Habitat 1 has its optimum at ``-theta`` and habitat 2 at ``+theta``. Every
function here is pure and accepts scalars or numpy arrays for the trait ``z``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Mapping, NamedTuple

import numpy as np

from .errors import RegimeError

PARAM_KEYS = ("r1", "r2", "g1", "g2", "kappa1", "kappa2", "m1", "m2", "theta")

TWO_WAY = "two-way"
SOURCE_SINK = "source-sink"
INVALID = "invalid"


@dataclass(frozen=True)
class ModelParams:
    r1: float
    r2: float
    g1: float
    g2: float
    kappa1: float
    kappa2: float
    m1: float
    m2: float
    theta: float

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "ModelParams":
        missing = [k for k in PARAM_KEYS if k not in values]
        if missing:
            raise KeyError(f"missing model parameters: {', '.join(missing)}")
        return cls(**{k: float(values[k]) for k in PARAM_KEYS})

    @classmethod
    def symmetric(cls, r, g, kappa, m, theta) -> "ModelParams":
        return cls(r, r, g, g, kappa, kappa, m, m, theta)

    def as_dict(self) -> dict:
        return asdict(self)

    def mirrored(self) -> "ModelParams":
        """Swap the habitat labels. Traits map as z -> -z under this swap."""
        return ModelParams(self.r2, self.r1, self.g2, self.g1, self.kappa2,
                           self.kappa1, self.m2, self.m1, self.theta)

    def scaled_rates(self, c: float) -> "ModelParams":
        """Multiply every rate constant (r, g, kappa, m) by ``c``."""
        return replace(self, **{f.name: getattr(self, f.name) * c
                                for f in fields(self) if f.name != "theta"})

    @property
    def is_symmetric(self) -> bool:
        return (self.r1 == self.r2 and self.g1 == self.g2
                and self.kappa1 == self.kappa2 and self.m1 == self.m2)


class PopState(NamedTuple):
    N1: float
    N2: float


class MuState(NamedTuple):
    mu1: float
    mu2: float


class RegimeReport(NamedTuple):
    regime: str
    violated: str | None
    message: str

    @property
    def ok(self) -> bool:
        return self.regime != INVALID


def growth_rate(z, N, habitat: int, p: ModelParams):
    """r_i - g_i (z - theta_i)^2 - kappa_i N."""
    if habitat == 1:
        return p.r1 - p.g1 * (z + p.theta) ** 2 - p.kappa1 * N
    if habitat == 2:
        return p.r2 - p.g2 * (z - p.theta) ** 2 - p.kappa2 * N
    raise ValueError(f"habitat must be 1 or 2, got {habitat!r}")


def top_eigenvalue(a, b, c):
    """Largest eigenvalue of [[a, x], [y, b]] with x*y = c >= 0.

    Uses the product of the eigenvalues to avoid cancellation when the
    result is small compared to |a + b|.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = a + b
    root = np.sqrt((a - b) ** 2 + 4.0 * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = 0.5 * (s - root)
        stable = (a * b - c) / lower
    out = np.where(s >= 0.0, 0.5 * (s + root), stable)
    # lower == 0 only when a = b = c = 0
    out = np.where(np.isfinite(out), out, 0.5 * (s + root))
    return out if out.ndim else float(out)


def effective_fitness(z, N: PopState, p: ModelParams):
    """Principal eigenvalue of the growth-plus-migration matrix at trait z."""
    a = growth_rate(z, N[0], 1, p) - p.m1
    b = growth_rate(z, N[1], 2, p) - p.m2
    if p.m1 * p.m2 == 0.0:
        return np.maximum(a, b) if np.ndim(a) else float(max(a, b))
    return top_eigenvalue(a, b, p.m1 * p.m2)


def effective_fitness_mu(z, mu: MuState, p: ModelParams):
    """Effective fitness written in the transformed population sizes."""
    a = -p.g1 * (mu[0] + (z + p.theta) ** 2)
    b = -p.g2 * (mu[1] + (z - p.theta) ** 2)
    if p.m1 * p.m2 == 0.0:
        return np.maximum(a, b) if np.ndim(a) else float(max(a, b))
    return top_eigenvalue(a, b, p.m1 * p.m2)


def fitness_matrix(z: float, N: PopState, p: ModelParams) -> np.ndarray:
    return np.array([
        [growth_rate(z, N[0], 1, p) - p.m1, p.m2],
        [p.m1, growth_rate(z, N[1], 2, p) - p.m2],
    ])


def mu_of_N(N: PopState, p: ModelParams) -> MuState:
    return MuState((p.kappa1 * N[0] + p.m1 - p.r1) / p.g1,
                   (p.kappa2 * N[1] + p.m2 - p.r2) / p.g2)


def N_of_mu(mu: MuState, p: ModelParams) -> PopState:
    return PopState((p.g1 * mu[0] + p.r1 - p.m1) / p.kappa1,
                    (p.g2 * mu[1] + p.r2 - p.m2) / p.kappa2)


def quartic_f(z, mu: MuState, p: ModelParams):
    return (mu[0] + (z + p.theta) ** 2) * (mu[1] + (z - p.theta) ** 2)


def quartic_f_threshold(p: ModelParams) -> float:
    """Level m1*m2/(g1*g2) that min_z f must reach at an ESS."""
    return p.m1 * p.m2 / (p.g1 * p.g2)


def check_assumptions(p: ModelParams) -> RegimeReport:
    for name in ("g1", "g2", "kappa1", "kappa2", "theta"):
        if not getattr(p, name) > 0:
            return RegimeReport(INVALID, "positivity",
                                f"positivity fails: {name} must be > 0")
    for name in ("m1", "m2"):
        if not getattr(p, name) >= 0:
            return RegimeReport(INVALID, "positivity",
                                f"positivity fails: {name} must be >= 0")
    if not max(p.r1 - p.m1, p.r2 - p.m2) > 0:
        return RegimeReport(
            INVALID, "viability",
            "viability fails: max(r1 - m1, r2 - m2) = "
            f"{max(p.r1 - p.m1, p.r2 - p.m2):.6g} must be > 0")
    if p.m1 > 0 and p.m2 > 0:
        return RegimeReport(TWO_WAY, None, "two-way migration (m1 > 0, m2 > 0)")
    if p.m1 > 0 and p.m2 == 0:
        if p.r1 - p.m1 > 0:
            return RegimeReport(SOURCE_SINK, None,
                                "source-sink migration (m1 > 0, m2 = 0, r1 > m1)")
        return RegimeReport(
            INVALID, "source-viability",
            f"source-viability fails: r1 - m1 = {p.r1 - p.m1:.6g} must be > 0 when m2 = 0")
    return RegimeReport(
        INVALID, "migration",
        f"migration fails: need m1 > 0 and m2 > 0 (two-way) or m1 > 0, m2 = 0 "
        f"(source-sink); got m1={p.m1:g}, m2={p.m2:g}")


def require_regime(p: ModelParams, regime: str) -> RegimeReport:
    report = check_assumptions(p)
    if report.regime != regime:
        if report.regime == INVALID:
            raise RegimeError(report.message)
        raise RegimeError(f"requires {regime} regime, parameters are {report.regime}")
    return report
