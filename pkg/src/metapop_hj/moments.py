"""First-order-in-eps moments of the equilibrium trait distribution per habitat."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .correctors import CorrectorSet
from .ess import MONOMORPHIC, Ess
from .hj import UTaylor

ASYMPTOTIC = "asymptotic"
FD = "fd"
MOMENT_COLUMNS = ("eps", "habitat", "N", "mean", "variance", "skewness", "source")


def gaussian_central_moment(k: int, var: float) -> float:
    """k-th central moment of N(0, var): var^(k/2) (k-1)!! for even k, else 0."""
    if k < 0 or k > 8:
        raise ValueError(f"moment order must be in [0, 8], got {k}")
    if k % 2:
        return 0.0
    return var ** (k // 2) * math.prod(range(k - 1, 0, -2))


@dataclass(frozen=True)
class MomentSummary:
    eps: float
    N_eps: tuple
    mean: tuple
    variance: tuple
    skewness: tuple
    source: str = ASYMPTOTIC

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    def rows(self) -> list:
        return [(float(self.eps), i + 1, float(self.N_eps[i]), float(self.mean[i]),
                 float(self.variance[i]), float(self.skewness[i]), self.source)
                for i in range(2)]


def moment_summary(ess: Ess, ut: UTaylor, cs: CorrectorSet, eps: float) -> MomentSummary:
    if ess.kind != MONOMORPHIC:
        raise ValueError("moment expansions are only available for a monomorphic ESS")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    A, B, C = ut.A, ut.B, ut.C
    z = ut.z_star
    N, mean = [], []
    for i in range(2):
        D, E, F = cs.D[i], cs.E[i], cs.F[i]
        N.append(ess.N_star[i] * (1.0 + eps * (F + (E + 0.5 * D * D) / A
                                               + 3.0 * (C + B * D) / A ** 2
                                               + 7.5 * B * B / A ** 3)))
        mean.append(z + eps * (3.0 * B / A ** 2 + D / A))
    var = float(eps / A)
    skew = float(6.0 * B * math.sqrt(eps) / A ** 1.5)
    return MomentSummary(float(eps), tuple(map(float, N)), tuple(map(float, mean)),
                         (var, var), (skew, skew))
