"""Closed-form minimisation of f(z) = (mu1 + (z+theta)^2)(mu2 + (z-theta)^2).

f' = 4z^3 + 2(mu1 + mu2 - 2 theta^2) z + 2 theta (mu2 - mu1) has no quadratic
term, so its critical points are the real roots of a depressed cubic.
"""

from __future__ import annotations

import math
from typing import NamedTuple


class QuarticMin(NamedTuple):
    z: float
    value: float
    # gap to the best other local minimum; 0 for a single-well quartic
    runner_up_gap: float
    critical_points: tuple


def depressed_cubic_roots(p: float, q: float) -> tuple:
    """Real roots of t^3 + p t + q, sorted, each polished by Newton steps."""
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p < 0 and disc < 0:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / (p * r))
        arg = max(-1.0, min(1.0, arg))
        phi = math.acos(arg) / 3.0
        roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    else:
        s = math.sqrt(max(disc, 0.0))
        big = abs(q) / 2.0 + s
        a = -math.copysign(big ** (1.0 / 3.0), q) if q != 0 else (
            -(s ** (1.0 / 3.0)) if s > 0 else 0.0)
        t = a - p / (3.0 * a) if a != 0 else 0.0
        roots = [t]
        if p < 0 and disc == 0:
            # double root
            roots.append(-t / 2.0)
    polished = []
    for t in roots:
        for _ in range(3):
            d = 3.0 * t * t + p
            if d == 0:
                break
            step = (t * t * t + p * t + q) / d
            t -= step
            if abs(step) <= 1e-16 * (1.0 + abs(t)):
                break
        polished.append(t)
    return tuple(sorted(polished))


def quartic_value(z: float, mu1: float, mu2: float, theta: float) -> float:
    return (mu1 + (z + theta) ** 2) * (mu2 + (z - theta) ** 2)


def minimize_quartic(mu1: float, mu2: float, theta: float) -> QuarticMin:
    p = (mu1 + mu2 - 2.0 * theta * theta) / 2.0
    q = theta * (mu2 - mu1) / 2.0
    crit = depressed_cubic_roots(p, q)
    vals = [quartic_value(t, mu1, mu2, theta) for t in crit]
    order = sorted(range(len(crit)), key=lambda k: vals[k])
    best = order[0]
    gap = 0.0
    if len(crit) == 3:
        # the middle critical point is the local maximum
        minima = [0, 2]
        other = minima[1] if best == minima[0] else minima[0]
        gap = vals[other] - vals[best]
    return QuarticMin(crit[best], vals[best], gap, crit)
