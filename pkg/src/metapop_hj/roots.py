"""Bracketed bisection for monotone scalar maps."""

from __future__ import annotations

from typing import Callable

from .errors import NoRoot

XTOL = 1e-12
MAXITER = 200


def bisect(fn: Callable[[float], float], lo: float, hi: float,
           xtol: float = XTOL, maxiter: int = MAXITER) -> float:
    """Root of ``fn`` in [lo, hi]; requires a sign change at the ends.

    Stops once the bracket is narrower than ``xtol``, cannot shrink further in
    floating point, or after ``maxiter`` halvings.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoRoot(f"no sign change on [{lo:.6g}, {hi:.6g}]: f={flo:.3g}, {fhi:.3g}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def expand_upper(fn: Callable[[float], float], start: float, sign_wanted: bool,
                 factor: float = 2.0, limit: float = 1e12) -> float:
    """Grow ``start`` geometrically until ``(fn(x) > 0) == sign_wanted``."""
    x = start
    while x < limit:
        if (fn(x) > 0) == sign_wanted:
            return x
        x *= factor
    raise NoRoot(f"bracket expansion failed up to {limit:g}")


def shrink_toward(fn: Callable[[float], float], anchor: float, width: float,
                  sign_wanted: bool, factor: float = 0.5, min_width: float = 1e-300) -> float:
    """Find ``anchor + w`` (w may be negative) with the wanted sign, halving w."""
    w = width
    while abs(w) > min_width:
        x = anchor + w
        if (fn(x) > 0) == sign_wanted:
            return x
        w *= factor
    raise NoRoot(f"bracket search toward {anchor:.6g} failed")
