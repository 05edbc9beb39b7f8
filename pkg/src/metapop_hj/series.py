"""Truncated power series in one variable, stored as coefficient arrays (low order first)."""

from __future__ import annotations

import numpy as np


def trunc(c, order: int) -> np.ndarray:
    out = np.zeros(order + 1)
    c = np.asarray(c, dtype=float)[: order + 1]
    out[: len(c)] = c
    return out


def mul(a, b, order: int) -> np.ndarray:
    return trunc(np.convolve(trunc(a, order), trunc(b, order)), order)


def sqrt(a, order: int) -> np.ndarray:
    a = trunc(a, order)
    if not a[0] > 0:
        raise ValueError("series sqrt needs a positive constant term")
    out = np.zeros(order + 1)
    out[0] = np.sqrt(a[0])
    for k in range(1, order + 1):
        out[k] = (a[k] - np.dot(out[1:k], out[k - 1:0:-1])) / (2.0 * out[0])
    return out


def reciprocal(a, order: int) -> np.ndarray:
    a = trunc(a, order)
    out = np.zeros(order + 1)
    out[0] = 1.0 / a[0]
    for k in range(1, order + 1):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1]) / a[0]
    return out


def exp(a, order: int) -> np.ndarray:
    """exp of a series; uses k e_k = sum_j j a_j e_{k-j}."""
    a = trunc(a, order)
    out = np.zeros(order + 1)
    out[0] = np.exp(a[0])
    for k in range(1, order + 1):
        j = np.arange(1, k + 1)
        out[k] = np.dot(j * a[1:k + 1], out[k - j]) / k
    return out


def log(a, order: int) -> np.ndarray:
    a = trunc(a, order)
    if not a[0] > 0:
        raise ValueError("series log needs a positive constant term")
    out = np.zeros(order + 1)
    out[0] = np.log(a[0])
    for k in range(1, order + 1):
        j = np.arange(1, k)
        out[k] = (a[k] - np.dot(j * out[j], a[k - j]) / k) / a[0]
    return out


def deriv(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[1:] * np.arange(1, len(a))
