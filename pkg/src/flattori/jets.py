"""Truncated Taylor-series (jet) arithmetic.

A jet is an ndarray whose last axis holds Taylor coefficients c_k = f^(k)/k!
about some base point; all leading axes broadcast, so a curve evaluated on n
parameter values at order K is simply an array of shape (3, n, K+1).  Products
are truncated convolutions, division and square roots use the classical
power-series recurrences.  This gives exact derivatives of every curve in the
library without any hand-written chain rules.
"""

from __future__ import annotations

import math

import numpy as np

FACTORIALS = [math.factorial(k) for k in range(16)]


def constant(value, order: int) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    out = np.zeros(value.shape + (order + 1,))
    out[..., 0] = value
    return out


def variable(t, order: int) -> np.ndarray:
    """The identity jet at base points t."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (order + 1,))
    out[..., 0] = t
    if order >= 1:
        out[..., 1] = 1.0
    return out


def sin_linear(t, freq: float, phase: float, order: int) -> np.ndarray:
    """Jet of sin(freq*t + phase); derivatives of a linear-argument sine cycle."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape + (order + 1,))
    for k in range(order + 1):
        out[..., k] = freq**k * np.sin(freq * t + phase + 0.5 * math.pi * k) / FACTORIALS[k]
    return out


def cos_linear(t, freq: float, phase: float, order: int) -> np.ndarray:
    return sin_linear(t, freq, phase + 0.5 * math.pi, order)


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated Cauchy product along the last axis."""
    K = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (K,))
    for k in range(K):
        for j in range(k + 1):
            out[..., k] += a[..., j] * b[..., k - j]
    return out


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K = a.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    a = np.broadcast_to(a, shape + (K,))
    b = np.broadcast_to(b, shape + (K,))
    out = np.zeros(shape + (K,))
    out[..., 0] = a[..., 0] / b[..., 0]
    for k in range(1, K):
        acc = a[..., k].copy()
        for j in range(1, k + 1):
            acc -= b[..., j] * out[..., k - j]
        out[..., k] = acc / b[..., 0]
    return out


def sqrt(a: np.ndarray) -> np.ndarray:
    K = a.shape[-1]
    out = np.zeros(a.shape)
    out[..., 0] = np.sqrt(a[..., 0])
    for k in range(1, K):
        acc = a[..., k].copy()
        for j in range(1, k):
            acc = acc - out[..., j] * out[..., k - j]
        out[..., k] = acc / (2.0 * out[..., 0])
    return out


def derivative(a: np.ndarray) -> np.ndarray:
    """Jet of f' (one order shorter)."""
    K = a.shape[-1] - 1
    ks = np.arange(1, K + 1, dtype=float)
    return a[..., 1:] * ks


def coefficient_to_derivative(a: np.ndarray, k: int) -> np.ndarray:
    """Extract f^(k) from the stored Taylor coefficient."""
    return a[..., k] * FACTORIALS[k]


def dot3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dot product of two vector jets shaped (..., 3, K+1)."""
    return (
        mul(a[..., 0, :], b[..., 0, :])
        + mul(a[..., 1, :], b[..., 1, :])
        + mul(a[..., 2, :], b[..., 2, :])
    )


def cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ax, ay, az = a[..., 0, :], a[..., 1, :], a[..., 2, :]
    bx, by, bz = b[..., 0, :], b[..., 1, :], b[..., 2, :]
    return np.stack(
        [
            mul(ay, bz) - mul(az, by),
            mul(az, bx) - mul(ax, bz),
            mul(ax, by) - mul(ay, bx),
        ],
        axis=-2,
    )


def det3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return dot3(a, cross3(b, c))
