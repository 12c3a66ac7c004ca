"""Truncated Taylor series ("jets") evaluated pointwise.

A jet is an array ``c`` whose leading axis runs over Taylor coefficients,
``c[k] = f^(k)(x) / k!``; the remaining axes broadcast (typically one axis of
evaluation points).  Every function here works for real or complex input and
keeps the order of the shortest operand.
"""
import math

import numpy as np


def order(a):
    return a.shape[0] - 1


def const(value, k, like=None):
    value = np.asarray(value, dtype=float if like is None else like.dtype)
    out = np.zeros((k + 1,) + value.shape, dtype=value.dtype)
    out[0] = value
    return out


def variable(x, k):
    """Jet of the identity function at the points x."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((k + 1,) + x.shape)
    out[0] = x
    if k >= 1:
        out[1] = 1.0
    return out


def truncate(a, k):
    return a[: k + 1]


def mul(a, b):
    k = min(order(a), order(b))
    out = np.zeros((k + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]),
                   dtype=np.result_type(a, b))
    for n in range(k + 1):
        for j in range(n + 1):
            out[n] += a[j] * b[n - j]
    return out


def matmul(a, b):
    """Cauchy product of matrix jets with shapes (K+1, m, n, ...) and (K+1, n, p, ...)."""
    k = min(order(a), order(b))
    out = None
    for n in range(k + 1):
        term = sum(np.einsum("ij...,jk...->ik...", a[j], b[n - j]) for j in range(n + 1))
        if out is None:
            out = np.zeros((k + 1,) + term.shape, dtype=term.dtype)
        out[n] = term
    return out


def matvec(m, v):
    """m: (K+1, 2, 2, ...) or a constant (2, 2); v: (K+1, 2, ...)."""
    if m.ndim == 2:
        return np.einsum("ij,kj...->ki...", m, v)
    k = min(order(m), order(v))
    out = np.zeros((k + 1,) + v.shape[1:], dtype=np.result_type(m, v))
    for n in range(k + 1):
        for j in range(n + 1):
            out[n] += np.einsum("ij...,j...->i...", m[j], v[n - j])
    return out


def div(a, b):
    k = min(order(a), order(b))
    out = np.zeros((k + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]),
                   dtype=np.result_type(a, b))
    for n in range(k + 1):
        acc = a[n].copy() if np.ndim(a[n]) else a[n]
        for j in range(1, n + 1):
            acc = acc - b[j] * out[n - j]
        out[n] = acc / b[0]
    return out


def recip(a):
    return div(const(np.ones_like(a[0]), order(a), like=a), a)


def power(a, r):
    """a**r for a jet with a[0] > 0 (or any a[0] when r is a positive integer)."""
    k = order(a)
    out = np.zeros_like(a)
    out[0] = a[0] ** r
    for n in range(1, k + 1):
        acc = 0.0
        for j in range(1, n + 1):
            acc = acc + ((r + 1) * j - n) * a[j] * out[n - j]
        out[n] = acc / (n * a[0])
    return out


def exp(a):
    k = order(a)
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for n in range(1, k + 1):
        out[n] = sum(j * a[j] * out[n - j] for j in range(1, n + 1)) / n
    return out


def log(a):
    k = order(a)
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for n in range(1, k + 1):
        acc = a[n] - sum(j * out[j] * a[n - j] for j in range(1, n)) / n
        out[n] = acc / a[0]
    return out


def sincos(a):
    k = order(a)
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for n in range(1, k + 1):
        s[n] = sum(j * a[j] * c[n - j] for j in range(1, n + 1)) / n
        c[n] = -sum(j * a[j] * s[n - j] for j in range(1, n + 1)) / n
    return s, c


def deriv(a):
    """Jet of f' from the jet of f (one order lower)."""
    k = order(a)
    scale = np.arange(1, k + 1).reshape((k,) + (1,) * (a.ndim - 1))
    return a[1:] * scale


def derivs(a):
    """Plain derivatives f, f', f'', ... from Taylor coefficients."""
    k = order(a)
    fact = np.array([math.factorial(n) for n in range(k + 1)], dtype=float)
    return a * fact.reshape((k + 1,) + (1,) * (a.ndim - 1))


def from_derivs(d):
    k = order(d)
    fact = np.array([math.factorial(n) for n in range(k + 1)], dtype=float)
    return d / fact.reshape((k + 1,) + (1,) * (d.ndim - 1))


def compose(f, g):
    """Jet of f(g(x)) given f's jet at g(x) and g's jet at x."""
    k = min(order(f), order(g))
    delta = g[: k + 1].copy()
    delta[0] = 0.0
    out = const(f[0], k, like=np.asarray(f[0] * g[0]))
    power_j = const(np.ones_like(g[0]), k, like=g)
    for j in range(1, k + 1):
        power_j = mul(power_j, delta)
        out = out + f[j] * power_j
    return out


def revert(f):
    """Given the jet of F at y, return the jet of F^{-1} at F(y) (value entry = y)."""
    k = order(f)
    t = np.zeros_like(f)
    if k >= 1:
        t[1] = 1.0
    s = np.zeros_like(f)
    for _ in range(k):
        acc = t.copy()
        power_j = s.copy()
        for j in range(2, k + 1):
            power_j = mul(power_j, s)
            acc = acc - f[j] * power_j
        s = acc / f[1]
        s[0] = 0.0
    s[0] = 0.0
    out = s
    return out


def arg_vector(w):
    """Derivative part of the angle jet of the vector w = (w1, w2) ~ (sin phi, cos phi).

    w has shape (K+1, 2, ...).  Returns the jet of phi with phi[0] = atan2(w1, w2)
    (principal branch); callers fix the branch of the value entry.
    """
    z = w[:, 1] + 1j * w[:, 0]
    logz = log(z)
    phi = logz.imag.copy()
    return phi
