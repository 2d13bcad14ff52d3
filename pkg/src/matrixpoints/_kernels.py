"""Compiled inner loops for point counting.

The affine count of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_p
(p odd) equals sum_x (1 + chi(g(x))) with g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6,
after completing the square in y. g is stepped with forward differences so
the loop is additions and compares only; several independent difference
chains run interleaved to keep the pipeline busy.
"""

from __future__ import annotations

import numba
import numpy as np

_STREAMS = 4
MAX_KERNEL_PRIME = 2**31 - 1


@numba.njit(nogil=True, cache=True)
def chi_table(p):
    """chi_table(p)[v] = Legendre symbol (v/p) as int8."""
    ch = np.full(p, -1, np.int8)
    ch[0] = 0
    s = 0
    d = 1
    for _ in range((p - 1) // 2):
        s += d
        if s >= p:
            s -= p
        d += 2
        if d >= p:
            d -= p
        ch[s] = 1
    return ch


@numba.njit(nogil=True, cache=True)
def _g(x, b2, b4, b6, p):
    return ((((4 * x + b2) % p) * x % p + 2 * b4) % p * x + b6) % p


@numba.njit(nogil=True, cache=True)
def chi_sum(ch, b2, b4, b6, p):
    """sum over x in F_p of chi(4x^3 + b2 x^2 + 2 b4 x + b6); b's reduced mod p."""
    K = 4
    m = p // K
    g = np.empty(K, np.int64)
    d1 = np.empty(K, np.int64)
    d2 = np.empty(K, np.int64)
    d3 = 24 % p
    for k in range(K):
        x = k * m
        g[k] = _g(x, b2, b4, b6, p)
        d1[k] = ((12 * x % p) * x + 12 * x + 4 + b2 * (2 * x + 1) + 2 * b4) % p
        d2[k] = (24 * x + 24 + 2 * b2) % p
    acc = 0
    for _ in range(m):
        for k in range(K):
            gk = g[k]
            acc += ch[gk]
            gk += d1[k]
            if gk >= p:
                gk -= p
            g[k] = gk
            e = d1[k] + d2[k]
            if e >= p:
                e -= p
            d1[k] = e
            f = d2[k] + d3
            if f >= p:
                f -= p
            d2[k] = f
    for x in range(K * m, p):
        acc += ch[_g(x, b2, b4, b6, p)]
    return acc


@numba.njit(nogil=True, cache=True)
def traces_batch(primes, b2, b4, b6, out):
    """out[i] = a_E(primes[i]) = -chi_sum for the i-th reduced curve."""
    for i in range(primes.shape[0]):
        p = primes[i]
        ch = chi_table(p)
        out[i] = -chi_sum(ch, b2[i], b4[i], b6[i], p)


def traces(primes, b2, b4, b6) -> np.ndarray:
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    if primes.size and int(primes.max()) > MAX_KERNEL_PRIME:
        raise ValueError(f"kernel supports p <= {MAX_KERNEL_PRIME}")
    out = np.empty(primes.size, dtype=np.int64)
    traces_batch(
        primes,
        np.ascontiguousarray(b2, dtype=np.int64),
        np.ascontiguousarray(b4, dtype=np.int64),
        np.ascontiguousarray(b6, dtype=np.int64),
        out,
    )
    return out
