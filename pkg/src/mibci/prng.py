"""SplitMix64 generator and Box-Muller normals.

SplitMix64 (Steele, Lea & Flood 2014) is a counter-based 64-bit generator:
output ``k`` (0-based) is ``mix(seed + (k + 1) * 0x9E3779B97F4A7C15)`` with

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

all modulo 2**64.  Because each output depends only on ``(seed, k)`` the
stream can be produced in vectorized blocks without changing a single bit.

Uniforms take the top 53 bits.  Normals come in Box-Muller pairs from two
consecutive outputs ``x1, x2``::

    u1 = ((x1 >> 11) + 1) / 2**53     # in (0, 1]
    u2 = (x2 >> 11) / 2**53           # in [0, 1)
    r = sqrt(-2 ln u1)
    (r cos(2 pi u2), r sin(2 pi u2))
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["SplitMix64", "splitmix64_reference"]

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53


def splitmix64_reference(seed, n):
    """Plain-integer implementation, kept as an independent check of the
    vectorized path."""
    state = seed & _MASK
    out = []
    for _ in range(n):
        state = (state + GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * _M1) & _MASK
        z = ((z ^ (z >> 27)) * _M2) & _MASK
        out.append(z ^ (z >> 31))
    return out


class SplitMix64:
    """Seedable stream; every draw advances an internal counter."""

    def __init__(self, seed=0):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def u64(self, n):
        k = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + k * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        return z ^ (z >> np.uint64(31))

    def uniform(self, n):
        """``n`` doubles in [0, 1)."""
        return (self.u64(n) >> np.uint64(11)).astype(float) * _TWO_M53

    def normal(self, n):
        """``n`` standard normal doubles (consumes ``2 * ceil(n / 2)`` outputs)."""
        pairs = (n + 1) // 2
        x = self.u64(2 * pairs).reshape(pairs, 2)
        u1 = ((x[:, 0] >> np.uint64(11)).astype(float) + 1.0) * _TWO_M53
        u2 = (x[:, 1] >> np.uint64(11)).astype(float) * _TWO_M53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        return np.column_stack((r * np.cos(theta), r * np.sin(theta))).ravel()[:n]

    def below(self, bound):
        """Integer in ``[0, bound)`` by rejection (no modulo bias)."""
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = int(self.u64(1)[0])
            if x < limit:
                return x % bound

    def shuffle(self, items):
        """Fisher-Yates, returns a new list."""
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
