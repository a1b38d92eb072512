"""Reproducible random streams.

Every stream is a Philox-4x64 counter-based generator whose 128-bit key is
``(seed, stream)``, set directly without any seed hashing.  Uniform doubles
are ``(u64 >> 11) * 2**-53``; normals come from Box-Muller on pairs of
uniforms, so the same numbers can be regenerated by any Philox-4x64 port.

Sub-streams used by the package:

========  ==============================
stream    purpose
========  ==============================
0         point generation
1         coefficient vectors (alpha)
2         shuffle controls
3         Monte Carlo oracles
========  ==============================
"""

from __future__ import annotations

import numpy as np

POINTS, ALPHA, SHUFFLE, MONTE_CARLO = 0, 1, 2, 3

_MASK64 = (1 << 64) - 1


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Generator for ``(seed, stream_id)``."""
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream_id & _MASK64]))


def uniform(gen: np.random.Generator, size) -> np.ndarray:
    return gen.random(size)


def normal(gen: np.random.Generator, size) -> np.ndarray:
    """Standard normals by Box-Muller (cos branch then sin branch)."""
    count = int(np.prod(size))
    half = (count + 1) // 2
    u1 = 1.0 - gen.random(half)  # in (0, 1]
    u2 = gen.random(half)
    rad = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([rad * np.cos(2 * np.pi * u2), rad * np.sin(2 * np.pi * u2)])
    return z[:count].reshape(size)


def permutation(gen: np.random.Generator, n: int) -> np.ndarray:
    """Fisher-Yates permutation driven by the uniform stream."""
    perm = np.arange(n)
    u = gen.random(n)
    for i in range(n - 1, 0, -1):
        j = int(u[i] * (i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm
