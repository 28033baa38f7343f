"""Pinned random streams.

Every random draw in vidshift goes through :class:`Stream`. The stream is a
PCG64 bit generator consumed through ``random_raw`` only, so the sampling
algorithms below (53-bit uniforms, Box-Muller normals, inversion Poisson,
Fisher-Yates) are fixed by this file rather than by numpy's ``Generator``
method implementations, which numpy does not promise to keep stable.
"""

from __future__ import annotations

import math

import numpy as np

_TWO_NEG_53 = 1.0 / (1 << 53)

# Above this mean the inversion search gets long; a rounded normal is used.
POISSON_INVERSION_LIMIT = 256.0


class Stream:
    """Deterministic random stream seeded by a 64-bit integer."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._bits = np.random.PCG64(self.seed)

    def raw(self, n: int) -> np.ndarray:
        return self._bits.random_raw(int(n))

    def uniform(self, shape=()) -> np.ndarray | float:
        """Uniform doubles in [0, 1) built from the top 53 bits of each word."""
        n = int(np.prod(shape)) if shape != () else 1
        u = (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53
        if shape == ():
            return float(u[0])
        return u.reshape(shape)

    def uniform_range(self, low: float, high: float, shape=()):
        return low + (high - low) * self.uniform(shape)

    def integers(self, low: int, high: int, shape=()):
        """Integers uniform on the closed range [low, high]."""
        span = high - low + 1
        v = np.floor(self.uniform(shape) * span).astype(np.int64) + low
        # guard the u -> 1 edge under float rounding
        v = np.minimum(v, high)
        if shape == ():
            return int(v)
        return v

    def normal(self, shape=()) -> np.ndarray | float:
        """Standard normals via Box-Muller, consuming two words per pair."""
        n = int(np.prod(shape)) if shape != () else 1
        pairs = (n + 1) // 2
        u = self.uniform((2 * pairs,))
        u1 = 1.0 - u[:pairs]  # (0, 1], keeps log finite
        u2 = u[pairs:]
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        if shape == ():
            return float(z[0])
        return z.reshape(shape)

    def poisson(self, mean: np.ndarray) -> np.ndarray:
        """Poisson counts for an array of means.

        Means up to ``POISSON_INVERSION_LIMIT`` use sequential-search
        inversion on one uniform each; larger means use
        ``max(0, round(mu + sqrt(mu) * z))``. Both branches draw their
        randomness for every element so the stream position does not depend
        on the data.
        """
        mean = np.asarray(mean, dtype=np.float64)
        flat = mean.ravel()
        u = self.uniform((flat.size,))
        z = self.normal((flat.size,))
        out = np.zeros(flat.size, dtype=np.int64)

        small = flat <= POISSON_INVERSION_LIMIT
        big = ~small
        if big.any():
            mu = flat[big]
            out[big] = np.maximum(0, np.floor(mu + np.sqrt(mu) * z[big] + 0.5)).astype(np.int64)

        idx = np.flatnonzero(small & (flat > 0))
        if idx.size:
            mu = flat[idx]
            uu = u[idx]
            p = np.exp(-mu)
            cdf = p.copy()
            k = np.zeros(idx.size, dtype=np.int64)
            active = np.flatnonzero(uu > cdf)
            cap = int(POISSON_INVERSION_LIMIT + 40 * math.sqrt(POISSON_INVERSION_LIMIT)) + 64
            it = 0
            while active.size and it < cap:
                k[active] += 1
                p[active] *= mu[active] / k[active]
                cdf[active] += p[active]
                active = active[uu[active] > cdf[active]]
                it += 1
            out[idx] = k
        return out.reshape(mean.shape)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``range(n)``, high index first."""
        perm = np.arange(n, dtype=np.int64)
        if n < 2:
            return perm
        u = self.uniform((n - 1,))
        for step, i in enumerate(range(n - 1, 0, -1)):
            j = min(int(u[step] * (i + 1)), i)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
