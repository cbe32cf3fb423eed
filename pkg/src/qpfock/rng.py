"""Deterministic random streams.

All randomness goes through numpy's PCG64 bit generator (PCG XSL RR 128/64),
which produces the same stream on every platform for a given 64-bit seed.
"""
import numpy as np


def rng_stream(seed):
    """Return a ``numpy.random.Generator`` backed by PCG64 seeded with ``seed``."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(seed))


def uniform_draws(seed, n):
    """First ``n`` uniform draws on [0, 1) of the stream for ``seed``."""
    return rng_stream(seed).random(n)
