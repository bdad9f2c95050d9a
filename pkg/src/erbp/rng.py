"""Counter-based random numbers.

Each draw is a pure function of ``(seed, stream, step, index)`` built from the
SplitMix64 finalizer, so results do not depend on evaluation order, thread
count or platform.  Only unsigned 64-bit integer arithmetic is used.
"""
import numpy as np
from numba import njit, uint64

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# stream identifiers; one per independent use of randomness
DATA = 1
BLANKOUT = 2
BACKGROUND = 3
BACKGROUND_SIGN = 4
LABEL = 5
PATTERN = 6
INIT = 7

TWO53 = float(2**53)


@njit(cache=True)
def mix64(z):
    z = uint64(z)
    z = (z ^ (z >> uint64(30))) * _M1
    z = (z ^ (z >> uint64(27))) * _M2
    return z ^ (z >> uint64(31))


@njit(cache=True)
def hash4(seed, stream, step, index):
    h = mix64(uint64(seed) + _GOLDEN)
    h = mix64(h ^ (uint64(stream) * _GOLDEN))
    h = mix64(h ^ uint64(step))
    return mix64(h + uint64(index) * _GOLDEN)


@njit(cache=True)
def uniform(seed, stream, step, index):
    """Uniform double in [0, 1) with 53 random bits."""
    return float(hash4(seed, stream, step, index) >> uint64(11)) / 9007199254740992.0


def bernoulli_threshold(p):
    """Integer threshold ``t`` such that ``(hash >> 11) < t`` has probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return int(round(p * 2**53))


@njit(cache=True)
def bernoulli(seed, stream, step, index, threshold):
    return (hash4(seed, stream, step, index) >> uint64(11)) < uint64(threshold)


def uniform_array(seed, stream, step, n):
    """Vector of ``n`` uniforms for one (stream, step); index runs 0..n-1."""
    out = np.empty(n)
    _fill_uniform(seed, stream, step, out)
    return out


@njit(cache=True)
def _fill_uniform(seed, stream, step, out):
    for i in range(out.shape[0]):
        out[i] = uniform(seed, stream, step, i)
