"""Integer primitives of the digital learning core.

Everything here works on plain integers: states are signed 16-bit, weights
signed 8-bit, and couplings are stored as small signed shift exponents.
The scalar functions are compiled with numba so the quantized network
kernels can call them directly; they are equally usable from Python.
"""
import numpy as np
from numba import njit

STATE_MIN = -32768
STATE_MAX = 32767
WEIGHT_MIN = -128
WEIGHT_MAX = 127
# 5-bit two's complement range for stored shift exponents
SHIFT_MIN = -16
SHIFT_MAX = 15


class InvalidBounds(ValueError):
    pass


def check_shift(a):
    """Raise if ``a`` cannot be stored as a 5-bit shift exponent."""
    a = int(a)
    if not SHIFT_MIN <= a <= SHIFT_MAX:
        raise ValueError(f"shift exponent {a} outside 5-bit range [{SHIFT_MIN}, {SHIFT_MAX}]")
    return a


@njit(cache=True)
def sat16(x):
    if x > STATE_MAX:
        return STATE_MAX
    if x < STATE_MIN:
        return STATE_MIN
    return x


@njit(cache=True)
def diamond(a, x):
    """Multiply ``x`` by ``2**a`` using shifts only.

    Left shifts saturate to the 16-bit state range.  Right shifts act on the
    magnitude so that small negative values go to 0 instead of -1.
    """
    if a >= 0:
        if x == 0:
            return 0
        # shifting anything by >= 16 bits cannot fit; avoid int64 overflow too
        if a >= 16:
            return STATE_MAX if x > 0 else STATE_MIN
        return sat16(x << a)
    if x < 0:
        return -((-x) >> (-a))
    return x >> (-a)


@njit(cache=True)
def leak_m(x, y):
    # a zero decay on a nonzero state is forced to one unit toward zero
    if x == 0 and y != 0:
        return 1 if y > 0 else -1
    return x


@njit(cache=True)
def _clip(x, lo, hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def clip(x, lo, hi):
    if lo > hi:
        raise InvalidBounds(f"lo={lo} > hi={hi}")
    return _clip(x, lo, hi)


@njit(cache=True)
def clip_weight(x):
    return _clip(x, WEIGHT_MIN, WEIGHT_MAX)


# Vectorised forms, used for sweeps and for building lookup tables.

def diamond_array(a, x):
    x = np.asarray(x, dtype=np.int64)
    if a >= 0:
        return np.clip(x << min(a, 16), STATE_MIN, STATE_MAX)
    return np.sign(x) * (np.abs(x) >> (-a))


def leak_m_array(x, y):
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    return np.where((x == 0) & (y != 0), np.sign(y), x)


def clip_array(x, lo, hi):
    if lo > hi:
        raise InvalidBounds(f"lo={lo} > hi={hi}")
    return np.clip(np.asarray(x, dtype=np.int64), lo, hi)
