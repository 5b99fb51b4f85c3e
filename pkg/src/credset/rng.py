"""Counter-based uniform and normal streams.

Every variate is a pure function of ``(seed, *counters)``: no generator state
is carried between draws, so results do not depend on iteration order or on
how work is split across threads. The mixing function is the SplitMix64
finalizer, applied once per key component.
"""

from __future__ import annotations

import numpy as np

__all__ = ["uniform", "standard_normal", "MASK64"]

MASK64 = (1 << 64) - 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _as_u64(x) -> np.ndarray:
    if isinstance(x, int):
        return np.atleast_1d(np.asarray(x & MASK64, dtype=np.uint64))
    arr = np.atleast_1d(np.asarray(x))
    if arr.dtype.kind == "u":
        return arr.astype(np.uint64)
    if arr.dtype.kind == "i":
        # two's-complement wrap for negative keys
        return arr.astype(np.int64).view(np.uint64)
    raise TypeError(f"counter must be integral, got dtype {arr.dtype}")


def _hash(seed, counters) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = _mix(_as_u64(seed) + _GOLDEN)
        for pos, c in enumerate(counters, start=1):
            key = _mix(_as_u64(c) + _GOLDEN * np.uint64(pos + 1))
            h = _mix(h ^ key)
    return h


def uniform(seed, *counters) -> np.ndarray:
    """Uniform variates on [0, 1) keyed by ``seed`` and integer counters.

    All arguments broadcast against each other; the result has the broadcast
    shape (at least 1-d). Uses the top 53 bits of the hash.
    """
    h = _hash(seed, counters)
    return (h >> _S11).astype(np.float64) * (1.0 / 9007199254740992.0)


def standard_normal(seed, *counters) -> np.ndarray:
    """Standard normal variates by Box-Muller on two keyed uniform streams.

    The final counter slot distinguishes the two uniforms, so each
    ``(seed, *counters)`` key yields exactly one normal.
    """
    u1 = 1.0 - uniform(seed, *counters, 0)
    u2 = uniform(seed, *counters, 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
