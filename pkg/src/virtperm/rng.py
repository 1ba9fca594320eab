"""Counter-based random streams.

Every draw is a pure function of ``(key, counter)`` through the Philox4x64-10
block cipher, so a value attached to element ``x`` or trial ``t`` does not
depend on how many other values were drawn before it, nor on which worker
drew it.  Streams split into independent children by hashing the parent key.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_ROUNDS = 10

# counter word 3 separates draws from key derivation
_DRAW_TAG = 0
_SPLIT_TAG = 0x5EED5EED

_TO_UNIT = 2.0 ** -52


def _mulhilo(a, b):
    """Full 64x64 -> 128 bit product of uint64 arrays, as (hi, lo)."""
    a_lo, a_hi = a & _MASK32, a >> _SHIFT32
    b_lo, b_hi = b & _MASK32, b >> _SHIFT32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _SHIFT32) + (lh & _MASK32) + (hl & _MASK32)
    hi = hh + (lh >> _SHIFT32) + (hl >> _SHIFT32) + (mid >> _SHIFT32)
    return hi, a * b


def philox4x64(counter, key):
    """Philox4x64-10 on broadcastable uint64 arrays.

    ``counter`` has shape ``(..., 4)`` and ``key`` shape ``(..., 2)``; the
    result has the broadcast shape with a trailing axis of 4 words.
    Matches ``numpy.random.Philox`` block for block.
    """
    counter = np.asarray(counter, dtype=np.uint64)
    key = np.asarray(key, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x0, x1, x2, x3 = (counter[..., i] for i in range(4))
        k0, k1 = key[..., 0], key[..., 1]
        for r in range(_ROUNDS):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, x0)
            hi1, lo1 = _mulhilo(_M1, x2)
            x0, x1, x2, x3 = hi1 ^ x1 ^ k0, lo1, hi0 ^ x3 ^ k1, lo0
        return np.stack(np.broadcast_arrays(x0, x1, x2, x3), axis=-1)


def to_unit(words):
    """Map uint64 words to doubles in the open interval (0, 1).

    Uses the top 52 bits plus one half, which is exact in a double; with 53
    bits the largest word would round up to 1.0.
    """
    return ((np.asarray(words, dtype=np.uint64) >> np.uint64(12)).astype(np.float64) + 0.5) * _TO_UNIT


def _counters(index, slot, tag=_DRAW_TAG):
    index = np.asarray(index, dtype=np.uint64)
    out = np.zeros(index.shape + (4,), dtype=np.uint64)
    out[..., 0] = index
    out[..., 1] = np.uint64(slot)
    out[..., 3] = np.uint64(tag)
    return out


def keyed_uniforms(keys, index, slot=0, words=1):
    """Uniforms for many keys at once.

    ``keys`` is a ``(..., 2)`` uint64 array broadcast against ``index``;
    returns ``words`` uniforms per (key, index) pair along a trailing axis
    (or no trailing axis when ``words == 1``).
    """
    block = philox4x64(_counters(index, slot), keys)
    u = to_unit(block[..., :words])
    return u[..., 0] if words == 1 else u


@dataclass(frozen=True)
class Stream:
    """A splittable source of randomness identified by a 128-bit key."""

    key: tuple[int, int]

    @classmethod
    def from_seed(cls, seed: int) -> "Stream":
        if not 0 <= int(seed) < 2 ** 64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
        return cls((int(seed), 0))

    def child(self, *path: int) -> "Stream":
        """Independent sub-stream addressed by a path of non-negative ints."""
        key = self.key
        for tag in path:
            block = philox4x64(_counters(int(tag), 0, _SPLIT_TAG), np.array(key, dtype=np.uint64))
            key = (int(block[0]), int(block[1]))
        return Stream(key)

    def children(self, indices) -> np.ndarray:
        """Keys ``(T, 2)`` of ``child(i)`` for each ``i``, computed in one pass."""
        idx = np.asarray(indices, dtype=np.uint64).reshape(-1)
        block = philox4x64(_counters(idx, 0, _SPLIT_TAG), self.key_array())
        return np.ascontiguousarray(block[:, :2])

    def key_array(self) -> np.ndarray:
        return np.array(self.key, dtype=np.uint64)

    def uniforms(self, index, slot: int = 0, words: int = 1) -> np.ndarray:
        """Uniform(0, 1) draws attached to counters ``index`` (an int array)."""
        return keyed_uniforms(self.key_array(), index, slot, words)


def as_stream(rng) -> Stream:
    """Accept a Stream or an integer seed."""
    if isinstance(rng, Stream):
        return rng
    if isinstance(rng, (int, np.integer)) and not isinstance(rng, bool):
        return Stream.from_seed(int(rng))
    raise TypeError(f"expected a Stream or an integer seed, got {type(rng).__name__}")


def stack_keys(streams) -> np.ndarray:
    """``(T, 2)`` key array for a batch of streams."""
    return np.array([s.key for s in streams], dtype=np.uint64).reshape(-1, 2)
