"""Counter-based Threefry-2x32-20 streams.

A draw is addressed by ``(seed, stream, path, lane, index)``: the key is
``(seed_lo, seed_hi + stream * 0x9E3779B9)`` and the counter is
``(path, lane << 28 | index)``.  Paths therefore never share random numbers,
and the value of a draw does not depend on how paths are scheduled across
workers.  Lanes separate the main jump stream from thinning decisions and
Gaussian increments so that switching those on or off leaves the main stream
untouched.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

MASK32 = 0xFFFFFFFF
ROTATIONS = (13, 15, 26, 6, 17, 29, 16, 24)
PARITY = 0x1BD11BDA
GOLDEN = 0x9E3779B9

LANE_MAIN = 0
LANE_THIN = 1
LANE_GAUSS = 2
LANE_BITS = 28
MAX_DRAWS = 1 << LANE_BITS
MAX_PATHS = 1 << 32

_U52 = 2.0 ** -52


def threefry2x32(k0: int, k1: int, c0: int, c1: int) -> tuple[int, int]:
    """One block of Threefry-2x32 with 20 rounds (scalar, pure Python)."""
    ks = (k0, k1, PARITY ^ k0 ^ k1)
    x0 = (c0 + k0) & MASK32
    x1 = (c1 + k1) & MASK32
    for r in range(20):
        x0 = (x0 + x1) & MASK32
        rot = ROTATIONS[r % 8]
        x1 = ((x1 << rot) | (x1 >> (32 - rot))) & MASK32
        x1 ^= x0
        if r % 4 == 3:
            s = (r + 1) // 4
            x0 = (x0 + ks[s % 3]) & MASK32
            x1 = (x1 + ks[(s + 1) % 3] + s) & MASK32
    return x0, x1


def threefry2x32_many(k0: int, k1: int, c0, c1) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`threefry2x32` over counter arrays."""
    c0 = np.asarray(c0, dtype=np.uint32)
    c1 = np.asarray(c1, dtype=np.uint32)
    ks = (np.uint32(k0), np.uint32(k1), np.uint32(PARITY ^ k0 ^ k1))
    with np.errstate(over="ignore"):
        x0 = c0 + ks[0]
        x1 = c1 + ks[1]
        for r in range(20):
            x0 = x0 + x1
            rot = np.uint32(ROTATIONS[r % 8])
            x1 = (x1 << rot) | (x1 >> np.uint32(32 - ROTATIONS[r % 8]))
            x1 = x1 ^ x0
            if r % 4 == 3:
                s = (r + 1) // 4
                x0 = x0 + ks[s % 3]
                x1 = x1 + ks[(s + 1) % 3] + np.uint32(s)
    return x0, x1


def to_uniform(w0, w1):
    """Map two 32-bit words to a double strictly inside ``(0, 1)`` (52 bits)."""
    if isinstance(w0, np.ndarray):
        k = (w0 >> np.uint32(6)).astype(np.float64) * 67108864.0 + (w1 >> np.uint32(6))
        return (k + 0.5) * _U52
    return (((w0 >> 6) * 67108864 + (w1 >> 6)) + 0.5) * _U52


def stream_key(seed: int, stream: int = 0) -> tuple[int, int]:
    """Threefry key for ``(seed, stream)``."""
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if int(stream) < 0:
        raise DomainError("stream id must be nonnegative")
    return seed & MASK32, ((seed >> 32) + int(stream) * GOLDEN) & MASK32


class PathStream:
    """Sequential uniforms for one path, one counter per lane.

    Examples
    --------
    >>> s = PathStream(seed=1, stream=0, path=0)
    >>> 0.0 < s.uniform() < 1.0
    True
    """

    __slots__ = ("k0", "k1", "path", "counts")

    def __init__(self, seed: int, stream: int, path: int):
        if not 0 <= path < MAX_PATHS:
            raise DomainError("path index must fit in 32 bits")
        self.k0, self.k1 = stream_key(seed, stream)
        self.path = int(path)
        self.counts = [0, 0, 0]

    def uniform(self, lane: int = LANE_MAIN) -> float:
        n = self.counts[lane]
        if n >= MAX_DRAWS:
            raise OverflowError("per-lane draw budget exhausted")
        self.counts[lane] = n + 1
        w0, w1 = threefry2x32(self.k0, self.k1, self.path, (lane << LANE_BITS) | n)
        return to_uniform(w0, w1)


def uniforms(seed: int, stream: int, paths, lane: int, index) -> np.ndarray:
    """Bulk uniforms for given path indices and draw indices (broadcast)."""
    k0, k1 = stream_key(seed, stream)
    p, i = np.broadcast_arrays(np.asarray(paths, np.uint64), np.asarray(index, np.uint64))
    c1 = (np.uint64(lane) << np.uint64(LANE_BITS)) | i
    w0, w1 = threefry2x32_many(k0, k1, p.astype(np.uint32), c1.astype(np.uint32))
    return to_uniform(w0, w1)
