"""Unscrambled Sobol' points from Joe-Kuo direction numbers.

Points are produced in Gray-code order, so the point at index ``k`` is the XOR
of the direction numbers selected by the bits of ``k ^ (k >> 1)``. A design
with skip offset ``seed`` holds indices ``seed + 1 .. seed + n``; index 0 (the
origin) is never emitted.
"""
from __future__ import annotations

import functools
import os
from dataclasses import dataclass

import numpy as np

BITS = 32
DEFAULT_TABLE = os.path.join(os.path.dirname(__file__), "data", "new-joe-kuo-6.40")


@dataclass(frozen=True, eq=False)
class SobolDesign:
    dimension: int
    n: int
    seed: int
    points: np.ndarray


def read_direction_table(path: str = DEFAULT_TABLE) -> list[tuple[int, int, int, list[int]]]:
    """Parse a Joe-Kuo table (``d s a m_1 .. m_s`` per line, one header line)."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or not parts[0].isdigit():
                continue
            d, s, a, *m = (int(p) for p in parts)
            if len(m) != s:
                raise ValueError(f"{path}:{lineno}: expected {s} m values, found {len(m)}")
            rows.append((d, s, a, m))
    return rows


@functools.lru_cache(maxsize=8)
def direction_numbers(max_dim: int, path: str = DEFAULT_TABLE) -> np.ndarray:
    """Integer direction numbers ``V[dim, bit]`` scaled to ``2**BITS``."""
    table = read_direction_table(path)
    if max_dim > len(table) + 1:
        raise ValueError(
            f"direction table {path} supports at most {len(table) + 1} dimensions, "
            f"requested {max_dim}"
        )
    V = np.zeros((max_dim, BITS), dtype=np.uint64)
    # first coordinate: van der Corput, m_k = 1
    for k in range(BITS):
        V[0, k] = 1 << (BITS - 1 - k)
    for j in range(1, max_dim):
        _, s, a, m = table[j - 1]
        mm = list(m)
        for k in range(s, BITS):
            new = mm[k - s] ^ (mm[k - s] << s)
            for t in range(1, s):
                if (a >> (s - 1 - t)) & 1:
                    new ^= mm[k - t] << t
            mm.append(new)
        for k in range(BITS):
            V[j, k] = mm[k] << (BITS - 1 - k)
    V.setflags(write=False)
    return V


def sobol_points(d: int, n: int, seed: int = 0, path: str = DEFAULT_TABLE) -> SobolDesign:
    """Points ``seed + 1 .. seed + n`` of the ``d``-dimensional Sobol' sequence."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    if seed + n >= 2 ** BITS:
        raise ValueError("seed + n exceeds the 2**32 points available")
    V = direction_numbers(d, path)
    k = np.arange(seed + 1, seed + n + 1, dtype=np.uint64)
    gray = k ^ (k >> np.uint64(1))
    acc = np.zeros((n, d), dtype=np.uint64)
    for b in range(BITS):
        shifted = gray >> np.uint64(b)
        if not shifted.any():
            break
        bit = (shifted & np.uint64(1)).astype(bool)
        acc[bit] ^= V[:, b]
    points = acc.astype(float) / float(2 ** BITS)
    points.setflags(write=False)
    return SobolDesign(d, n, seed, points)


def scale_to_domain(design, lo: float = -5.0, hi: float = 5.0) -> np.ndarray:
    """Map unit-cube points affinely onto ``[lo, hi]^d``."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    u = design.points if isinstance(design, SobolDesign) else np.asarray(design, dtype=float)
    return lo + (hi - lo) * u
