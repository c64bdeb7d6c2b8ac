"""Counter-based deterministic random streams.

Every draw is a pure function of (seed, domain, counter indices), so results
are identical regardless of evaluation order or how work is split across
threads.  Values are derived by hashing the indices with BLAKE2b and mapping
64-bit words to [0, 1).
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

_U64 = struct.Struct("<Q")
_KEY = struct.Struct("<Qqq")
_MASK = (1 << 64) - 1
_SCALE = 1.0 / 2.0**64


def unit_draws(seed: int, i: int, j: int, n: int = 2, domain: bytes = b"mc") -> np.ndarray:
    """``n`` uniforms in [0, 1) for counter cell (i, j) of a seeded stream."""
    if not 1 <= n <= 8:
        raise ValueError("n must be in 1..8")
    h = hashlib.blake2b(
        _KEY.pack(seed & _MASK, i, j), digest_size=8 * n, person=domain
    ).digest()
    words = struct.unpack(f"<{n}Q", h)
    return np.array([w * _SCALE for w in words])


def draw_grid(seed: int, i_indices, n_j: int, n: int = 2, domain: bytes = b"mc") -> np.ndarray:
    """Draws for counter cells (i, j), i in ``i_indices``, j in range(n_j).

    Returns shape ``(len(i_indices), n_j, n)``.  Because each cell is hashed
    independently, any slicing of ``i_indices`` yields the same values as the
    full grid.
    """
    i_indices = list(i_indices)
    out = np.empty((len(i_indices), n_j, n))
    pack = _KEY.pack
    masked = seed & _MASK
    size = 8 * n
    fmt = f"<{n}Q"
    for row, i in enumerate(i_indices):
        for j in range(n_j):
            h = hashlib.blake2b(pack(masked, i, j), digest_size=size, person=domain).digest()
            out[row, j, :] = struct.unpack(fmt, h)
    out *= _SCALE
    return out
