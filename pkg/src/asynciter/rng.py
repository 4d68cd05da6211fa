"""Random number streams and seed splitting.

Every random draw in the package comes from numpy's Philox4x64-10 bit
generator keyed directly with a 64-bit seed (``Philox(key=seed)``, counter
starting at zero).  Uniform doubles are numpy's ``(next_uint64 >> 11) * 2**-53``.

Per-trial seeds are split from a master seed with SHA-256: the digest of the
big-endian 8-byte encodings of ``(seed, index)`` is truncated to its first
8 bytes, read big-endian.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

RNG_ALGORITHM = "Philox4x64-10 (numpy.random.Philox, key=seed, counter=0)"
RNG_VERSION = f"numpy {np.__version__}"
SEED_SPLIT_ALGORITHM = "sha256-split-v1: first 8 bytes (big-endian) of sha256(u64be(seed) || u64be(index))"

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=check_seed(seed)))


def split_seed(seed: int, index: int) -> int:
    """Derive an independent child seed for ``index`` from ``seed``."""
    payload = struct.pack(">QQ", check_seed(seed), check_seed(index))
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def describe() -> dict:
    return {
        "algorithm": RNG_ALGORITHM,
        "version": RNG_VERSION,
        "seed_split": SEED_SPLIT_ALGORITHM,
    }
