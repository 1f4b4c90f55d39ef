"""Deterministic, splittable randomness.

Every random quantity in prodex is a pure function of a 64-bit master
seed and a derivation path, computed with keyed blake2b.  There is no
mutable generator state, so

* realizing coordinate 5 of a lazy point and then coordinate 2 yields
  the same symbols as the opposite order,
* verification campaigns parallelize without order effects: sample j
  always uses the substream seed ``derive_seed(master, "sample", j)``.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

MASK64 = (1 << 64) - 1


def _digest(seed: int, path: bytes) -> bytes:
    key = (seed & MASK64).to_bytes(8, "little")
    return hashlib.blake2b(path, digest_size=8, key=key).digest()


def derive_seed(seed: int, *path) -> int:
    """Derive a 64-bit substream seed from a seed and a label path."""
    label = "/".join(str(p) for p in path).encode("utf-8")
    return int.from_bytes(_digest(seed, label), "little")


def unit_fraction(seed: int, *path) -> Fraction:
    """Uniform draw in [0, 1) as an exact dyadic rational k / 2**64."""
    label = "u/" + "/".join(str(p) for p in path)
    k = int.from_bytes(_digest(seed, label.encode("utf-8")), "little")
    return Fraction(k, 1 << 64)
