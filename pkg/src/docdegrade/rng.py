"""Deterministic, label-addressable random streams.

Every random decision in the package is drawn from an :class:`RngStream`.
A stream is a PCG64 generator seeded with a 64-bit integer; child streams are
derived from ``(parent seed, label, ...)`` with a SplitMix64 finalizer so that
the seed of any unit of work depends only on its address, never on the order
in which work is scheduled.

Derivation rule (frozen)::

    h = mix64(seed)
    for label in labels:
        h = mix64(h ^ mix64(value(label) + GOLDEN_GAMMA))

where ``value(int) = int mod 2**64`` and ``value(str)`` is the little-endian
integer of the 8-byte BLAKE2b digest of the UTF-8 encoded string.
"""
from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
ALGORITHM = "pcg64+splitmix64-derive"

Label = Union[int, str]


def mix64(z: int) -> int:
    """SplitMix64 finalizer (avalanche mix of a 64-bit word)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stable_hash64(text: str) -> int:
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _label_value(label: Label) -> int:
    if isinstance(label, bool):
        raise TypeError("bool is not a valid stream label")
    if isinstance(label, int):
        return label & MASK64
    if isinstance(label, str):
        return stable_hash64(label)
    raise TypeError(f"stream labels must be int or str, got {type(label).__name__}")


def derive_seed(seed: int, *labels: Label) -> int:
    h = mix64(seed & MASK64)
    for label in labels:
        h = mix64(h ^ mix64((_label_value(label) + GOLDEN_GAMMA) & MASK64))
    return h


class RngStream:
    """Single-owner random stream with a known 64-bit seed."""

    algorithm = ALGORITHM

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed:#018x})"

    def child(self, *labels: Label) -> "RngStream":
        return RngStream(derive_seed(self.seed, *labels))

    def random(self, size=None):
        """Uniform floats in [0, 1)."""
        return self._gen.random(size)

    def uniform(self, lo: float, hi: float, size=None):
        """Uniform floats in [lo, hi); returns ``lo`` when the range is empty."""
        u = self._gen.random(size)
        return lo + (hi - lo) * u

    def integers(self, lo: int, hi: int, size=None):
        """Uniform integers in the closed range [lo, hi]."""
        return self._gen.integers(lo, hi, size=size, endpoint=True)

    def choice_without_replacement(self, n: int, k: int) -> np.ndarray:
        return self._gen.choice(n, size=k, replace=False)
