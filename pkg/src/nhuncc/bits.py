"""Bit-vector columns and the counter-based generator shared by all modules.

Convention: an ``n``-bit column is stored as a Python int whose most
significant bit is column index 0 (the topmost link).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


@dataclass(frozen=True)
class ColumnWord:
    """Fixed-length bit vector (message, codeword or wire column)."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0 or not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_bits(cls, bits) -> "ColumnWord":
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0/1")
        return cls(bits_to_int(bits), len(bits))

    def bits(self) -> np.ndarray:
        return int_to_bits(self.value, self.length)

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def __xor__(self, other: "ColumnWord") -> "ColumnWord":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return ColumnWord(self.value ^ other.value, self.length)

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""


def bits_to_int(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def int_to_bits(value: int, length: int) -> np.ndarray:
    return np.array([(value >> (length - 1 - i)) & 1 for i in range(length)], dtype=np.uint8)


def splitmix64(x: int) -> int:
    """SplitMix64 output function applied to a 64-bit state."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(*parts: int) -> int:
    """Fold integers into one 64-bit key: ``k = splitmix64(k ^ part)`` left to right."""
    k = 0
    for part in parts:
        k = splitmix64(k ^ (int(part) & MASK64))
    return k


def splitmix64_array(key: int, counters: np.ndarray) -> np.ndarray:
    """Counter-mode SplitMix64: element ``i`` is ``splitmix64(key + counters[i] * golden)``."""
    with np.errstate(over="ignore"):
        z = np.uint64(key) + counters.astype(np.uint64) * np.uint64(_GOLDEN) + np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        return z ^ (z >> np.uint64(31))


def column_rng(*parts: int) -> np.random.Generator:
    """Independent numpy generator for a (seed, trial, column, ...) sub-stream."""
    return np.random.Generator(np.random.Philox(key=stream_key(*parts)))
