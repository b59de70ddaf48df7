"""Memoryless BSC toward Bob and noiseless eavesdropper taps."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bits import ColumnWord, bits_to_int, int_to_bits


@dataclass
class ChannelRun:
    """Diagnostics for a sequence of column transmissions."""

    flip_prob: float
    rng_seed: int
    flips_applied: list = field(default_factory=list)
    noise: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.flip_prob < 0.5:
            raise ValueError(f"BSC needs 0 <= p < 1/2, got {self.flip_prob}")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["column", "flips", "noise"])
            for i, (k, z) in enumerate(zip(self.flips_applied, self.noise)):
                w.writerow([i, k, format(z.value, f"0{z.length}b")])


def bsc_noise(n: int, p: float, rng: np.random.Generator) -> int:
    """An ``n``-bit noise pattern with i.i.d. Bernoulli(p) bits (MSB = bit 0)."""
    if not 0.0 <= p < 0.5:
        raise ValueError(f"BSC needs 0 <= p < 1/2, got {p}")
    if p == 0.0 or n == 0:
        return 0
    z = 0
    for i in np.flatnonzero(rng.random(n) < p).tolist():
        z |= 1 << (n - 1 - i)
    return z


def bsc_transmit(column: ColumnWord, p: float, rng: np.random.Generator, run: ChannelRun | None = None) -> ColumnWord:
    z = bsc_noise(column.length, p, rng)
    if run is not None:
        run.flips_applied.append(z.bit_count())
        run.noise.append(ColumnWord(z, column.length))
    return ColumnWord(column.value ^ z, column.length)


@dataclass(frozen=True)
class EveView:
    kind: str  # "weak" or "strong"
    observed_rows: tuple
    rows: np.ndarray  # (len(observed_rows), num_columns) uint8, noiseless


def columns_to_matrix(columns, n: int) -> np.ndarray:
    """Stack n-bit column ints into an ``(n, len(columns))`` 0/1 matrix."""
    if len(columns) == 0:
        return np.zeros((n, 0), dtype=np.uint8)
    return np.stack([int_to_bits(int(c), n) for c in columns], axis=1)


def matrix_to_columns(matrix: np.ndarray) -> list[int]:
    return [bits_to_int(matrix[:, j]) for j in range(matrix.shape[1])]


def tap_weak(transmitted: np.ndarray, omega) -> EveView:
    """Noiseless copy of the rows in ``omega`` of the pre-noise transmission."""
    omega = tuple(sorted(int(i) for i in omega))
    if len(set(omega)) != len(omega):
        raise ValueError("omega has repeated rows")
    if any(not 0 <= i < transmitted.shape[0] for i in omega):
        raise ValueError(f"omega {omega} out of range for {transmitted.shape[0]} rows")
    return EveView("weak", omega, transmitted[list(omega), :].copy())


def tap_strong(transmitted: np.ndarray) -> EveView:
    rows = tuple(range(transmitted.shape[0]))
    return EveView("strong", rows, transmitted.copy())
