"""Exact weak-eavesdropper leakage and bin-count statistics by full enumeration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..codebook import Codebook, GuardViolation

MAX_LEAKAGE_MSG_BITS = 16


@dataclass(frozen=True)
class LeakageReport:
    target_indices: tuple
    observed_rows: tuple
    mutual_information: float
    enumeration_size: int
    codebook_seed: int


def _entropy_of_labels(labels: np.ndarray) -> float:
    _, counts = np.unique(labels, return_counts=True)
    prob = counts / counts.sum()
    return float(-(prob * np.log2(prob)).sum())


def _gather_bits(values: np.ndarray, width: int, indices) -> np.ndarray:
    """Pack the bits at ``indices`` (0 = MSB of a ``width``-bit value) into one integer label."""
    out = np.zeros(len(values), dtype=np.uint64)
    for i in indices:
        out = (out << np.uint64(1)) | ((values >> np.uint64(width - 1 - i)) & np.uint64(1))
    return out


def exact_leakage(codebook: Codebook, omega, target_indices) -> LeakageReport:
    """``I(M_T; Z_omega)`` in bits for uniform messages, by enumerating every column.

    ``omega`` indexes codeword rows (0 = topmost link) and ``target_indices``
    indexes message bits.
    """
    params = codebook.params
    k, ell = params.msg_bits, params.num_links
    if k > MAX_LEAKAGE_MSG_BITS:
        raise GuardViolation(f"exact leakage enumerates 2^{k} > 2^{MAX_LEAKAGE_MSG_BITS} messages")
    omega = tuple(sorted(set(int(i) for i in omega)))
    targets = tuple(sorted(set(int(i) for i in target_indices)))
    if any(not 0 <= i < ell for i in omega):
        raise ValueError(f"omega {omega} outside codeword rows 0..{ell - 1}")
    if any(not 0 <= i < k for i in targets):
        raise ValueError(f"target indices {targets} outside message bits 0..{k - 1}")

    msgs = np.arange(1 << k, dtype=np.uint64)
    t = _gather_bits(msgs, k, targets)
    z = _gather_bits(codebook.words, ell, omega)
    joint = (t << np.uint64(len(omega))) | z
    mi = _entropy_of_labels(t) + _entropy_of_labels(z) - _entropy_of_labels(joint)
    mi = min(max(mi, 0.0), float(len(targets)))
    return LeakageReport(targets, omega, mi, 1 << k, codebook.seed)


@dataclass(frozen=True)
class BinCountStats:
    counts: np.ndarray  # (num_bins, 2**w): codewords in bin matching each clear suffix
    expected: float
    mean: float
    min: int
    max: int
    epsilon_prime: float
    concentration_pass_fraction: float
    chi2_stat: float
    chi2_df: int
    chi2_pvalue: float  # two-sided dispersion test against the multinomial model


def bin_concentration(codebook: Codebook, epsilon_prime: float = 0.5, suffix_bits: int | None = None) -> BinCountStats:
    """Count, per bin, how many codewords end in each possible clear suffix.

    Under i.i.d. uniform codewords each bin's suffix counts are
    Multinomial(delta, uniform over 2**w), so the pooled Pearson statistic is
    chi-square with ``num_bins * (2**w - 1)`` degrees of freedom.
    """
    params = codebook.params
    w = params.eve_links if suffix_bits is None else suffix_bits
    n_suffix = 1 << w
    suffix = (codebook.words & np.uint64(n_suffix - 1)).astype(np.int64)
    bin_of = np.arange(len(codebook.words), dtype=np.int64) >> params.position_bits
    counts = np.bincount(bin_of * n_suffix + suffix, minlength=params.num_bins * n_suffix)
    counts = counts.reshape(params.num_bins, n_suffix)

    expected = params.delta / n_suffix
    within = np.abs(counts - expected) <= epsilon_prime * expected
    df = params.num_bins * (n_suffix - 1)
    if df > 0:
        chi2 = float(((counts - expected) ** 2).sum() / expected)
        cdf = stats.chi2.cdf(chi2, df)
        pval = float(min(1.0, 2 * min(cdf, 1.0 - cdf)))
    else:
        chi2, pval = 0.0, 1.0
    return BinCountStats(
        counts=counts,
        expected=expected,
        mean=float(counts.mean()),
        min=int(counts.min()),
        max=int(counts.max()),
        epsilon_prime=epsilon_prime,
        concentration_pass_fraction=float(within.mean()),
        chi2_stat=chi2,
        chi2_df=df,
        chi2_pvalue=pval,
    )
