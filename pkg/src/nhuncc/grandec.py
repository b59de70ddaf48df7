"""Joint decryption-decoding by guessing BSC noise in likelihood order.

Received column layout (``n = num_links + cipher_expand_bits`` bits, MSB first)::

    | nonce (r0) | cipher body (c) | padding (r - r0) | clear tail (w) |

Each noise guess ``z`` is XORed off, the encrypted head is decrypted, the tail
re-attached, and the resulting ``num_links``-bit word is looked up in the
codebook. Only zero-padding wires are genuine transmissions, so guesses that
leave non-zero padding are rejected without a lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import ColumnWord
from .channel import columns_to_matrix, matrix_to_columns
from .codebook import Codebook, CodewordLocation, GuardViolation, index_location
from .crypto import ColumnCipher

MAX_PATTERN_BITS = 40
ORACLE_CAP_BITS = 20
_CACHE_LIMIT = 1 << 20


def _gosper(n: int, weight: int):
    """All n-bit ints of a given popcount, in increasing numeric order."""
    if weight == 0:
        yield 0
        return
    x = (1 << weight) - 1
    limit = 1 << n
    while x < limit:
        yield x
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r


@lru_cache(maxsize=256)
def _weight_class(n: int, weight: int) -> tuple:
    return tuple(_gosper(n, weight))


def _iter_weight(n: int, weight: int):
    if math.comb(n, weight) <= _CACHE_LIMIT:
        return iter(_weight_class(n, weight))
    return _gosper(n, weight)


class NoiseOrder:
    """Noise patterns by ascending Hamming weight, lexicographic inside a weight.

    Reading a pattern as an ``n``-character bit string, "lexicographic" is the
    same as increasing integer value. For ``p < 1/2`` this order never emits a
    less likely pattern before a more likely one.
    """

    def __init__(self, n: int, budget: int):
        if not 0 <= n <= MAX_PATTERN_BITS:
            raise GuardViolation(f"pattern length {n} outside [0, {MAX_PATTERN_BITS}]")
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.length = n
        self.budget = budget
        self.emitted = 0
        self.weight = 0
        self._it = self._run()

    def _run(self):
        for w in range(self.length + 1):
            self.weight = w
            for z in _iter_weight(self.length, w):
                if self.emitted >= self.budget:
                    return
                self.emitted += 1
                yield z

    def __iter__(self):
        return self

    def __next__(self) -> int:
        return next(self._it)


def noise_patterns(n: int, budget: int) -> NoiseOrder:
    return NoiseOrder(n, budget)


def default_budget(n: int, p: float) -> int:
    w_max = min(n, math.ceil(2 * p * n) + 2)
    return sum(math.comb(n, w) for w in range(w_max + 1))


@dataclass(frozen=True)
class DecodeResult:
    message: ColumnWord | None
    location: CodewordLocation | None
    nonce: int | None
    noise_weight: int | None
    queries: int
    abandoned: bool
    ambiguous: bool = False  # hit codeword sits in more than one (bin, position)
    tie_class_size: int | None = None  # set only by oracle_decode_column


def grand_decode_column(
    received: ColumnWord,
    codebook: Codebook,
    cipher: ColumnCipher,
    p: float,
    budget: int | None = None,
) -> DecodeResult:
    params = codebook.params
    n = params.wire_bits
    if received.length != n:
        raise ValueError(f"received length {received.length} != l + r = {n}")
    if cipher.plain_bits != params.encrypted_links or cipher.expand_bits != params.cipher_expand_bits:
        raise ValueError("cipher geometry does not match codebook params")
    if not 0.0 <= p < 0.5:
        raise ValueError("GRAND ordering needs p < 1/2")
    if budget is None:
        budget = default_budget(n, p)

    w = params.eve_links
    c = cipher.plain_bits
    pad = cipher.pad_bits
    tail_mask = (1 << w) - 1
    pad_mask = (1 << pad) - 1
    c_mask = (1 << c) - 1
    stream = cipher.stream
    rev = codebook.reverse_index
    y = received.value

    queries = 0
    for weight in range(n + 1):
        for z in _iter_weight(n, weight):
            if queries >= budget:
                return DecodeResult(None, None, None, None, queries, True)
            queries += 1
            cand = y ^ z
            head = cand >> w
            if head & pad_mask:
                continue
            head >>= pad
            nonce = head >> c
            word = ((((head & c_mask) ^ stream(nonce))) << w) | (cand & tail_mask)
            hits = rev.get(word)
            if hits:
                m = hits[0]
                return DecodeResult(
                    message=ColumnWord(m, params.msg_bits),
                    location=index_location(params, m),
                    nonce=nonce,
                    noise_weight=weight,
                    queries=queries,
                    abandoned=False,
                    ambiguous=len(hits) > 1,
                )
    return DecodeResult(None, None, None, None, queries, True)


def transmitted_wires(codebook: Codebook, cipher: ColumnCipher) -> np.ndarray:
    """Every transmittable wire as a ``(2**r0, 2**k_u)`` uint64 array [nonce, message]."""
    params = codebook.params
    if params.msg_bits + cipher.rand_bits > ORACLE_CAP_BITS:
        raise GuardViolation(f"2^(k_u + r0) exceeds 2^{ORACLE_CAP_BITS}")
    if params.wire_bits > 64:
        raise GuardViolation("wire longer than 64 bits")
    w = np.uint64(params.eve_links)
    c = cipher.plain_bits
    pad = np.uint64(cipher.pad_bits)
    words = codebook.words
    prefix = words >> w
    tail = words & np.uint64((1 << params.eve_links) - 1)
    out = np.empty((1 << cipher.rand_bits, len(words)), dtype=np.uint64)
    for nonce in range(1 << cipher.rand_bits):
        body = prefix ^ np.uint64(cipher.stream(nonce))
        head = (np.uint64(nonce << c) | body) << pad
        out[nonce] = (head << w) | tail
    return out


def brute_force_ml_oracle(received: ColumnWord, codebook: Codebook, cipher: ColumnCipher) -> frozenset:
    """Minimum-distance set of ``(location, nonce, distance)`` over all (message, nonce) pairs.

    Likelihood is decreasing in Hamming distance for p < 1/2, so this is the
    ML set. It shares no code with the guessing decoder beyond the cipher.
    """
    if received.length != codebook.params.wire_bits:
        raise ValueError("received length != l + r")
    wires = transmitted_wires(codebook, cipher)
    dist = np.bitwise_count(wires ^ np.uint64(received.value))
    best = int(dist.min())
    nonces, msgs = np.nonzero(dist == best)
    return frozenset(
        (index_location(codebook.params, int(m)), int(r), best) for r, m in zip(nonces, msgs)
    )


def oracle_decode_column(received: ColumnWord, codebook: Codebook, cipher: ColumnCipher) -> DecodeResult:
    """Exhaustive ML decode; among ties returns the lowest (bin, position, nonce) and the tie count."""
    ml = brute_force_ml_oracle(received, codebook, cipher)
    loc, nonce, dist = min(ml)
    m = (loc.bin << codebook.params.position_bits) | loc.position
    return DecodeResult(
        message=ColumnWord(m, codebook.params.msg_bits),
        location=loc,
        nonce=nonce,
        noise_weight=dist,
        queries=int(transmitted_wires(codebook, cipher).size),
        abandoned=False,
        tie_class_size=len(ml),
    )


@dataclass(frozen=True)
class MatrixDecode:
    messages: np.ndarray  # (k_u, num_columns) 0/1, zero columns where abandoned
    results: tuple

    @property
    def total_queries(self) -> int:
        return sum(r.queries for r in self.results)

    def column_errors(self, truth: np.ndarray) -> list[bool]:
        return [
            r.abandoned or not np.array_equal(self.messages[:, j], truth[:, j])
            for j, r in enumerate(self.results)
        ]

    def block_error(self, truth: np.ndarray) -> bool:
        """Any column wrong or abandoned."""
        return any(self.column_errors(truth))


def decode_matrix(received, codebook: Codebook, cipher: ColumnCipher, p: float, budget: int | None = None) -> MatrixDecode:
    """Decode each received column independently.

    ``received`` is an ``(l + r, columns)`` 0/1 matrix or a sequence of column ints.
    """
    params = codebook.params
    n = params.wire_bits
    if isinstance(received, np.ndarray):
        if received.ndim != 2 or received.shape[0] != n:
            raise ValueError(f"received matrix must have {n} rows")
        columns = matrix_to_columns(received)
    else:
        columns = [int(x) for x in received]
    results = tuple(grand_decode_column(ColumnWord(y, n), codebook, cipher, p, budget) for y in columns)
    msgs = [0 if r.abandoned else r.message.value for r in results]
    return MatrixDecode(columns_to_matrix(msgs, params.msg_bits), results)
