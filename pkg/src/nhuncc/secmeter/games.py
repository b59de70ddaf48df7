"""Monte-Carlo harnesses for the chosen-ciphertext indistinguishability games.

Two games are played:

* ``run_ind_cca1_game``: the adversary may query a decryption oracle, then
  names two plaintexts and must tell which one the challenge encrypts.
* ``run_individual_game``: the adversary names one message index and two
  values for it; the challenger fills every other message bit at random,
  encodes and partially encrypts, and hands over the whole transmitted column.

These measure the empirical advantage of concrete adversaries. They prove
nothing about adversaries that are not shipped here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from ..bits import column_rng, stream_key
from ..codebook import Codebook
from ..crypto import CipherKey, ColumnCipher, random_nonce
from ..scheme import crypt2_encode_column

CCA1 = "IND-CCA1"
INDIVIDUAL = "individual IND-CCA1"


class ProtocolViolation(RuntimeError):
    """Adversary used the decryption oracle after seeing the challenge."""


class DecryptionOracle:
    def __init__(self, decrypt):
        self._decrypt = decrypt
        self.queries = 0
        self.closed = False

    def __call__(self, wire: int):
        if self.closed:
            raise ProtocolViolation("decryption queries are not allowed after the challenge (CCA1)")
        self.queries += 1
        return self._decrypt(wire)


@dataclass(frozen=True)
class GameTranscript:
    kind: str
    adversary: str
    trials: int
    wins: int
    seed: int
    challenge_index_counts: tuple = ()
    oracle_queries: int = 0

    @property
    def advantage(self) -> float:
        return self.wins / self.trials - 0.5

    def wilson_interval(self, alpha: float = 0.05) -> tuple[float, float]:
        """Confidence interval for the advantage (win rate minus one half)."""
        lo, hi = proportion_confint(self.wins, self.trials, alpha=alpha, method="wilson")
        return float(lo) - 0.5, float(hi) - 0.5

    def to_dict(self) -> dict:
        lo, hi = self.wilson_interval()
        return {
            "kind": self.kind,
            "adversary": self.adversary,
            "trials": self.trials,
            "wins": self.wins,
            "advantage": self.advantage,
            "wilson_low": lo,
            "wilson_high": hi,
            "seed": self.seed,
            "challenge_index_counts": list(self.challenge_index_counts),
            "oracle_queries": self.oracle_queries,
        }


# -- adversaries for the plain cipher game ---------------------------------


class CipherAdversary:
    """Interface: optional oracle phase, choose two plaintexts, then guess 0 or 1."""

    name = "base"

    def query_phase(self, oracle: DecryptionOracle, cipher_shape: ColumnCipher, rng) -> None:
        pass

    def choose(self, cipher_shape: ColumnCipher, rng) -> tuple[int, int]:
        c = cipher_shape.plain_bits
        return 0, (1 << c) - 1

    def guess(self, challenge: int, cipher_shape: ColumnCipher, rng) -> int:
        raise NotImplementedError


class RandomGuesser(CipherAdversary):
    name = "random-guesser"

    def guess(self, challenge, cipher_shape, rng):
        return int(rng.integers(2))


def _body(challenge: int, cipher_shape: ColumnCipher) -> int:
    return (challenge >> cipher_shape.pad_bits) & ((1 << cipher_shape.plain_bits) - 1)


class FirstBitCorrelator(CipherAdversary):
    """Encrypts all-zeros vs all-ones and reads the first body bit."""

    name = "first-bit-correlator"

    def guess(self, challenge, cipher_shape, rng):
        c = cipher_shape.plain_bits
        return (_body(challenge, cipher_shape) >> (c - 1)) & 1


class HistogramDistinguisher(CipherAdversary):
    """Learns the body's popcount under each plaintext from oracle queries, then thresholds."""

    name = "histogram"

    def __init__(self, samples: int = 16):
        self.samples = samples
        self._threshold = None

    def query_phase(self, oracle, cipher_shape, rng):
        # Decrypting random wires reveals plaintext = body XOR keystream; the
        # popcount of the recovered keystream is what a biased cipher would leak.
        c = cipher_shape.plain_bits
        weights = []
        for _ in range(self.samples):
            wire = int.from_bytes(rng.bytes((cipher_shape.wire_bits + 7) // 8), "big") >> (
                -cipher_shape.wire_bits % 8
            )
            ks = oracle(wire) ^ _body(wire, cipher_shape)
            weights.append(bin(ks).count("1"))
        self._threshold = float(np.mean(weights)) if weights else c / 2

    def guess(self, challenge, cipher_shape, rng):
        c = cipher_shape.plain_bits
        w = bin(_body(challenge, cipher_shape)).count("1")
        thr = self._threshold if self._threshold is not None else c / 2
        # all-zeros plaintext leaves the keystream weight, all-ones inverts it
        d0, d1 = abs(w - thr), abs(w - (c - thr))
        if d0 == d1:
            return int(rng.integers(2))
        return 0 if d0 < d1 else 1


class LateQuerier(CipherAdversary):
    """Protocol-violating adversary used to test the CCA1 guard."""

    name = "late-querier"

    def __init__(self):
        self.oracle = None

    def query_phase(self, oracle, cipher_shape, rng):
        self.oracle = oracle

    def guess(self, challenge, cipher_shape, rng):
        self.oracle(challenge)
        return 0


def run_ind_cca1_game(
    plain_bits: int,
    rand_bits: int,
    adversary: CipherAdversary,
    trials: int,
    seed: int,
    expand_bits: int | None = None,
    scheme_id: str = "blake2b-ctr",
) -> GameTranscript:
    """Play the plain chosen-ciphertext game ``trials`` times, fresh key each time."""
    if trials < 1:
        raise ValueError("trials must be positive")
    expand_bits = rand_bits if expand_bits is None else expand_bits
    wins = queries = 0
    for trial in range(trials):
        key = CipherKey(CipherKey.generate(stream_key(seed, trial)).key_bits, scheme_id)
        cipher = ColumnCipher(key, plain_bits, rand_bits, expand_bits)
        shape = ColumnCipher(CipherKey(0), plain_bits, rand_bits, expand_bits)  # geometry only, no key
        adv_rng = column_rng(seed, trial, 0xAD)
        chal_rng = column_rng(seed, trial, 0xC4)
        oracle = DecryptionOracle(cipher.decrypt)
        adversary.query_phase(oracle, shape, adv_rng)
        m = adversary.choose(shape, adv_rng)
        b = int(chal_rng.integers(2))
        challenge = cipher.encrypt(m[b], random_nonce(chal_rng, rand_bits))
        oracle.closed = True
        wins += int(adversary.guess(challenge, shape, adv_rng) == b)
        queries += oracle.queries
    return GameTranscript(CCA1, adversary.name, trials, wins, seed, oracle_queries=queries)


# -- adversaries for the individual game -----------------------------------


class SchemeAdversary:
    """Interface: optional oracle phase, choose (index, value0, value1), then guess."""

    name = "base"

    def query_phase(self, oracle: DecryptionOracle, codebook: Codebook, rng) -> None:
        pass

    def choose(self, codebook: Codebook, rng) -> tuple[int, int, int]:
        return 0, 0, 1

    def guess(self, challenge: int, codebook: Codebook, rng) -> int:
        raise NotImplementedError


class SchemeRandomGuesser(SchemeAdversary):
    name = "random-guesser"

    def guess(self, challenge, codebook, rng):
        return int(rng.integers(2))


class SuffixReader(SchemeAdversary):
    """Bayes-optimal guess from the clear tail alone.

    Counts, over the public codebook, how many messages with ``m_j = v`` produce
    the observed tail and picks the larger count. ``clear_bits`` defaults to
    the scheme's unencrypted width; setting it to ``num_links`` against an
    unencrypted transmission makes the adversary read the whole codeword.
    """

    name = "suffix-reader"

    def __init__(self, index: int = 0, clear_bits: int | None = None):
        self.index = index
        self.clear_bits = clear_bits
        self._cached = None

    def choose(self, codebook, rng):
        return self.index, 0, 1

    def _width(self, codebook: Codebook) -> int:
        return codebook.params.eve_links if self.clear_bits is None else self.clear_bits

    def _table(self, codebook: Codebook) -> np.ndarray:
        if self._cached is None or self._cached[0] is not codebook:
            p = codebook.params
            w = self._width(codebook)
            tails = (codebook.words & np.uint64((1 << w) - 1)).astype(np.int64)
            bit = (np.arange(len(codebook.words)) >> (p.msg_bits - 1 - self.index)) & 1
            table = {}
            for t, b in zip(tails.tolist(), bit.tolist()):
                table.setdefault(t, [0, 0])[b] += 1
            self._cached = (codebook, table)
        return self._cached[1]

    def guess(self, challenge, codebook, rng):
        w = self._width(codebook)
        n0, n1 = self._table(codebook).get(challenge & ((1 << w) - 1), (0, 0))
        if n0 == n1:
            return int(rng.integers(2))
        return 0 if n0 > n1 else 1


class CipherBitReader(SchemeAdversary):
    """Reads the first ciphertext body bit and guesses it equals the chosen bit.

    Meaningful only if encryption fails to mask the codeword's top bit.
    """

    name = "cipher-bit-reader"

    def guess(self, challenge, codebook, rng):
        p = codebook.params
        body_top = (challenge >> (p.eve_links + p.cipher_expand_bits - p.cipher_rand_bits + p.encrypted_links - 1)) & 1
        return int(body_top)


def scheme_decryptor(codebook: Codebook, cipher: ColumnCipher):
    """Noiseless receiver: decrypt, reattach the tail, return the message or ``None``."""
    p = codebook.params
    w = p.eve_links

    def decrypt(wire: int):
        word = (cipher.decrypt(wire >> w) << w) | (wire & ((1 << w) - 1))
        hits = codebook.reverse_index.get(word)
        return hits[0] if hits else None

    return decrypt


def run_individual_game(
    codebook: Codebook,
    adversary: SchemeAdversary,
    trials: int,
    seed: int,
    scheme_id: str = "blake2b-ctr",
) -> GameTranscript:
    """Play the individual game against the full encode-then-encrypt scheme."""
    if trials < 1:
        raise ValueError("trials must be positive")
    p = codebook.params
    k = p.msg_bits
    wins = queries = 0
    index_counts = [0] * k
    for trial in range(trials):
        key = CipherKey(CipherKey.generate(stream_key(seed, trial)).key_bits, scheme_id)
        cipher = ColumnCipher.for_params(key, p)
        adv_rng = column_rng(seed, trial, 0xAD)
        chal_rng = column_rng(seed, trial, 0xC4)
        oracle = DecryptionOracle(scheme_decryptor(codebook, cipher))
        adversary.query_phase(oracle, codebook, adv_rng)
        j, v0, v1 = adversary.choose(codebook, adv_rng)
        if not 0 <= j < k or {v0, v1} - {0, 1}:
            raise ValueError(f"invalid challenge choice {(j, v0, v1)}")
        index_counts[j] += 1
        b = int(chal_rng.integers(2))
        others = int(chal_rng.integers(1 << k))
        shift = k - 1 - j
        m = (others & ~(1 << shift)) | ((v0, v1)[b] << shift)
        challenge = crypt2_encode_column(codebook, cipher, m, random_nonce(chal_rng, p.cipher_rand_bits))
        oracle.closed = True
        wins += int(adversary.guess(challenge, codebook, adv_rng) == b)
        queries += oracle.queries
    return GameTranscript(INDIVIDUAL, adversary.name, trials, wins, seed, tuple(index_counts), queries)
