"""Randomized injective column cipher applied to the first ``c`` coded bits.

Reference scheme: ``wire = nonce || (plaintext XOR PRF(key, nonce)) || zero padding``
with the PRF built from keyed BLAKE2b in counter mode. Decryption is total:
every wire value decrypts to some plaintext, and codebook membership is the
only integrity check. This is a simulation stand-in, not a vetted cipher.
"""

from __future__ import annotations

import hashlib
import secrets
import struct
from dataclasses import dataclass, field

import numpy as np

from .bits import ColumnWord, column_rng

MAX_KEYSTREAM_BITS = 1 << 16
_BLOCK_BITS = 512
_TABLE_NONCE_BITS = 16

SCHEMES = ("blake2b-ctr", "identity")


@dataclass(frozen=True)
class CipherKey:
    key_bits: int
    scheme_id: str = "blake2b-ctr"

    def __post_init__(self):
        if not 0 <= self.key_bits < (1 << 128):
            raise ValueError("key must be a 128-bit value")
        if self.scheme_id not in SCHEMES:
            raise ValueError(f"unknown cipher scheme {self.scheme_id!r}")

    @classmethod
    def from_hex(cls, text: str, scheme_id: str = "blake2b-ctr") -> "CipherKey":
        text = text.strip().lower()
        if len(text) != 32:
            raise ValueError("cipher key must be exactly 32 hex characters")
        return cls(int(text, 16), scheme_id)

    @classmethod
    def generate(cls, seed: int | None = None) -> "CipherKey":
        """Fresh key; pass ``seed`` for reproducible test keys."""
        if seed is None:
            return cls(secrets.randbits(128))
        return cls(int.from_bytes(column_rng(0x4B45, seed).bytes(16), "big"))

    def hex(self) -> str:
        return f"{self.key_bits:032x}"

    @property
    def key_bytes(self) -> bytes:
        return self.key_bits.to_bytes(16, "big")


def keystream(key: CipherKey, nonce: ColumnWord, length: int) -> ColumnWord:
    """Pseudorandom ``length``-bit stream, deterministic in (key, nonce)."""
    if not 0 <= length <= MAX_KEYSTREAM_BITS:
        raise ValueError(f"keystream length must be in [0, {MAX_KEYSTREAM_BITS}]")
    if length == 0:
        return ColumnWord(0, 0)
    if key.scheme_id == "identity":
        return ColumnWord(0, length)
    nbytes = (nonce.length + 7) // 8
    prefix = struct.pack("<I", nonce.length) + nonce.value.to_bytes(nbytes, "big")
    blocks = []
    for counter in range(-(-length // _BLOCK_BITS)):
        h = hashlib.blake2b(prefix + struct.pack("<Q", counter), key=key.key_bytes, digest_size=64)
        blocks.append(h.digest())
    stream = int.from_bytes(b"".join(blocks), "big")
    return ColumnWord(stream >> (len(blocks) * _BLOCK_BITS - length), length)


@dataclass(frozen=True)
class CipherColumn:
    nonce: ColumnWord
    body: ColumnWord
    padding: ColumnWord

    def wire(self) -> ColumnWord:
        n = self.nonce.length + self.body.length + self.padding.length
        v = (((self.nonce.value << self.body.length) | self.body.value) << self.padding.length) | self.padding.value
        return ColumnWord(v, n)


@dataclass(frozen=True, eq=False)
class ColumnCipher:
    """The cipher bound to a key and to the (c, r0, r) column geometry.

    Keystreams are memoized per nonce; for nonces of up to 16 bits the whole
    table ends up cached, which is what makes per-guess decryption cheap.
    """

    key: CipherKey
    plain_bits: int
    rand_bits: int
    expand_bits: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.plain_bits < 0 or not 0 <= self.rand_bits <= self.expand_bits:
            raise ValueError("need c >= 0 and 0 <= r0 <= r")

    @classmethod
    def for_params(cls, key: CipherKey, params) -> "ColumnCipher":
        return cls(key, params.encrypted_links, params.cipher_rand_bits, params.cipher_expand_bits)

    @property
    def wire_bits(self) -> int:
        return self.plain_bits + self.expand_bits

    @property
    def pad_bits(self) -> int:
        return self.expand_bits - self.rand_bits

    def stream(self, nonce: int) -> int:
        ks = self._cache.get(nonce)
        if ks is None:
            ks = keystream(self.key, ColumnWord(nonce, self.rand_bits), self.plain_bits).value
            if self.rand_bits <= _TABLE_NONCE_BITS or len(self._cache) < (1 << _TABLE_NONCE_BITS):
                self._cache[nonce] = ks
        return ks

    def encrypt(self, plaintext: int, nonce: int) -> int:
        body = plaintext ^ self.stream(nonce)
        return ((nonce << self.plain_bits) | body) << self.pad_bits

    def decrypt(self, wire: int) -> int:
        head = wire >> self.pad_bits
        nonce = head >> self.plain_bits
        return (head & ((1 << self.plain_bits) - 1)) ^ self.stream(nonce)


def encrypt_column(cipher: ColumnCipher, plaintext: ColumnWord, nonce: ColumnWord) -> CipherColumn:
    if plaintext.length != cipher.plain_bits:
        raise ValueError(f"plaintext length {plaintext.length} != c = {cipher.plain_bits}")
    if nonce.length != cipher.rand_bits:
        raise ValueError(f"nonce length {nonce.length} != r0 = {cipher.rand_bits}")
    body = plaintext.value ^ cipher.stream(nonce.value)
    return CipherColumn(nonce, ColumnWord(body, cipher.plain_bits), ColumnWord(0, cipher.pad_bits))


def decrypt_column(cipher: ColumnCipher, wire: ColumnWord) -> ColumnWord:
    if wire.length != cipher.wire_bits:
        raise ValueError(f"wire length {wire.length} != c + r = {cipher.wire_bits}")
    return ColumnWord(cipher.decrypt(wire.value), cipher.plain_bits)


def random_nonce(rng: np.random.Generator, bits: int) -> int:
    if bits == 0:
        return 0
    return int.from_bytes(rng.bytes((bits + 7) // 8), "big") >> (-bits % 8)
