import hashlib
import json
import math
import struct
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from nhuncc.bits import ColumnWord, column_rng
from nhuncc.crypto import (
    MAX_KEYSTREAM_BITS,
    CipherKey,
    ColumnCipher,
    decrypt_column,
    encrypt_column,
    keystream,
    random_nonce,
)

VECTORS = json.loads((Path(__file__).parent / "fixtures" / "cipher_vectors.json").read_text())


def independent_keystream(key_hex, nonce, nonce_bits, length):
    """Straight re-derivation from hashlib: BLAKE2b-512 keyed, over len||nonce||counter."""
    key = bytes.fromhex(key_hex)
    prefix = struct.pack("<I", nonce_bits) + nonce.to_bytes((nonce_bits + 7) // 8, "big")
    out = b""
    ctr = 0
    while len(out) * 8 < length:
        out += hashlib.blake2b(prefix + struct.pack("<Q", ctr), key=key, digest_size=64).digest()
        ctr += 1
    return int.from_bytes(out, "big") >> (len(out) * 8 - length)


@pytest.mark.parametrize("vec", VECTORS, ids=lambda v: f"c{v['plain_bits']}r{v['rand_bits']}")
def test_fixture_vectors(vec):
    cipher = ColumnCipher(CipherKey.from_hex(vec["key"]), vec["plain_bits"], vec["rand_bits"], vec["expand_bits"])
    x, nonce, wire = (int(vec[k], 16) for k in ("plaintext", "nonce", "wire"))
    assert cipher.encrypt(x, nonce) == wire
    assert cipher.decrypt(wire) == x
    ks = independent_keystream(vec["key"], nonce, vec["rand_bits"], vec["plain_bits"])
    pad = vec["expand_bits"] - vec["rand_bits"]
    expect = ((nonce << vec["plain_bits"]) | (x ^ ks)) << pad
    assert wire == expect


def test_keystream_determinism_and_edges(key):
    n = ColumnWord(5, 4)
    assert keystream(key, n, 300) == keystream(key, n, 300)
    assert keystream(key, n, 0) == ColumnWord(0, 0)
    # prefix property of the counter construction
    assert keystream(key, n, 1000).value >> 700 == keystream(key, n, 300).value
    with pytest.raises(ValueError):
        keystream(key, n, MAX_KEYSTREAM_BITS + 1)


def test_key_handling():
    k = CipherKey.from_hex("000102030405060708090A0B0C0D0E0F")
    assert k.hex() == "000102030405060708090a0b0c0d0e0f"
    assert CipherKey.generate(3) == CipherKey.generate(3) != CipherKey.generate(4)
    for bad in ("00", "zz" * 16, "0" * 33):
        with pytest.raises(ValueError):
            CipherKey.from_hex(bad)
    with pytest.raises(ValueError):
        CipherKey(1, "rot13")


def test_zero_plaintext_exposes_keystream(key):
    cipher = ColumnCipher(key, 14, 4, 4)
    col = encrypt_column(cipher, ColumnWord(0, 14), ColumnWord(7, 4))
    assert col.body == keystream(key, ColumnWord(7, 4), 14)
    assert col.wire().length == 18
    assert col.padding == ColumnWord(0, 0)


def test_padding_layout(key):
    cipher = ColumnCipher(key, 10, 3, 6)
    col = encrypt_column(cipher, ColumnWord(0x155, 10), ColumnWord(5, 3))
    assert col.wire().length == 16 and col.wire().value & 0b111 == 0
    assert col.wire().value >> 13 == 5
    assert decrypt_column(cipher, col.wire()) == ColumnWord(0x155, 10)


def test_length_checks(key):
    cipher = ColumnCipher(key, 10, 3, 3)
    with pytest.raises(ValueError):
        encrypt_column(cipher, ColumnWord(0, 9), ColumnWord(0, 3))
    with pytest.raises(ValueError):
        encrypt_column(cipher, ColumnWord(0, 10), ColumnWord(0, 2))
    with pytest.raises(ValueError):
        decrypt_column(cipher, ColumnWord(0, 12))


@given(x=st.integers(0, 2**30 - 1), nonce=st.integers(0, 2**12 - 1), seed=st.integers(0, 1000))
def test_round_trip_property(x, nonce, seed):
    cipher = ColumnCipher(CipherKey.generate(seed), 30, 12, 15)
    assert cipher.decrypt(cipher.encrypt(x, nonce)) == x


def test_bijection_for_fixed_nonce(key):
    cipher = ColumnCipher(key, 10, 4, 4)
    images = {cipher.encrypt(x, 9) for x in range(1 << 10)}
    assert len(images) == 1 << 10


def test_body_bit_flip_is_local(key):
    cipher = ColumnCipher(key, 40, 8, 8)
    rng = np.random.default_rng(1)
    for _ in range(200):
        x, nonce, bit = int(rng.integers(1 << 40)), int(rng.integers(256)), int(rng.integers(40))
        wire = cipher.encrypt(x, nonce)
        assert cipher.decrypt(wire ^ (1 << bit)) == x ^ (1 << bit)


def test_nonce_bit_flip_rerandomizes(key):
    c = 64
    cipher = ColumnCipher(key, c, 16, 16)
    rng = np.random.default_rng(2)
    diffs = []
    for _ in range(1000):
        x, nonce, bit = int(rng.integers(1 << 62)), int(rng.integers(1 << 16)), int(rng.integers(16))
        wire = cipher.encrypt(x, nonce)
        diffs.append((cipher.decrypt(wire ^ (1 << (c + bit))) ^ x).bit_count())
    mean = np.mean(diffs)
    assert abs(mean - c / 2) <= 3 * math.sqrt(c / 4) / math.sqrt(len(diffs))


def test_keystream_single_bit_nonce_distance(key):
    length = 256
    rng = np.random.default_rng(3)
    d = []
    for _ in range(1000):
        n, bit = int(rng.integers(1 << 32)), int(rng.integers(32))
        a = keystream(key, ColumnWord(n, 32), length).value
        b = keystream(key, ColumnWord(n ^ (1 << bit), 32), length).value
        d.append((a ^ b).bit_count())
    # each pair individually within len/2 +- 3 sqrt(len)/2 almost always; check the bulk
    inside = np.mean([abs(x - length / 2) <= 3 * math.sqrt(length) / 2 for x in d])
    assert inside > 0.99


def test_identity_scheme_is_transparent():
    cipher = ColumnCipher(CipherKey(0, "identity"), 12, 0, 0)
    assert cipher.encrypt(0xABC, 0) == 0xABC


def test_random_nonce_widths():
    rng = column_rng(1, 2)
    assert random_nonce(rng, 0) == 0
    vals = [random_nonce(rng, 5) for _ in range(2000)]
    assert max(vals) < 32 and len(set(vals)) == 32
    assert stats.chisquare(np.bincount(vals, minlength=32)).pvalue > 1e-4
