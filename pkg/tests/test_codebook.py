import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhuncc.bits import ColumnWord, bits_to_int, int_to_bits, splitmix64, splitmix64_array, stream_key
from nhuncc.codebook import (
    CodewordLocation,
    GuardViolation,
    encode_column,
    generate_codebook,
    hex_dump,
    index_location,
    load_codebook,
    location_to_message,
    lookup,
    message_index,
    save_codebook,
)

from conftest import make_params


def test_splitmix_reference_value():
    # first output of the reference SplitMix64 seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_splitmix_array_matches_scalar():
    key = stream_key(3, 4)
    vec = splitmix64_array(key, np.arange(50, dtype=np.uint64))
    gold = 0x9E3779B97F4A7C15
    assert [int(x) for x in vec] == [splitmix64((key + i * gold) % 2**64) for i in range(50)]


@given(st.integers(0, 2**40 - 1), st.integers(1, 40))
def test_bits_round_trip(v, n):
    v &= (1 << n) - 1
    assert bits_to_int(int_to_bits(v, n)) == v
    assert ColumnWord.from_bits(ColumnWord(v, n).bits()) == ColumnWord(v, n)


def test_column_word_msb_first():
    w = ColumnWord(0b100, 3)
    assert list(w.bits()) == [1, 0, 0]
    assert str(w) == "100"
    assert (w ^ ColumnWord(0b101, 3)) == ColumnWord(0b001, 3)


def test_regeneration_is_bit_exact():
    prm = make_params()
    a, b = generate_codebook(prm, 1), generate_codebook(prm, 1)
    assert a == b and a.words.tobytes() == b.words.tobytes()
    assert a != generate_codebook(prm, 2)


def test_shape_and_counts():
    prm = make_params()
    cb = generate_codebook(prm, 1)
    assert cb.bins.shape == (prm.num_bins, prm.delta)
    assert prm.num_bins * prm.delta == len(cb.words) == 16
    assert int(cb.words.max()) < 1 << prm.num_links
    # reverse index covers every slot exactly once
    slots = sorted(m for ms in cb.reverse_index.values() for m in ms)
    assert slots == list(range(16))


def test_message_layout():
    prm = make_params(num_links=16, msg_bits=10, eps_bits=1, cipher_rand_bits=4, cipher_expand_bits=4)
    cb = generate_codebook(prm, 3)
    assert encode_column(cb, ColumnWord(0, 10)).value == int(cb.bins[0][0])
    assert encode_column(cb, ColumnWord(1, 10)).value == int(cb.bins[0][1])
    assert location_to_message(prm, CodewordLocation(0, 0)) == ColumnWord(0, 10)
    last = CodewordLocation(prm.num_bins - 1, prm.delta - 1)
    assert location_to_message(prm, last) == ColumnWord(1023, 10)
    for m in range(1 << 10):
        assert message_index(prm, index_location(prm, m)) == m


def test_lookup_round_trip_and_miss():
    prm = make_params(num_links=32, msg_bits=8, eps_bits=1)
    cb = generate_codebook(prm, 5)
    for m in range(0, 256, 17):
        x = encode_column(cb, ColumnWord(m, 8))
        assert index_location(prm, m) in lookup(cb, x)
    occupied = set(cb.words.tolist())
    rng = np.random.default_rng(0)
    probes = [int(x) for x in rng.integers(0, 1 << 32, 2000, dtype=np.uint64)]
    misses = [lookup(cb, ColumnWord(x, 32)) == [] for x in probes]
    assert all(miss == (x not in occupied) for miss, x in zip(misses, probes))


def _find_collision_seed(prm, limit=200):
    for seed in range(limit):
        cb = generate_codebook(prm, seed)
        if cb.collision_count:
            return cb
    raise AssertionError("no collision found")


def test_collision_lookup_lists_all_occupants():
    prm = make_params(num_links=12, msg_bits=10, eve_links=2, eps_bits=1)
    cb = _find_collision_seed(prm)
    word = next(x for x, ms in cb.reverse_index.items() if len(ms) > 1)
    locs = lookup(cb, ColumnWord(word, 12))
    assert len(locs) >= 2 and locs == sorted(locs)
    # encoder stays injective on locations
    assert len({message_index(prm, loc) for loc in locs}) == len(locs)


def test_collision_count_birthday_estimate():
    prm = make_params(num_links=16, msg_bits=10, eps_bits=1)
    expected = math.comb(1024, 2) / 2**16
    assert 7 < expected < 9
    assert 0 <= generate_codebook(prm, 7).collision_count <= 40
    mean = np.mean([generate_codebook(prm, s).collision_count for s in range(100)])
    assert abs(mean - expected) < 1.5


def test_bit_bias():
    prm = make_params(num_links=32, msg_bits=12, eps_bits=1)
    cb = generate_codebook(prm, 9)
    total = 32 * len(cb.words)
    ones = int(np.bitwise_count(cb.words).sum())
    assert abs(ones / total - 0.5) <= 3 / math.sqrt(total)


def test_size_guard():
    with pytest.raises(GuardViolation):
        generate_codebook(make_params(num_links=40, msg_bits=25, flip_prob=0.0), 1)


def test_export_import(tmp_path):
    prm = make_params(num_links=16, msg_bits=10, eps_bits=1)
    cb = generate_codebook(prm, 4)
    save_codebook(cb, tmp_path / "cb.bin")
    back = load_codebook(tmp_path / "cb.bin")
    assert back == cb and back.reverse_index == cb.reverse_index
    raw = (tmp_path / "cb.bin").read_bytes()
    (tmp_path / "bad.bin").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        load_codebook(tmp_path / "bad.bin")
    dump = hex_dump(cb).splitlines()
    assert len(dump) == 1 + 1024 and dump[1].split()[:2] == ["0", "0"]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), k=st.integers(3, 10), ell=st.integers(4, 64))
def test_every_message_encodes_to_a_slot_that_looks_it_up(seed, k, ell):
    prm = make_params(num_links=ell, msg_bits=k, eve_links=1, eps_bits=1, flip_prob=0.0)
    cb = generate_codebook(prm, seed)
    for m in (0, (1 << k) - 1, seed % (1 << k)):
        assert m in cb.reverse_index[int(cb.words[m])]
