import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhuncc.params import (
    InfeasibleParameters,
    SystemParams,
    binary_entropy,
    check_rate_condition,
    derive_params,
    load_params,
    save_params,
)

from conftest import make_params


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@pytest.mark.parametrize("p, expected", [(0.5, 1.0), (0.0, 0.0), (0.11, 0.499916), (1.0, 0.0)])
def test_binary_entropy_values(p, expected):
    assert binary_entropy(p) == pytest.approx(expected, abs=1e-6)


@given(st.floats(0.001, 0.499))
def test_binary_entropy_symmetric_and_bounded(p):
    assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)
    assert 0 < binary_entropy(p) < 1


def test_derive_reference_setup():
    prm = derive_params(16, 0.05, 2, 1, 4, 4)
    assert (prm.msg_bits, prm.secure_bits, prm.encrypted_links) == (10, 6, 14)
    assert prm.noise_rate == pytest.approx(16 * h2(0.05), abs=1e-12)
    assert prm.noise_rate == pytest.approx(4.5829, abs=1e-3)
    assert prm.feasible


def test_derive_noiseless():
    prm = derive_params(8, 0.0, 0, 0, 0, 0)
    assert (prm.msg_bits, prm.secure_bits, prm.noise_rate) == (8, 8, 0.0)


def test_derive_infeasible():
    with pytest.raises(InfeasibleParameters):
        derive_params(4, 0.45, 3, 1, 0, 0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(flip_prob=0.5),
        dict(flip_prob=-0.1),
        dict(eve_links=8),
        dict(cipher_rand_bits=3, cipher_expand_bits=2),
        dict(msg_bits=2),  # no bin index bits left after w + eps_bits
        dict(secure_bits=3),
    ],
)
def test_structural_invariants_enforced(kw):
    with pytest.raises(ValueError):
        make_params(**kw)


def test_over_capacity_params_constructible_but_not_feasible():
    prm = make_params(num_links=12, flip_prob=0.2, msg_bits=10)
    assert not prm.feasible


@pytest.mark.parametrize(
    "kw, lhs, cap, ok",
    [
        (dict(num_links=16, flip_prob=0.05, eve_links=2, msg_bits=10, eps_bits=1, cipher_rand_bits=4, cipher_expand_bits=4), 0.7, 1 - h2(0.05), True),
        (dict(num_links=8, flip_prob=0.0, eve_links=0, msg_bits=8, cipher_rand_bits=0, cipher_expand_bits=0), 1.0, 1.0, False),
        (dict(num_links=16, flip_prob=0.11, eve_links=1, msg_bits=4, cipher_rand_bits=0, cipher_expand_bits=0), 0.25, 1 - h2(0.11), True),
    ],
)
def test_rate_condition(kw, lhs, cap, ok):
    rc = check_rate_condition(make_params(**kw))
    assert rc["lhs"] == pytest.approx(lhs, abs=1e-12)
    assert rc["capacity"] == pytest.approx(cap, abs=1e-12)
    assert rc["satisfied"] is ok


def test_geometry():
    prm = make_params(num_links=16, msg_bits=10, eps_bits=1, cipher_rand_bits=4, cipher_expand_bits=6)
    assert prm.position_bits == 3
    assert prm.delta == 8 and prm.num_bins == 128
    assert prm.num_bins * prm.delta == 1 << prm.msg_bits
    assert prm.wire_bits == 22


def test_file_round_trip(tmp_path):
    prm = derive_params(16, 0.05, 2, 1, 4, 4)
    save_params(prm, tmp_path / "p.json")
    assert load_params(tmp_path / "p.json") == prm
    d = json.loads((tmp_path / "p.json").read_text())
    d["bogus"] = 1
    with pytest.raises(ValueError):
        SystemParams.from_dict(d)


@settings(max_examples=60)
@given(
    ell=st.integers(4, 40),
    p=st.floats(0.0, 0.3),
    w=st.integers(0, 3),
    e=st.integers(0, 2),
    r0=st.integers(0, 4),
    extra=st.integers(0, 3),
)
def test_derive_properties(ell, p, w, e, r0, extra):
    try:
        prm = derive_params(ell, p, w, e, r0, r0 + extra)
    except (InfeasibleParameters, ValueError):
        return
    assert prm.msg_bits <= ell - prm.noise_rate - e + 1e-9
    # maximality: one more message bit would break the bound
    assert prm.msg_bits + 1 > ell - prm.noise_rate - e - 1e-9 or prm.msg_bits == ell
    assert prm.secure_bits == max(0, prm.msg_bits - w - 2 * e)
    assert prm.bin_index_bits >= 1
