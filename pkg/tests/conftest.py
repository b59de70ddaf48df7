import pytest

from nhuncc.crypto import CipherKey, ColumnCipher
from nhuncc.codebook import generate_codebook
from nhuncc.params import SystemParams


def make_params(**over):
    base = dict(
        num_links=8, flip_prob=0.08, eve_links=2, msg_bits=4, secure_bits=0,
        eps_bits=0, cipher_rand_bits=2, cipher_expand_bits=2,
    )
    base.update(over)
    return SystemParams(**base)


@pytest.fixture
def tiny_params():
    """The k_u=4, l=8, w=2, r=r0=2 setting used for ML cross-checks."""
    return make_params()


@pytest.fixture
def key():
    return CipherKey.from_hex("000102030405060708090a0b0c0d0e0f")


@pytest.fixture
def tiny_system(tiny_params, key):
    cb = generate_codebook(tiny_params, 11)
    return cb, ColumnCipher.for_params(key, tiny_params)


# Acceptance criteria append (number, ok, detail) here; the summary hook prints one line each.
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {detail}")
