"""Encode-then-partially-encrypt composition for one column and for a message matrix.

A codeword's first ``c = num_links - eve_links`` bits go through the column
cipher with a fresh nonce; the last ``eve_links`` bits are appended in the
clear. The transmitted column is ``ciphertext (c + r) || clear tail (w)``.
"""

from __future__ import annotations

import numpy as np

from .channel import columns_to_matrix, matrix_to_columns
from .codebook import Codebook
from .crypto import ColumnCipher


def project_encrypted(params, codeword: int) -> int:
    """The first ``c`` bits of a codeword (the part that gets encrypted)."""
    return codeword >> params.eve_links


def project_clear(params, codeword: int) -> int:
    """The last ``w`` bits of a codeword (sent unencrypted)."""
    return codeword & ((1 << params.eve_links) - 1)


def crypt2_encode_column(codebook: Codebook, cipher: ColumnCipher, message: int, nonce: int) -> int:
    params = codebook.params
    x = int(codebook.words[message])
    head = cipher.encrypt(project_encrypted(params, x), nonce)
    return (head << params.eve_links) | project_clear(params, x)


def crypt2_encode(codebook: Codebook, cipher: ColumnCipher, messages: np.ndarray, nonces) -> np.ndarray:
    """Encode a ``(k_u, columns)`` 0/1 message matrix into the ``(l + r, columns)`` transmission."""
    params = codebook.params
    if messages.ndim != 2 or messages.shape[0] != params.msg_bits:
        raise ValueError(f"message matrix must have {params.msg_bits} rows")
    cols = matrix_to_columns(messages)
    if len(nonces) != len(cols):
        raise ValueError("need one nonce per column")
    wires = [crypt2_encode_column(codebook, cipher, m, int(r)) for m, r in zip(cols, nonces)]
    return columns_to_matrix(wires, params.wire_bits)


def codeword_matrix(codebook: Codebook, messages: np.ndarray) -> np.ndarray:
    cols = matrix_to_columns(messages)
    return columns_to_matrix([int(codebook.words[m]) for m in cols], codebook.params.num_links)


def clear_rows(params) -> range:
    """Row indices of the unencrypted tail within a transmitted matrix."""
    return range(params.wire_bits - params.eve_links, params.wire_bits)

