"""Binned i.i.d. Bernoulli(1/2) random codebook.

Codeword for message index ``m = bin * delta + position`` is the top
``num_links`` bits of ``splitmix64_array(stream_key(seed), m)``. Because the
generator is counter based, any (bin, position) can be produced on its own and
in any order; generation order (bin-major, position-minor) only matters for
the export file.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .bits import ColumnWord, splitmix64_array, stream_key
from .params import SystemParams

MAX_MSG_BITS = 24
MAX_LINKS = 64
FILE_MAGIC = b"NHCB"
FILE_VERSION = 1


class GuardViolation(ValueError):
    """Requested object is too large to enumerate or store at desk scale."""


class CodewordLocation(NamedTuple):
    bin: int
    position: int


@dataclass(frozen=True, eq=False)
class Codebook:
    params: SystemParams
    seed: int
    words: np.ndarray  # uint64, indexed by message value
    reverse_index: dict = field(repr=False)

    @property
    def bins(self) -> np.ndarray:
        """Codewords as a ``(num_bins, delta)`` array."""
        return self.words.reshape(self.params.num_bins, self.params.delta)

    @property
    def collision_count(self) -> int:
        """Number of (bin, position) slots whose codeword already occupies an earlier slot."""
        return len(self.words) - len(self.reverse_index)

    def __eq__(self, other):
        return (
            isinstance(other, Codebook)
            and self.params == other.params
            and self.seed == other.seed
            and np.array_equal(self.words, other.words)
        )


def _check_size(params: SystemParams) -> None:
    if params.msg_bits > MAX_MSG_BITS:
        raise GuardViolation(f"2^{params.msg_bits} codewords exceeds the 2^{MAX_MSG_BITS} cap")
    if params.num_links > MAX_LINKS:
        raise GuardViolation(f"num_links={params.num_links} exceeds {MAX_LINKS}")


def _build(params: SystemParams, seed: int, words: np.ndarray) -> Codebook:
    reverse: dict[int, list[int]] = {}
    for m, x in enumerate(words.tolist()):
        reverse.setdefault(x, []).append(m)
    return Codebook(params=params, seed=seed, words=words, reverse_index=reverse)


def generate_codebook(params: SystemParams, seed: int) -> Codebook:
    _check_size(params)
    n = 1 << params.msg_bits
    raw = splitmix64_array(stream_key(0xC0DE, seed), np.arange(n, dtype=np.uint64))
    words = raw >> np.uint64(64 - params.num_links)
    return _build(params, seed, words)


def message_index(params: SystemParams, loc: CodewordLocation) -> int:
    if not (0 <= loc.bin < params.num_bins and 0 <= loc.position < params.delta):
        raise ValueError(f"location {loc} out of range")
    return (loc.bin << params.position_bits) | loc.position


def index_location(params: SystemParams, m: int) -> CodewordLocation:
    return CodewordLocation(m >> params.position_bits, m & (params.delta - 1))


def encode_column(codebook: Codebook, message: ColumnWord) -> ColumnWord:
    """Map a ``msg_bits`` column to its ``num_links`` codeword.

    The first ``bin_index_bits`` message bits (big-endian) choose the bin and
    the remaining bits choose the position, so the message value is the flat
    codeword index.
    """
    p = codebook.params
    if message.length != p.msg_bits:
        raise ValueError(f"message length {message.length} != msg_bits {p.msg_bits}")
    return ColumnWord(int(codebook.words[message.value]), p.num_links)


def lookup(codebook: Codebook, candidate: ColumnWord) -> list[CodewordLocation]:
    """All (bin, position) slots holding ``candidate``, in ascending order."""
    if candidate.length != codebook.params.num_links:
        raise ValueError("candidate length must equal num_links")
    hits = codebook.reverse_index.get(candidate.value, ())
    return [index_location(codebook.params, m) for m in hits]


def location_to_message(params: SystemParams, loc: CodewordLocation) -> ColumnWord:
    return ColumnWord(message_index(params, loc), params.msg_bits)


def save_codebook(codebook: Codebook, path) -> None:
    """Binary export: magic, version, JSON header, then little-endian uint64 codewords."""
    header = json.dumps(
        {"params": codebook.params.to_dict(), "seed": codebook.seed}, sort_keys=True
    ).encode()
    with open(path, "wb") as fh:
        fh.write(FILE_MAGIC)
        fh.write(struct.pack("<HI", FILE_VERSION, len(header)))
        fh.write(header)
        fh.write(codebook.words.astype("<u8").tobytes())


def load_codebook(path) -> Codebook:
    data = Path(path).read_bytes()
    if data[:4] != FILE_MAGIC:
        raise ValueError("not a codebook file")
    version, hlen = struct.unpack_from("<HI", data, 4)
    if version != FILE_VERSION:
        raise ValueError(f"unsupported codebook file version {version}")
    off = 4 + struct.calcsize("<HI")
    header = json.loads(data[off : off + hlen])
    params = SystemParams.from_dict(header["params"])
    _check_size(params)
    words = np.frombuffer(data[off + hlen :], dtype="<u8").astype(np.uint64)
    if len(words) != 1 << params.msg_bits:
        raise ValueError("codeword count does not match header")
    return _build(params, int(header["seed"]), words)


def hex_dump(codebook: Codebook) -> str:
    p = codebook.params
    width = (p.num_links + 3) // 4
    lines = [f"# seed={codebook.seed} params={json.dumps(p.to_dict(), sort_keys=True)}"]
    for m, x in enumerate(codebook.words.tolist()):
        b, e = index_location(p, m)
        lines.append(f"{b} {e} {x:0{width}x}")
    return "\n".join(lines) + "\n"
