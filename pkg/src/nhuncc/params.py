"""Scheme parameters: derivation, validation and flat key-value serialization."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path


class InfeasibleParameters(ValueError):
    """No admissible message size exists for the requested link/noise setup."""


def binary_entropy(p: float) -> float:
    """Binary entropy in bits, with 0 log 0 taken as 0."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"binary_entropy needs 0 <= p <= 1, got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class SystemParams:
    """All parameters of the secure/reliable multipath scheme.

    Columns are ``num_links`` bits long. The first ``bin_index_bits`` message
    bits select a bin and the remaining ``position_bits`` select a codeword
    inside it. The first ``encrypted_links`` coded bits go through the
    cipher, the last ``eve_links`` bits are sent in the clear.
    """

    num_links: int
    flip_prob: float
    eve_links: int
    msg_bits: int
    secure_bits: int
    eps_bits: int
    cipher_rand_bits: int
    cipher_expand_bits: int

    def __post_init__(self):
        validate(self)

    @classmethod
    def unchecked(cls, **fields) -> "SystemParams":
        """Build without validation. Only for deliberately broken test fixtures."""
        obj = object.__new__(cls)
        for f in dataclasses.fields(cls):
            object.__setattr__(obj, f.name, fields[f.name])
        return obj

    @property
    def feasible(self) -> bool:
        """Whether ``msg_bits <= num_links - noise_rate - eps`` (reliable at all).

        Structural invariants are enforced on construction; this bound is only
        reported, so over-capacity configurations can still be simulated.
        """
        return self.msg_bits <= self.num_links - self.noise_rate - self.eps + 1e-12

    @property
    def noise_rate(self) -> float:
        return self.num_links * binary_entropy(self.flip_prob)

    @property
    def encrypted_links(self) -> int:
        return self.num_links - self.eve_links

    @property
    def eps(self) -> float:
        return self.eps_bits / self.msg_bits

    @property
    def position_bits(self) -> int:
        return self.eve_links + self.eps_bits

    @property
    def bin_index_bits(self) -> int:
        return self.msg_bits - self.position_bits

    @property
    def delta(self) -> int:
        """Codewords per bin."""
        return 1 << self.position_bits

    @property
    def num_bins(self) -> int:
        return 1 << self.bin_index_bits

    @property
    def wire_bits(self) -> int:
        """Transmitted column length, links plus cipher expansion."""
        return self.num_links + self.cipher_expand_bits

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SystemParams":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
        missing = names - set(d)
        if missing:
            raise ValueError(f"missing parameter keys: {sorted(missing)}")
        kw = {k: (float(v) if k == "flip_prob" else _as_int(k, v)) for k, v in d.items()}
        return cls(**kw)


def _as_int(name, v) -> int:
    if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
        raise ValueError(f"{name} must be an integer, got {v!r}")
    return int(v)


def validate(params: SystemParams) -> None:
    """Raise ``ValueError`` if any invariant of ``params`` is violated."""
    ell, p, w = params.num_links, params.flip_prob, params.eve_links
    k_u, k_s = params.msg_bits, params.secure_bits
    if ell < 1:
        raise ValueError("num_links must be positive")
    if not 0.0 <= p < 0.5:
        raise ValueError(f"flip_prob must lie in [0, 1/2), got {p}")
    if not 0 <= w < ell:
        raise ValueError(f"eve_links must satisfy 0 <= w < num_links, got w={w}")
    if k_u < 1:
        raise ValueError("msg_bits must be positive")
    if params.eps_bits < 0 or k_s < 0:
        raise ValueError("eps_bits and secure_bits must be non-negative")
    if not 0 <= params.cipher_rand_bits <= params.cipher_expand_bits:
        raise ValueError("need 0 <= cipher_rand_bits <= cipher_expand_bits")
    if params.bin_index_bits < 1:
        raise ValueError("need at least one bin index bit (msg_bits > eve_links + eps_bits)")
    if k_s > max(0, k_u - w - 2 * params.eps_bits):
        raise ValueError(f"secure_bits={k_s} exceeds msg_bits - w - 2*eps_bits")


def derive_params(
    num_links: int,
    flip_prob: float,
    eve_links: int,
    eps_bits: int,
    cipher_rand_bits: int,
    cipher_expand_bits: int,
) -> SystemParams:
    """Pick the largest admissible message size and the secure count for a setup.

    ``msg_bits`` is the largest integer with
    ``msg_bits <= num_links - noise_rate - eps_bits``; the secure count is
    ``max(0, msg_bits - eve_links - 2 * eps_bits)``.
    """
    if num_links < 2:
        raise ValueError("num_links must be at least 2")
    if not 0.0 <= flip_prob < 0.5:
        raise ValueError(f"flip_prob must lie in [0, 1/2), got {flip_prob}")
    if not 0 <= eve_links < num_links:
        raise ValueError("eve_links must satisfy 0 <= w < num_links")
    if not 0 <= cipher_rand_bits <= cipher_expand_bits:
        raise ValueError("need 0 <= cipher_rand_bits <= cipher_expand_bits")
    if eps_bits < 0:
        raise ValueError("eps_bits must be non-negative")

    nu = num_links * binary_entropy(flip_prob)
    k_u = num_links
    while k_u >= 1 and k_u > num_links - nu - eps_bits + 1e-12:
        k_u -= 1
    if k_u < 1:
        raise InfeasibleParameters(
            f"no msg_bits >= 1 fits num_links - noise_rate - eps_bits = {num_links - nu - eps_bits:.4f}"
        )
    if k_u - (eve_links + eps_bits) < 1:
        raise InfeasibleParameters(
            f"msg_bits={k_u} leaves no bin index bits after w + eps_bits = {eve_links + eps_bits}"
        )
    return SystemParams(
        num_links=num_links,
        flip_prob=flip_prob,
        eve_links=eve_links,
        msg_bits=k_u,
        secure_bits=max(0, k_u - eve_links - 2 * eps_bits),
        eps_bits=eps_bits,
        cipher_rand_bits=cipher_rand_bits,
        cipher_expand_bits=cipher_expand_bits,
    )


def check_rate_condition(params: SystemParams) -> dict:
    """Compare the worst-case code rate ``(k_u + r0) / (l + r)`` with BSC capacity."""
    n = params.wire_bits
    lhs = (params.msg_bits + params.cipher_rand_bits) / n
    capacity = 1.0 - binary_entropy(params.flip_prob)
    return {
        "satisfied": lhs < capacity,
        "lhs": lhs,
        "capacity": capacity,
        "effective_rate": params.msg_bits / n,
    }


def save_params(params: SystemParams, path) -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=2, sort_keys=True) + "\n")


def load_params(path) -> SystemParams:
    return SystemParams.from_dict(json.loads(Path(path).read_text()))
