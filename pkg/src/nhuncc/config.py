"""Run configuration: one flat key-value record, stored as JSON."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .crypto import SCHEMES, CipherKey
from .params import SystemParams, derive_params

EXPERIMENTS = ("roundtrip", "bler_sweep", "exponent", "leakage", "bins", "game")
GAMES = ("cca1", "individual")
ADVERSARIES = ("random-guesser", "first-bit-correlator", "histogram", "suffix-reader", "cipher-bit-reader")

PARAM_KEYS = tuple(f.name for f in dataclasses.fields(SystemParams))
DERIVE_KEYS = ("num_links", "flip_prob", "eve_links", "eps_bits", "cipher_rand_bits", "cipher_expand_bits")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    codebook_seed: int = 1
    channel_seed: int = 2
    nonce_seed: int = 3
    message_seed: int = 4
    cipher_key: str = "000102030405060708090a0b0c0d0e0f"
    cipher_scheme: str = "blake2b-ctr"
    trials: int = 1000
    budget: int = 0  # 0 selects the default weight-bounded budget
    experiment: str = "roundtrip"
    output: str = "out"
    workers: int = 1
    # bler_sweep / exponent
    sweep_axis: str = "n"
    sweep_values: tuple = ()
    rate_fraction: float = 0.0  # effective rate as a fraction of capacity; 0 keeps k_u / (l + r)
    code_rate: float = 0.5  # exponent experiment: (k_u + r0) / (l + r)
    codebooks: int = 1  # codebook ensemble size; trials are split into equal blocks
    # leakage / bins
    omega: tuple = ()  # codeword rows seen by the weak eavesdropper; empty = clear tail
    target_indices: tuple = ()  # empty = every individually-secure index, one at a time
    epsilon_prime: float = 0.5
    # game
    game: str = "individual"
    adversary: str = "suffix-reader"
    challenge_index: int = 0
    game_plain_bits: int = 32
    game_rand_bits: int = 32

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.cipher_scheme not in SCHEMES:
            raise ConfigError(f"unknown cipher scheme {self.cipher_scheme!r}")
        try:
            CipherKey.from_hex(self.cipher_key)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.trials < 1 or self.workers < 1 or self.codebooks < 1:
            raise ConfigError("trials, workers and codebooks must be positive")
        if self.codebooks > self.trials:
            raise ConfigError("codebooks cannot exceed trials")
        if self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if self.sweep_axis not in ("n", "p"):
            raise ConfigError("sweep_axis must be 'n' or 'p'")
        if self.game not in GAMES:
            raise ConfigError(f"game must be one of {GAMES}")
        if self.adversary not in ADVERSARIES:
            raise ConfigError(f"adversary must be one of {ADVERSARIES}")

    @property
    def key(self) -> CipherKey:
        return CipherKey.from_hex(self.cipher_key, self.cipher_scheme)

    def to_dict(self) -> dict:
        out = self.params.to_dict()
        for f in dataclasses.fields(self):
            if f.name == "params":
                continue
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        run_fields = {f.name: f for f in dataclasses.fields(cls) if f.name != "params"}
        unknown = set(d) - set(run_fields) - set(PARAM_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        pd = {k: d.pop(k) for k in PARAM_KEYS if k in d}
        try:
            if "msg_bits" in pd:
                pd.setdefault(
                    "secure_bits",
                    max(0, int(pd["msg_bits"]) - int(pd.get("eve_links", 0)) - 2 * int(pd.get("eps_bits", 0))),
                )
                params = SystemParams.from_dict(pd)
            else:
                missing = set(DERIVE_KEYS) - set(pd)
                if missing:
                    raise ConfigError(f"missing parameter keys: {sorted(missing)}")
                params = derive_params(**{k: pd[k] for k in DERIVE_KEYS})
                if "secure_bits" in pd:
                    params = dataclasses.replace(params, secure_bits=int(pd["secure_bits"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad parameters: {exc}") from None
        kw = {}
        for name, value in d.items():
            default = run_fields[name].default
            try:
                if isinstance(default, tuple):
                    kw[name] = tuple(value)
                elif isinstance(default, bool):
                    kw[name] = bool(value)
                elif isinstance(default, int):
                    if isinstance(value, float) and not value.is_integer():
                        raise ValueError(value)
                    kw[name] = int(value)
                elif isinstance(default, float):
                    kw[name] = float(value)
                else:
                    kw[name] = str(value)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {name}: {value!r}") from None
        return cls(params=params, **kw)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a flat JSON object")
        return cls.from_dict(data)

