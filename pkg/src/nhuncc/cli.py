"""Command-line entry point.

Every ``RunConfig`` / ``SystemParams`` key is accepted as ``--key-name``;
list-valued keys take comma-separated values. ``--config FILE`` loads a JSON
config first and flags override it.

Exit codes: 0 success, 2 configuration error, 3 size-guard violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .codebook import GuardViolation, generate_codebook, hex_dump, save_codebook
from .config import PARAM_KEYS, ConfigError, RunConfig
from .params import check_rate_condition

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3

SUBCOMMANDS = {
    "params": None,
    "codebook": None,
    "roundtrip": "roundtrip",
    "sweep": "bler_sweep",
    "exponent": "exponent",
    "leakage": "leakage",
    "bins": "bins",
    "game": "game",
}

_RUN_KEYS = tuple(f.name for f in dataclasses.fields(RunConfig) if f.name not in ("params", "experiment"))
_LIST_KEYS = {f.name for f in dataclasses.fields(RunConfig) if isinstance(f.default, tuple)}


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    for key in PARAM_KEYS + _RUN_KEYS:
        p.add_argument(_flag(key), dest=key, default=None, metavar=key.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhuncc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        _add_config_flags(p)
        if name == "codebook":
            p.add_argument("--export", help="write the binary codebook file here")
            p.add_argument("--hex", action="store_true", help="print a hex dump to stdout")
        if name in ("params", "codebook"):
            continue
        p.add_argument("--save-config", help="write the resolved config to this file and continue")
    return parser


def _parse_value(key: str, raw: str):
    if key in _LIST_KEYS:
        return [x for x in raw.split(",") if x.strip()]
    return raw


def resolve_config(args: argparse.Namespace, experiment: str | None) -> RunConfig:
    data: dict = {}
    if args.config:
        loaded = RunConfig.load(args.config)
        data = loaded.to_dict()
        flags_change_params = any(getattr(args, k) is not None for k in PARAM_KEYS)
        if flags_change_params and "msg_bits" not in {k for k in PARAM_KEYS if getattr(args, k) is not None}:
            # let msg_bits / secure_bits be re-derived from the new geometry
            data.pop("msg_bits")
            data.pop("secure_bits")
    for key in PARAM_KEYS + _RUN_KEYS:
        raw = getattr(args, key)
        if raw is not None:
            data[key] = _parse_value(key, raw)
    if experiment:
        data["experiment"] = experiment
    for key in ("flip_prob", "rate_fraction", "code_rate", "epsilon_prime"):
        if isinstance(data.get(key), str):
            try:
                data[key] = float(data[key])
            except ValueError:
                raise ConfigError(f"bad value for {key}: {data[key]!r}") from None
    for key in PARAM_KEYS:
        if isinstance(data.get(key), str) and key != "flip_prob":
            try:
                data[key] = int(data[key])
            except ValueError:
                raise ConfigError(f"bad value for {key}: {data[key]!r}") from None
    for key in _LIST_KEYS:
        if key in data:
            data[key] = [_number(key, x) for x in data[key]]
    return RunConfig.from_dict(data)


def _number(key, x):
    if not isinstance(x, str):
        return x
    try:
        return int(x)
    except ValueError:
        try:
            return float(x)
        except ValueError:
            raise ConfigError(f"bad list entry for {key}: {x!r}") from None


def _print(doc) -> None:
    from .pipeline import _jsonable

    print(json.dumps(_jsonable(doc), indent=2, sort_keys=True))


def main(argv=None) -> int:
    from .pipeline import run_experiment

    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args, SUBCOMMANDS[args.command])
        if args.command == "params":
            _print({"params": cfg.params.to_dict(), "feasible": cfg.params.feasible, **check_rate_condition(cfg.params)})
            return EXIT_OK
        if args.command == "codebook":
            cb = generate_codebook(cfg.params, cfg.codebook_seed)
            if args.export:
                save_codebook(cb, args.export)
            if args.hex:
                sys.stdout.write(hex_dump(cb))
            else:
                _print({"seed": cb.seed, "codewords": len(cb.words), "collisions": cb.collision_count,
                        "exported": args.export})
            return EXIT_OK
        if args.save_config:
            cfg.save(args.save_config)
        result = run_experiment(cfg)
        _print({"files": {k: str(v) for k, v in result["files"].items()}, "summary": result["summary"]})
        return EXIT_OK
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
