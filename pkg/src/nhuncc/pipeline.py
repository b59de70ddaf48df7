"""End-to-end simulation: message matrix -> encode/encrypt -> BSC -> joint decode.

Every random quantity comes from a sub-stream keyed by explicit seeds:

* messages:   ``(message_seed, trial)``
* nonces:     ``(nonce_seed, trial, column)``
* BSC noise:  ``(channel_seed, trial, column)``
* codebooks:  ``(codebook_seed, block)`` when an ensemble is requested

so any trial can be recomputed on its own and results do not depend on how
trials are spread over workers.
"""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bits import MASK64, ColumnWord, column_rng, stream_key
from .channel import bsc_noise
from .codebook import Codebook, generate_codebook
from .config import RunConfig
from .crypto import CipherKey, ColumnCipher, random_nonce
from .grandec import default_budget, grand_decode_column
from .params import SystemParams, binary_entropy
from .scheme import crypt2_encode_column, project_clear


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    block_error: bool
    column_errors: int
    abandoned: int
    queries: tuple
    noise_weights: tuple  # -1 where the decoder abandoned
    wall_clock: float = 0.0

    CSV_COLUMNS = ("trial", "block_error", "column_errors", "abandoned", "queries", "noise_weights")

    def csv_row(self) -> list:
        return [
            self.trial,
            int(self.block_error),
            self.column_errors,
            self.abandoned,
            ";".join(map(str, self.queries)),
            ";".join(map(str, self.noise_weights)),
        ]


class Simulator:
    def __init__(
        self,
        params: SystemParams,
        key: CipherKey,
        *,
        codebook_seed: int = 1,
        channel_seed: int = 2,
        nonce_seed: int = 3,
        message_seed: int = 4,
        budget: int = 0,
        trials: int = 1,
        codebooks: int = 1,
        codebook: Codebook | None = None,
    ):
        self.params = params
        self.key = key
        self.codebook_seed = codebook_seed
        self.channel_seed = channel_seed
        self.nonce_seed = nonce_seed
        self.message_seed = message_seed
        self.budget = budget or default_budget(params.wire_bits, params.flip_prob)
        self.trials = trials
        self.codebooks = codebooks
        self.cipher = ColumnCipher.for_params(key, params)
        self._codebook = codebook

    @classmethod
    def from_config(cls, config: RunConfig, params: SystemParams | None = None) -> "Simulator":
        return cls(
            params or config.params,
            config.key,
            codebook_seed=config.codebook_seed,
            channel_seed=config.channel_seed,
            nonce_seed=config.nonce_seed,
            message_seed=config.message_seed,
            budget=config.budget,
            trials=config.trials,
            codebooks=config.codebooks,
        )

    def _init_args(self):
        return (self.params, self.key), dict(
            codebook_seed=self.codebook_seed,
            channel_seed=self.channel_seed,
            nonce_seed=self.nonce_seed,
            message_seed=self.message_seed,
            budget=self.budget,
            trials=self.trials,
            codebooks=self.codebooks,
        )

    def codebook_seed_for(self, trial: int) -> int:
        if self.codebooks == 1:
            return self.codebook_seed
        block = trial * self.codebooks // self.trials
        return stream_key(self.codebook_seed, block) & (MASK64 >> 1)

    def codebook_for(self, trial: int) -> Codebook:
        seed = self.codebook_seed_for(trial)
        if self._codebook is None or self._codebook.seed != seed:
            self._codebook = generate_codebook(self.params, seed)
        return self._codebook

    def messages(self, trial: int) -> list[int]:
        k = self.params.msg_bits
        rng = column_rng(0x4D, self.message_seed, trial)
        return [int(x) for x in rng.integers(0, 1 << k, size=k)]

    def nonce(self, trial: int, column: int) -> int:
        return random_nonce(column_rng(0x4E, self.nonce_seed, trial, column), self.params.cipher_rand_bits)

    def run_trial(self, trial: int) -> TrialRecord:
        t0 = time.perf_counter()
        p = self.params
        n = p.wire_bits
        codebook = self.codebook_for(trial)
        msgs = self.messages(trial)
        errors = abandoned = 0
        queries, weights = [], []
        for j, m in enumerate(msgs):
            wire = crypt2_encode_column(codebook, self.cipher, m, self.nonce(trial, j))
            if project_clear(p, wire) != project_clear(p, int(codebook.words[m])):
                raise RuntimeError(f"clear-tail passthrough broken at trial {trial}, column {j}")
            noise = bsc_noise(n, p.flip_prob, column_rng(0x43, self.channel_seed, trial, j))
            res = grand_decode_column(ColumnWord(wire ^ noise, n), codebook, self.cipher, p.flip_prob, self.budget)
            queries.append(res.queries)
            weights.append(-1 if res.abandoned else res.noise_weight)
            abandoned += res.abandoned
            errors += res.abandoned or res.message.value != m
        return TrialRecord(
            trial, errors > 0, errors, abandoned, tuple(queries), tuple(weights), time.perf_counter() - t0
        )

    def run_range(self, start: int, stop: int) -> list[TrialRecord]:
        return [self.run_trial(t) for t in range(start, stop)]

    def run(self, trials: int | None = None, workers: int = 1) -> list[TrialRecord]:
        trials = self.trials if trials is None else trials
        if workers <= 1 or trials < 2 * workers:
            return self.run_range(0, trials)
        edges = [round(i * trials / (4 * workers)) for i in range(4 * workers + 1)]
        args, kw = self._init_args()
        out: list[TrialRecord] = []
        with ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(args, kw)) as ex:
            for chunk in ex.map(_worker_run, zip(edges[:-1], edges[1:])):
                out.extend(chunk)
        return out


_WORKER: Simulator | None = None


def _worker_init(args, kw):
    global _WORKER
    _WORKER = Simulator(*args, **kw)


def _worker_run(bounds):
    return _WORKER.run_range(*bounds)


def summarize(records: list[TrialRecord], params: SystemParams) -> dict:
    trials = len(records)
    cols = trials * params.msg_bits
    q = [x for r in records for x in r.queries]
    block = sum(r.block_error for r in records)
    col_err = sum(r.column_errors for r in records)
    return {
        "trials": trials,
        "block_errors": block,
        "bler": block / trials if trials else 0.0,
        "column_errors": col_err,
        "column_bler": col_err / cols if cols else 0.0,
        "abandoned": sum(r.abandoned for r in records),
        "abandon_rate": sum(r.abandoned for r in records) / cols if cols else 0.0,
        "mean_queries": sum(q) / len(q) if q else 0.0,
        "max_queries": max(q) if q else 0,
        "total_queries": sum(q),
    }


def run_roundtrip(config: RunConfig) -> tuple[dict, list[TrialRecord]]:
    sim = Simulator.from_config(config)
    records = sim.run(config.trials, config.workers)
    summary = summarize(records, config.params)
    summary["wall_clock_s"] = sum(r.wall_clock for r in records)
    return summary, records


def params_at_rate(base: SystemParams, n: int, rate: float, count_rand_bits: bool = False) -> SystemParams:
    """Same geometry as ``base`` at wire length ``n``, with ``msg_bits = floor(rate * n)``.

    With ``count_rand_bits`` the rate is the worst-case code rate
    ``(k_u + r0) / n`` and ``msg_bits = round(rate * n) - r0`` instead.
    """
    r = base.cipher_expand_bits
    ell = n - r
    if count_rand_bits:
        k = round(rate * n) - base.cipher_rand_bits
    else:
        k = math.floor(rate * n + 1e-9)
    w, e = base.eve_links, base.eps_bits
    return dataclasses.replace(
        base, num_links=ell, msg_bits=k, secure_bits=max(0, k - w - 2 * e)
    )


def sweep_points(config: RunConfig) -> list[tuple[float, SystemParams]]:
    base = config.params
    values = config.sweep_values
    if not values:
        raise ValueError("sweep_values is empty")
    points = []
    for v in values:
        if config.sweep_axis == "n":
            n = int(v)
            if config.rate_fraction > 0:
                rate = config.rate_fraction * (1.0 - binary_entropy(base.flip_prob))
            else:
                rate = base.msg_bits / base.wire_bits
            points.append((n, params_at_rate(base, n, rate)))
        else:
            points.append((float(v), dataclasses.replace(base, flip_prob=float(v))))
    return points


SWEEP_COLUMNS = (
    "axis", "value", "n", "msg_bits", "flip_prob", "effective_rate", "code_rate", "capacity",
    "trials", "block_errors", "bler", "column_errors", "column_bler", "abandoned", "mean_queries",
)


def bler_sweep(config: RunConfig) -> list[dict]:
    rows = []
    for value, params in sweep_points(config):
        sim = Simulator.from_config(config, params)
        s = summarize(sim.run(config.trials, config.workers), params)
        rows.append(
            {
                "axis": config.sweep_axis,
                "value": value,
                "n": params.wire_bits,
                "msg_bits": params.msg_bits,
                "flip_prob": params.flip_prob,
                "effective_rate": params.msg_bits / params.wire_bits,
                "code_rate": (params.msg_bits + params.cipher_rand_bits) / params.wire_bits,
                "capacity": 1.0 - binary_entropy(params.flip_prob),
                **{k: s[k] for k in SWEEP_COLUMNS if k in s},
            }
        )
    return rows


# -- error exponent ----------------------------------------------------------

DEFAULT_EXPONENT_NS = (12, 16, 20, 24)
MIN_ERROR_EVENTS = 20


@dataclass(frozen=True)
class ExponentFit:
    rate: float
    flip_prob: float
    ns: tuple
    column_bler: tuple
    column_errors: tuple
    slope: float | None  # fitted -(1/n) log2 BLER per unit n; None if any BLER is zero
    slope_low: float | None
    slope_high: float | None
    theory: float | None
    warnings: tuple = ()

    @property
    def ratio(self) -> float | None:
        if self.slope is None or not self.theory:
            return None
        return self.slope / self.theory


def fit_exponent(ns, bler, confidence: float = 0.95):
    """Least-squares slope of ``-log2 BLER`` against ``n`` with a t-based band."""
    from scipy import stats

    if len(ns) < 2 or any(b <= 0 for b in bler):
        return None, None, None
    y = [-math.log2(b) for b in bler]
    fit = stats.linregress(ns, y)
    if len(ns) > 2:
        half = stats.t.ppf(0.5 + confidence / 2, len(ns) - 2) * fit.stderr
    else:
        half = float("nan")
    return float(fit.slope), float(fit.slope - half), float(fit.slope + half)


def empirical_exponent(
    base: SystemParams,
    n_list,
    trials: int,
    *,
    rate: float = 0.5,
    key: CipherKey | None = None,
    codebooks: int = 1,
    seeds: tuple = (1, 2, 3, 4),
    workers: int = 1,
) -> tuple[ExponentFit, list[dict]]:
    """Per-column BLER over increasing ``n`` at fixed code rate ``(k_u + r0) / n``.

    ``base`` supplies the geometry (w, eps_bits, r, r0) and ``p``; ``msg_bits``
    and ``num_links`` are recomputed for every ``n``.
    """
    from .exponent import error_exponent

    key = key or CipherKey.from_hex("000102030405060708090a0b0c0d0e0f")
    cb_seed, ch_seed, nonce_seed, msg_seed = seeds
    p = base.flip_prob
    capacity = 1.0 - binary_entropy(p)
    theory = error_exponent(rate, p) if 0 < p and rate < capacity else None
    rows, bler, errs, warnings = [], [], [], []
    for n in n_list:
        params = params_at_rate(base, int(n), rate, count_rand_bits=True)
        sim = Simulator(
            params, key, codebook_seed=cb_seed, channel_seed=ch_seed, nonce_seed=nonce_seed,
            message_seed=msg_seed, trials=trials, codebooks=codebooks,
        )
        s = summarize(sim.run(trials, workers), params)
        if 0 < p and s["column_errors"] < MIN_ERROR_EVENTS:
            warnings.append(f"n={n}: only {s['column_errors']} column errors; BLER estimate is unreliable")
        bler.append(s["column_bler"])
        errs.append(s["column_errors"])
        rows.append(
            {
                "n": int(n),
                "msg_bits": params.msg_bits,
                "rate": rate,
                "flip_prob": p,
                "eps_theory": theory,
                "columns": trials * params.msg_bits,
                "column_errors": s["column_errors"],
                "column_bler": s["column_bler"],
                "bler": s["bler"],
                "mean_queries": s["mean_queries"],
            }
        )
    slope, lo, hi = fit_exponent([r["n"] for r in rows], bler)
    for r in rows:
        r["slope"] = slope
    fit = ExponentFit(rate, p, tuple(int(n) for n in n_list), tuple(bler), tuple(errs), slope, lo, hi, theory, tuple(warnings))
    return fit, rows


def exponent_experiment(config: RunConfig) -> tuple[ExponentFit, list[dict]]:
    return empirical_exponent(
        config.params,
        config.sweep_values or DEFAULT_EXPONENT_NS,
        config.trials,
        rate=config.code_rate,
        key=config.key,
        codebooks=config.codebooks,
        seeds=(config.codebook_seed, config.channel_seed, config.nonce_seed, config.message_seed),
        workers=config.workers,
    )


# -- security meters ---------------------------------------------------------


def codebook_seeds(config: RunConfig) -> list[int]:
    if config.codebooks == 1:
        return [config.codebook_seed]
    return [stream_key(config.codebook_seed, b) & (MASK64 >> 1) for b in range(config.codebooks)]


def leakage_experiment(config: RunConfig) -> tuple[dict, list[dict]]:
    from .secmeter import exact_leakage

    p = config.params
    omega = config.omega or tuple(range(p.num_links - p.eve_links, p.num_links))
    targets = config.target_indices or tuple(range(p.secure_bits))
    rows = []
    for seed in codebook_seeds(config):
        cb = generate_codebook(p, seed)
        for j in targets:
            rep = exact_leakage(cb, omega, (j,))
            rows.append({"codebook_seed": seed, "targets": str(j), "mutual_information": rep.mutual_information})
        full = exact_leakage(cb, omega, range(p.msg_bits))
        rows.append({"codebook_seed": seed, "targets": "all", "mutual_information": full.mutual_information})
    single = [r["mutual_information"] for r in rows if r["targets"] != "all"]
    full = [r["mutual_information"] for r in rows if r["targets"] == "all"]
    per_index = {
        str(j): sum(r["mutual_information"] for r in rows if r["targets"] == str(j)) / len(full) for j in targets
    }
    summary = {
        "omega": list(omega),
        "target_indices": list(targets),
        "codebooks": len(full),
        "per_index_mean": per_index,
        "max_single": max(single) if single else None,
        "full_message_mean": sum(full) / len(full),
    }
    return summary, rows


def bins_experiment(config: RunConfig) -> tuple[dict, list[dict]]:
    from .secmeter import bin_concentration

    p = config.params
    rows = []
    for seed in codebook_seeds(config):
        st = bin_concentration(generate_codebook(p, seed), config.epsilon_prime)
        rows.append(
            {
                "codebook_seed": seed,
                "bins": p.num_bins,
                "suffixes": st.counts.shape[1],
                "delta": p.delta,
                "row_sums_equal_delta": bool((st.counts.sum(axis=1) == p.delta).all()),
                "expected": st.expected,
                "mean": st.mean,
                "min": st.min,
                "max": st.max,
                "concentration_pass_fraction": st.concentration_pass_fraction,
                "chi2_stat": st.chi2_stat,
                "chi2_df": st.chi2_df,
                "chi2_pvalue": st.chi2_pvalue,
            }
        )
    summary = {
        "codebooks": len(rows),
        "all_row_sums_equal_delta": all(r["row_sums_equal_delta"] for r in rows),
        "min_chi2_pvalue": min(r["chi2_pvalue"] for r in rows),
        "mean_pass_fraction": sum(r["concentration_pass_fraction"] for r in rows) / len(rows),
    }
    return summary, rows


def make_adversary(config: RunConfig):
    from .secmeter import games as g

    if config.game == "cca1":
        table = {
            "random-guesser": g.RandomGuesser,
            "first-bit-correlator": g.FirstBitCorrelator,
            "histogram": g.HistogramDistinguisher,
        }
    else:
        table = {
            "random-guesser": g.SchemeRandomGuesser,
            "suffix-reader": lambda: g.SuffixReader(config.challenge_index),
            "cipher-bit-reader": g.CipherBitReader,
        }
    if config.adversary not in table:
        raise ValueError(f"adversary {config.adversary!r} does not play the {config.game} game")
    return table[config.adversary]()


def game_experiment(config: RunConfig) -> tuple[dict, list[dict]]:
    """The game seed is ``nonce_seed``; the individual game uses the codebook at ``codebook_seed``."""
    from .secmeter import run_ind_cca1_game, run_individual_game

    adv = make_adversary(config)
    if config.game == "cca1":
        t = run_ind_cca1_game(
            config.game_plain_bits, config.game_rand_bits, adv, config.trials, config.nonce_seed,
            scheme_id=config.cipher_scheme,
        )
    else:
        if not 0 <= config.challenge_index < config.params.msg_bits:
            raise ValueError("challenge_index outside the message")
        cb = generate_codebook(config.params, config.codebook_seed)
        t = run_individual_game(cb, adv, config.trials, config.nonce_seed, scheme_id=config.cipher_scheme)
    d = t.to_dict()
    row = {k: v for k, v in d.items() if k != "challenge_index_counts"}
    d["bound_2_over_sqrt_trials"] = 2.0 / math.sqrt(t.trials)
    return d, [row]


# -- output ------------------------------------------------------------------

CSV_SCHEMA_VERSION = 1


def version_stamp() -> str:
    from . import __version__

    rev = "unknown"
    try:
        import subprocess
        from pathlib import Path

        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            rev = out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"nhuncc {__version__} ({rev})"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, experiment: str, columns, rows) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        fh.write(f"# nhuncc {experiment} schema v{CSV_SCHEMA_VERSION}\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for r in rows:
            wr.writerow([_cell(x) for x in (r if isinstance(r, (list, tuple)) else [r.get(c) for c in columns])])


def _jsonable(v):
    if dataclasses.is_dataclass(v):
        return _jsonable(dataclasses.asdict(v))
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if hasattr(v, "item"):
        return v.item()
    return v


def _run(config: RunConfig):
    """Returns ``(columns, rows, summary)`` for the configured experiment."""
    kind = config.experiment
    if kind == "roundtrip":
        summary, records = run_roundtrip(config)
        return TrialRecord.CSV_COLUMNS, [r.csv_row() for r in records], summary
    if kind == "bler_sweep":
        rows = bler_sweep(config)
        return SWEEP_COLUMNS, rows, {"points": len(rows)}
    if kind == "exponent":
        fit, rows = exponent_experiment(config)
        cols = tuple(rows[0].keys())
        return cols, rows, {**dataclasses.asdict(fit), "ratio": fit.ratio}
    if kind == "leakage":
        summary, rows = leakage_experiment(config)
        return ("codebook_seed", "targets", "mutual_information"), rows, summary
    if kind == "bins":
        summary, rows = bins_experiment(config)
        return tuple(rows[0].keys()), rows, summary
    if kind == "game":
        summary, rows = game_experiment(config)
        return tuple(rows[0].keys()), rows, summary
    raise ValueError(f"unknown experiment {kind!r}")


def run_experiment(config: RunConfig) -> dict:
    """Run the configured experiment and write ``<experiment>.csv`` and ``<experiment>.json``.

    Files are written to a scratch directory first and moved into
    ``config.output`` only after the whole run succeeded, so a failure leaves
    no partial output behind.
    """
    import json
    import os
    import tempfile
    from pathlib import Path

    columns, rows, summary = _run(config)
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    names = {"csv": out / f"{config.experiment}.csv", "json": out / f"{config.experiment}.json"}
    with tempfile.TemporaryDirectory(dir=out, prefix=".partial-") as tmp:
        tmp_csv = Path(tmp) / names["csv"].name
        tmp_json = Path(tmp) / names["json"].name
        write_csv(tmp_csv, config.experiment, columns, rows)
        doc = {
            "version": version_stamp(),
            "csv_schema": CSV_SCHEMA_VERSION,
            "config": config.to_dict(),
            "summary": _jsonable(summary),
        }
        tmp_json.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        os.replace(tmp_csv, names["csv"])
        os.replace(tmp_json, names["json"])
    return {"files": names, "summary": summary}
