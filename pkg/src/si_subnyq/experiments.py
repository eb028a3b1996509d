"""Seeded Monte Carlo experiment engine behind the CLI.

A run draws per-trial instances (design + planted sparse signal), pushes
them through sampling and recovery, and writes one CSV row per trial plus a
JSON summary. Everything is deterministic given the master seed: trial seeds
derive from it via ``numpy.random.SeedSequence(master, spawn_key=(trial,))``
and are recorded in each row, so any single trial can be reproduced in
isolation.

Determinism note: all output bytes are reproducible for a fixed seed and
platform except the measured ``wall_time_s`` column (and the ``timing``
block of the summary), which report real elapsed time.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import ctf, scenarios
from .errors import ConfigError, SiSubnyqError
from .sampling_design import (
    MATRIX_KINDS,
    compressive_sample,
    kruskal_rank,
    make_cs_matrix,
    make_design,
)
from .si_core import FrequencyGrid
from .sparse_model import SparsityProfile, synthesize
from .tolerances import DEFAULT_TOLERANCES, Tolerances

MODES = ("generic", "periodic_sparsity", "multiband", "verify")
CSV_HEADER = "trial,seed,support_true,support_found,exact,nmse,rank_q,sigma_a,wall_time_s"
SWEEP_HEADER = "value,success_rate,median_nmse,trials"
SWEEP_VARS = ("p", "k", "N")
_SIGMA_AUTO_MAX_M = 16


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "generic"
    m: int = 6
    k: int = 2
    p: int = 4
    N: int = 16
    seed: int = 0
    trials: int = 1
    matrix_kind: str = "gaussian"
    solver: str = "exhaustive"
    tolerances: Tolerances = DEFAULT_TOLERANCES
    out_dir: str | None = None
    compute_sigma: bool | None = None
    # periodic_sparsity mode
    base_period: float = 1.0
    s_pattern: tuple[int, ...] | None = None
    # multiband mode
    n_bands: int = 1
    band_width: float | None = None
    T: float = 1.0
    cosets: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 1 <= self.p <= self.m:
            raise ConfigError(f"p={self.p} must satisfy 1 <= p <= m={self.m}")
        if not 0 <= self.k <= self.m:
            raise ConfigError(f"k={self.k} must satisfy 0 <= k <= m={self.m}")
        if self.N < 1:
            raise ConfigError(f"N={self.N} must be >= 1")
        if self.matrix_kind not in MATRIX_KINDS:
            raise ConfigError(
                f"matrix_kind must be one of {MATRIX_KINDS}, got {self.matrix_kind!r}")
        if self.solver not in ctf.SOLVERS:
            raise ConfigError(f"solver must be one of {ctf.SOLVERS}, got {self.solver!r}")
        if self.s_pattern is not None:
            pattern = tuple(sorted(int(i) for i in self.s_pattern))
            if len(pattern) != self.k:
                raise ConfigError(
                    f"s_pattern has {len(pattern)} entries but k={self.k}")
            object.__setattr__(self, "s_pattern", pattern)
        if self.cosets is not None:
            cosets = tuple(int(c) for c in self.cosets)
            if len(cosets) != self.p:
                raise ConfigError(f"cosets has {len(cosets)} entries but p={self.p}")
            object.__setattr__(self, "cosets", cosets)


_CONFIG_FIELDS = {
    "mode": str, "m": int, "k": int, "p": int, "N": int, "seed": int,
    "trials": int, "matrix_kind": str, "solver": str, "out_dir": str,
    "compute_sigma": bool, "base_period": float, "s_pattern": list,
    "n_bands": int, "band_width": float, "T": float, "cosets": list,
    "tolerances": dict,
}


def config_from_json(doc: dict) -> ExperimentConfig:
    """Validate a parsed JSON document into an ExperimentConfig; every
    complaint names the offending field."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    kwargs = {}
    for key, value in doc.items():
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"unknown config field {key!r}")
        if key == "tolerances":
            if not isinstance(value, dict):
                raise ConfigError("field 'tolerances' must be an object")
            try:
                kwargs["tolerances"] = DEFAULT_TOLERANCES.with_overrides(
                    **{k: float(v) for k, v in value.items()})
            except TypeError as exc:
                raise ConfigError(f"field 'tolerances' has an unknown entry: {exc}") from exc
            continue
        if key in ("s_pattern", "cosets"):
            if value is not None and not isinstance(value, list):
                raise ConfigError(f"field {key!r} must be a list of integers")
            kwargs[key] = None if value is None else tuple(int(v) for v in value)
            continue
        expected = _CONFIG_FIELDS[key]
        if value is None and key in ("out_dir", "band_width", "compute_sigma"):
            kwargs[key] = None
            continue
        try:
            kwargs[key] = expected(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field {key!r} must be {expected.__name__}: {exc}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_json(doc)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    support_true: tuple[int, ...]
    support_found: tuple[int, ...]
    exact: bool
    nmse: float
    rank_q: int
    sigma_a: int | None
    wall_time_s: float
    collision: bool = False


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Documented derivation: SeedSequence(master, spawn_key=(trial,))."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(trial_index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _nmse(d_true: np.ndarray, d_hat: np.ndarray, tol: Tolerances) -> float:
    energy = float(np.linalg.norm(d_true) ** 2)
    if energy == 0.0:
        return 0.0 if float(np.linalg.norm(d_hat)) <= tol.zero_energy_tol else math.inf
    return float(np.linalg.norm(d_hat - d_true) ** 2) / energy


def _sigma_feasible(cfg: ExperimentConfig) -> bool:
    if cfg.compute_sigma is not None:
        return cfg.compute_sigma
    return cfg.m <= _SIGMA_AUTO_MAX_M


def _filtered_matrix(cfg: ExperimentConfig, rng: np.random.Generator,
                     feasible: bool) -> tuple[np.ndarray, int | None]:
    """Draw A, redrawing until the Kruskal rank reaches min(2k, p, m) when
    the exhaustive rank computation is feasible."""
    target = min(2 * cfg.k, cfg.p, cfg.m)
    for _ in range(64):
        a_matrix = make_cs_matrix(cfg.matrix_kind, cfg.p, cfg.m, rng)
        if not feasible:
            return a_matrix, None
        sigma = kruskal_rank(a_matrix, tol=cfg.tolerances)
        if sigma >= target:
            return a_matrix, sigma
    raise SiSubnyqError(
        f"failed to draw A with Kruskal rank >= {target} in 64 attempts")


def _finish(cfg: ExperimentConfig, trial_index: int, seed: int, started: float,
            support_true: frozenset[int], d_true: np.ndarray,
            result: ctf.RecoveryResult, sigma: int | None) -> TrialRecord:
    tol = cfg.tolerances
    nmse = _nmse(d_true, result.coefficients.sequences, tol)
    exact = support_true == result.support and nmse <= tol.recovery_rel_tol
    collision = (support_true != result.support
                 and result.diagnostics["residual"] <= tol.mmv_residual_rel)
    return TrialRecord(
        trial=trial_index, seed=seed,
        support_true=tuple(sorted(support_true)),
        support_found=tuple(sorted(result.support)),
        exact=exact, nmse=nmse,
        rank_q=result.diagnostics["rank_q"],
        sigma_a=sigma,
        wall_time_s=time.perf_counter() - started,
        collision=collision)


def _generic_trial(cfg: ExperimentConfig, trial_index: int, seed: int) -> TrialRecord:
    started = time.perf_counter()
    tol = cfg.tolerances
    rng = np.random.default_rng(seed)
    a_matrix, sigma = _filtered_matrix(cfg, rng, _sigma_feasible(cfg))
    grid = FrequencyGrid(cfg.N)
    design = make_design(a_matrix, grid, tol=tol)
    support = frozenset(int(i) for i in rng.choice(cfg.m, size=cfg.k, replace=False))
    d = synthesize(SparsityProfile(cfg.m, cfg.k, support), cfg.N, rng)
    y = compressive_sample(d, design, tol)
    result = ctf.recover(y, design, k_max=cfg.k, solver=cfg.solver, tol=tol)
    return _finish(cfg, trial_index, seed, started, support, d.sequences, result, sigma)


def _periodic_trial(cfg: ExperimentConfig, trial_index: int, seed: int) -> TrialRecord:
    started = time.perf_counter()
    tol = cfg.tolerances
    rng = np.random.default_rng(seed)
    if cfg.s_pattern is not None:
        pattern = frozenset(cfg.s_pattern)
    else:
        pattern = frozenset(int(i) for i in rng.choice(cfg.m, size=cfg.k, replace=False))
    feasible = _sigma_feasible(cfg)
    target = min(2 * cfg.k, cfg.p, cfg.m)
    sigma = None
    for attempt in range(64):
        sc = scenarios.PeriodicSparsityScenario(
            m=cfg.m, k=cfg.k, s_pattern=pattern, base_period=cfg.base_period,
            n_blocks=cfg.N, seed=trial_seed(seed, attempt), p=cfg.p,
            matrix_kind=cfg.matrix_kind)
        build = scenarios.build_periodic_sparsity(sc, tol)
        if not feasible:
            break
        sigma = kruskal_rank(build.design.A, tol=tol)
        if sigma >= target:
            break
    y = compressive_sample(build.signal.coefficients, build.design, tol)
    result = ctf.recover(y, build.design, k_max=cfg.k, solver=cfg.solver, tol=tol)
    return _finish(cfg, trial_index, seed, started, pattern,
                   build.signal.coefficients.sequences, result, sigma)


def _multiband_trial(cfg: ExperimentConfig, trial_index: int, seed: int) -> TrialRecord:
    started = time.perf_counter()
    tol = cfg.tolerances
    rng = np.random.default_rng(seed)
    band_width = cfg.band_width if cfg.band_width is not None else 2 * np.pi / (cfg.m * cfg.T)
    if cfg.cosets is not None:
        cosets = cfg.cosets
    else:
        cosets = tuple(int(c) for c in rng.choice(cfg.m, size=cfg.p, replace=False))
    sc = scenarios.MultibandScenario(
        n_bands=cfg.n_bands, band_width=band_width, m=cfg.m, T=cfg.T,
        cosets=cosets, seed=seed, n_samples=cfg.N)
    build = scenarios.build_multiband(sc, tol)
    sigma = build.report["sigma"]
    y = compressive_sample(build.signal.coefficients, build.design, tol)
    result = ctf.recover(y, build.design, k_max=build.report["k_max"],
                         solver=cfg.solver, tol=tol)
    return _finish(cfg, trial_index, seed, started, build.signal.profile.support,
                   build.signal.coefficients.sequences, result, sigma)


_TRIAL_RUNNERS = {
    "generic": _generic_trial,
    "periodic_sparsity": _periodic_trial,
    "multiband": _multiband_trial,
}


def _thread_count() -> int:
    raw = os.environ.get("SI_SUBNYQ_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"SI_SUBNYQ_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ConfigError(f"SI_SUBNYQ_THREADS must be >= 0, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value


def run_trials(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Execute all trials; rows come back ordered by trial index regardless
    of completion order."""
    if cfg.mode not in _TRIAL_RUNNERS:
        raise ConfigError(
            f"mode {cfg.mode!r} does not run trials; use the verify command")
    runner = _TRIAL_RUNNERS[cfg.mode]
    seeds = [trial_seed(cfg.seed, t) for t in range(cfg.trials)]
    workers = _thread_count()
    if workers == 1:
        return [runner(cfg, t, s) for t, s in enumerate(seeds)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(runner, cfg, t, s) for t, s in enumerate(seeds)]
        return [f.result() for f in futures]


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_support(support: tuple[int, ...]) -> str:
    return ";".join(str(i) for i in support)


def records_to_csv(records: list[TrialRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            str(r.trial),
            str(r.seed),
            _fmt_support(r.support_true),
            _fmt_support(r.support_found),
            "true" if r.exact else "false",
            _fmt_float(r.nmse),
            str(r.rank_q),
            "" if r.sigma_a is None else str(r.sigma_a),
            f"{r.wall_time_s:.6f}",
        ]))
    return "\n".join(lines) + "\n"


def summarize(cfg: ExperimentConfig, records: list[TrialRecord],
              total_time: float) -> dict:
    collisions = [
        {"trial": r.trial, "support_true": list(r.support_true),
         "support_found": list(r.support_found)}
        for r in records if r.collision
    ]
    cfg_echo = asdict(cfg)
    cfg_echo["tolerances"] = asdict(cfg.tolerances)
    return {
        "success_rate": float(np.mean([r.exact for r in records])),
        "median_nmse": float(np.median([r.nmse for r in records])),
        "trials": len(records),
        "collisions": collisions,
        "config": cfg_echo,
        "timing": {"total_wall_time_s": total_time},
    }


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write output file {path}: {exc}") from exc


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> dict:
    """Run all trials, write trials.csv and summary.json, return the summary."""
    started = time.perf_counter()
    records = run_trials(cfg)
    summary = summarize(cfg, records, time.perf_counter() - started)
    out = Path(out_dir)
    _write(out / "trials.csv", records_to_csv(records))
    _write(out / "summary.json",
           json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def run_sweep(cfg: ExperimentConfig, var: str, values: list[int],
              out_dir: str | Path) -> list[dict]:
    """One run per value of the swept variable; writes sweep.csv plus the
    per-value run outputs in subdirectories."""
    if var not in SWEEP_VARS:
        raise ConfigError(f"sweep variable must be one of {SWEEP_VARS}, got {var!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    out = Path(out_dir)
    rows = []
    summaries = []
    for value in values:
        sub_cfg = replace(cfg, **{var: int(value)})
        summary = run_experiment(sub_cfg, out / f"{var}_{value}")
        summaries.append(summary)
        rows.append(",".join([
            str(int(value)),
            _fmt_float(summary["success_rate"]),
            _fmt_float(summary["median_nmse"]),
            str(summary["trials"]),
        ]))
    _write(out / "sweep.csv", "\n".join([SWEEP_HEADER] + rows) + "\n")
    return summaries
