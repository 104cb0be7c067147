"""Batch comparison of natural strategies, QCQP and brute force on hard settings."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .best_response import best_response
from .brute_force import brute_force_spne
from .core import (
    CLASS_TOL,
    NaturalStrategy,
    SettingClass,
    WorldSetting,
    classify_setting,
    load_setting,
    natural_strategy,
    save_setting,
    utility_am,
    validate_setting,
)
from .errors import GenerationStalled, SandboxGameError, ValidationError
from .qcqp import SolverConfig, solve_am_optimal

log = logging.getLogger(__name__)

QCQP = "QCQP"
BRUTE_FORCE = "BruteForce"
NATURAL = tuple(ns.display for ns in NaturalStrategy)
DEFAULT_STRATEGIES = NATURAL + (QCQP, BRUTE_FORCE)
MAX_DRAWS = 1_000_000
CSV_FIELDS = ("setting_id", "strategy", "u_am", "u_m", "br_gap", "provenance", "flags", "rho")
# Existence must beat QCQP by more than this to count as a win.
BEAT_TOL = 1e-9
NEAR_BRUTE_FORCE = 0.01

_BY_DISPLAY = {ns.display: ns for ns in NaturalStrategy}


@dataclass(frozen=True)
class ExperimentConfig:
    n_settings: int = 1000
    n_types: int = 2
    seed: int = 0
    step: float = 0.01
    qcqp: SolverConfig = field(default_factory=SolverConfig)
    strategies: tuple[str, ...] = DEFAULT_STRATEGIES

    def __post_init__(self):
        if self.n_settings < 1 or self.n_types < 1:
            raise ValueError("n_settings and n_types must be at least 1")
        unknown = set(self.strategies) - set(DEFAULT_STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies {sorted(unknown)}")


@dataclass(frozen=True)
class GenerationStats:
    draws: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.draws


def is_hard(s: WorldSetting) -> bool:
    D = s.total_defended
    return (classify_setting(s) is SettingClass.HARD
            and 0.5 + CLASS_TOL < D < 1 - CLASS_TOL
            and np.count_nonzero(s.defended > 0) >= 2)


def generate_dataset(cfg: ExperimentConfig, max_draws: int = MAX_DRAWS):
    """Draw settings until ``cfg.n_settings`` hard ones are found.

    ``e`` is uniform on the simplex (normalized exponentials) and
    ``d_m = u_m e_m`` with ``u_m`` uniform on [0, 1].  Returns the settings
    and a :class:`GenerationStats` record.
    """
    rng = np.random.default_rng(cfg.seed)
    out: list[WorldSetting] = []
    draws = 0
    while len(out) < cfg.n_settings:
        if draws >= max_draws:
            raise GenerationStalled(f"only {len(out)} hard settings after {draws} draws")
        draws += 1
        x = rng.standard_exponential(cfg.n_types)
        e = x / x.sum()
        d = rng.uniform(size=cfg.n_types) * e
        s = validate_setting(e, d)
        if is_hard(s):
            out.append(s)
    stats = GenerationStats(draws, len(out))
    log.info("hard filter accepted %d of %d draws (%.2f%%)", stats.accepted, draws,
             100 * stats.acceptance_rate)
    return out, stats


def _name(i: int) -> str:
    return f"setting_{i:05d}.json"


def save_dataset(settings: list[WorldSetting], directory, cfg: ExperimentConfig | None = None,
                 stats: GenerationStats | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for i, s in enumerate(settings):
        save_setting(s, directory / _name(i))
        files.append(_name(i))
    manifest = {"files": files}
    if cfg is not None:
        manifest.update(seed=cfg.seed, n_types=cfg.n_types, n_settings=cfg.n_settings)
    if stats is not None:
        manifest.update(draws=stats.draws, acceptance_rate=stats.acceptance_rate)
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return directory


def load_dataset(directory):
    """Settings of a dataset directory, in manifest order, and the manifest."""
    directory = Path(directory)
    path = directory / "manifest.json"
    if not path.exists():
        raise ValidationError(f"{directory} has no manifest.json")
    manifest = json.loads(path.read_text())
    return [load_setting(directory / f) for f in manifest["files"]], manifest


# -- comparison ------------------------------------------------------------

@dataclass(frozen=True)
class StrategyResult:
    u_am: float
    u_m: float
    br_gap: float
    provenance: str
    flags: tuple[str, ...] = ()
    rho: tuple[float, ...] = ()


@dataclass(frozen=True)
class ComparisonRow:
    setting_id: int
    results: dict

    def u_am(self, strategy: str) -> float:
        r = self.results.get(strategy)
        return r.u_am if r is not None else math.nan

    def delta(self, reference: str, strategy: str) -> float:
        """``u_AM(reference) - u_AM(strategy)``."""
        return self.u_am(reference) - self.u_am(strategy)

    def deltas(self, reference: str) -> dict:
        return {k: self.delta(reference, k) for k in self.results}


def _failed(exc: Exception) -> StrategyResult:
    return StrategyResult(math.nan, math.nan, math.nan, "Failed", (f"error:{type(exc).__name__}",))


def _natural(s: WorldSetting, name: str) -> StrategyResult:
    am = natural_strategy(s, _BY_DISPLAY[name])
    rho, u_m = best_response(s, am, tie_break="am")
    return StrategyResult(utility_am(s, am, rho), u_m, 0.0, "Analytic", (), tuple(rho.rho.tolist()))


def _solution(sol) -> StrategyResult:
    return StrategyResult(sol.u_am, sol.u_m, sol.br_gap, sol.provenance.value, tuple(sol.flags),
                          tuple(sol.m.rho.tolist()))


def compare_setting(s: WorldSetting, setting_id: int, cfg: ExperimentConfig) -> ComparisonRow:
    results = {}
    for name in cfg.strategies:
        try:
            if name == QCQP:
                results[name] = _solution(solve_am_optimal(s, cfg.qcqp))
            elif name == BRUTE_FORCE:
                results[name] = _solution(brute_force_spne(s, cfg.step))
            else:
                results[name] = _natural(s, name)
        except SandboxGameError as exc:
            log.warning("setting %d, %s failed: %s", setting_id, name, exc)
            results[name] = _failed(exc)
    return ComparisonRow(setting_id, results)


def compare_strategies(settings: list[WorldSetting], cfg: ExperimentConfig) -> list[ComparisonRow]:
    rows = []
    for i, s in enumerate(settings):
        rows.append(compare_setting(s, i, cfg))
        log.info("compared setting %d of %d", i + 1, len(settings))
    return rows


# -- CSV -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(rows: list[ComparisonRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for row in sorted(rows, key=lambda r: r.setting_id):
            for name, r in row.results.items():
                w.writerow([row.setting_id, name, _fmt(r.u_am), _fmt(r.u_m), _fmt(r.br_gap),
                            r.provenance, ";".join(r.flags), " ".join(_fmt(x) for x in r.rho)])


def read_csv(path) -> list[ComparisonRow]:
    rows: dict[int, dict] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValidationError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            flags = tuple(rec["flags"].split(";")) if rec["flags"] else ()
            rho = tuple(float(x) for x in rec["rho"].split()) if rec["rho"] else ()
            res = StrategyResult(float(rec["u_am"]), float(rec["u_m"]), float(rec["br_gap"]),
                                 rec["provenance"], flags, rho)
            rows.setdefault(int(rec["setting_id"]), {})[rec["strategy"]] = res
    return [ComparisonRow(k, v) for k, v in sorted(rows.items())]


# -- summary ---------------------------------------------------------------

def _stats(values) -> dict:
    v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if v.size == 0:
        return {"count": 0, "mean": None, "median": None, "std": None}
    return {"count": int(v.size), "mean": float(v.mean()), "median": float(np.median(v)),
            "std": float(v.std())}


def _pct(flags) -> float | None:
    flags = list(flags)
    return 100.0 * sum(flags) / len(flags) if flags else None


def summarize(rows: list[ComparisonRow]) -> dict:
    """Delta statistics per strategy against BruteForce, QCQP and Existence."""
    if not rows:
        raise ValueError("nothing to summarize")
    strategies = []
    for row in rows:
        strategies += [k for k in row.results if k not in strategies]
    existence = NaturalStrategy.EXISTENCE.display
    per = {}
    for name in strategies:
        entry = {}
        for ref in (BRUTE_FORCE, QCQP, existence):
            entry[f"delta_vs_{ref}"] = _stats(r.delta(ref, name) for r in rows)
        near = [abs(r.delta(BRUTE_FORCE, name)) <= NEAR_BRUTE_FORCE
                for r in rows if not math.isnan(r.delta(BRUTE_FORCE, name))]
        entry["pct_within_0.01_of_BruteForce"] = _pct(near)
        per[name] = entry
    beats = [r.u_am(existence) > r.u_am(QCQP) + BEAT_TOL for r in rows
             if not (math.isnan(r.u_am(existence)) or math.isnan(r.u_am(QCQP)))]
    gap = [abs(r.delta(BRUTE_FORCE, QCQP)) for r in rows]
    return {
        "n_settings": len(rows),
        "strategies": per,
        "pct_existence_beats_qcqp": _pct(beats),
        "mean_abs_qcqp_vs_bruteforce": _stats(gap)["mean"],
    }


def write_summary(summary: dict, path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
