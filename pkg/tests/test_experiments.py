import math

import numpy as np
import pytest

from sandbox_game import errors
from sandbox_game.core import validate_setting
from sandbox_game.experiments import (
    BRUTE_FORCE,
    CSV_FIELDS,
    QCQP,
    ComparisonRow,
    ExperimentConfig,
    StrategyResult,
    compare_setting,
    compare_strategies,
    generate_dataset,
    is_hard,
    load_dataset,
    read_csv,
    save_dataset,
    summarize,
    write_csv,
    write_summary,
)
from sandbox_game.qcqp import SolverConfig

FAST = SolverConfig(restarts=2)


def row(i, **u):
    return ComparisonRow(i, {k: StrategyResult(v, 0.0, 0.0, "Analytic") for k, v in u.items()})


def test_config_checks():
    with pytest.raises(ValueError):
        ExperimentConfig(n_settings=0)
    with pytest.raises(ValueError):
        ExperimentConfig(strategies=("Nope",))


def test_generation_is_deterministic_and_hard():
    cfg = ExperimentConfig(n_settings=20, seed=3)
    a, stats = generate_dataset(cfg)
    b, _ = generate_dataset(cfg)
    assert len(a) == 20 and stats.accepted == 20 and stats.draws >= 20
    assert 0 < stats.acceptance_rate <= 1
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.existence, y.existence)
        np.testing.assert_array_equal(x.defended, y.defended)
    assert all(is_hard(s) for s in a)
    assert all(0.5 < s.total_defended < 1 for s in a)


def test_generation_stalls():
    # one type can never have two defended types
    with pytest.raises(errors.GenerationStalled):
        generate_dataset(ExperimentConfig(n_settings=1, n_types=1), max_draws=100)


def test_hard_filter():
    assert is_hard(validate_setting([0.5, 0.5], [0.45, 0.35]))
    assert not is_hard(validate_setting([0.4, 0.6], [0.4, 0.6]))
    assert not is_hard(validate_setting([0.6, 0.4], [0.6, 0.0]))
    assert not is_hard(validate_setting([0.5, 0.5], [0.2, 0.2]))


def test_dataset_round_trip(tmp_path):
    cfg = ExperimentConfig(n_settings=3, seed=4)
    settings, stats = generate_dataset(cfg)
    save_dataset(settings, tmp_path / "ds", cfg, stats)
    back, manifest = load_dataset(tmp_path / "ds")
    assert manifest["seed"] == 4 and manifest["draws"] == stats.draws
    for x, y in zip(settings, back):
        np.testing.assert_array_equal(x.existence, y.existence)
    with pytest.raises(errors.ValidationError):
        load_dataset(tmp_path)


def test_small_comparison(tmp_path):
    cfg = ExperimentConfig(n_settings=2, seed=5, step=0.05, qcqp=FAST)
    settings, _ = generate_dataset(cfg)
    rows = compare_strategies(settings, cfg)
    for r in rows:
        assert set(r.results) == set(cfg.strategies)
        assert r.delta(BRUTE_FORCE, BRUTE_FORCE) == 0.0
        q = r.results[QCQP]
        assert q.u_am <= r.u_am(BRUTE_FORCE) + 0.02 or q.flags
        assert q.br_gap <= 0.01
    path = tmp_path / "out.csv"
    write_csv(rows, path)
    back = read_csv(path)
    assert back == rows
    assert path.read_text().splitlines()[0] == ",".join(CSV_FIELDS)


def test_fully_defended_control():
    # Existence is optimal here, so a zero delta against it is the expected control
    s = validate_setting([0.4, 0.6], [0.4, 0.6])
    cfg = ExperimentConfig(strategies=("Existence", "Uniform"))
    r = compare_setting(s, 0, cfg)
    assert r.u_am("Existence") == pytest.approx(0.75, abs=1e-12)
    assert r.delta("Existence", "Uniform") >= -1e-12


def test_failures_are_recorded():
    # Undefended is undefined when every machine is defended
    s = validate_setting([0.4, 0.6], [0.4, 0.6])
    r = compare_setting(s, 0, ExperimentConfig(strategies=("Undefended",)))
    res = r.results["Undefended"]
    assert res.provenance == "Failed" and math.isnan(res.u_am)
    assert res.flags == ("error:UndefinedStrategy",)


def test_summary_of_identical_rows(tmp_path):
    rows = [row(i, BruteForce=0.7, QCQP=0.695, Existence=0.6) for i in range(4)]
    out = summarize(rows)
    q = out["strategies"][QCQP]
    assert q["delta_vs_BruteForce"]["mean"] == pytest.approx(0.005)
    assert q["delta_vs_BruteForce"]["std"] == 0.0
    assert q["pct_within_0.01_of_BruteForce"] == 100.0
    assert out["strategies"]["Existence"]["delta_vs_QCQP"]["mean"] == pytest.approx(0.095)
    assert out["pct_existence_beats_qcqp"] == 0.0
    assert out["mean_abs_qcqp_vs_bruteforce"] == pytest.approx(0.005)
    write_summary(out, tmp_path / "s.json")
    assert (tmp_path / "s.json").read_text().endswith("}\n")


def test_summary_counts_existence_wins():
    rows = [row(0, BruteForce=0.7, QCQP=0.6, Existence=0.65), row(1, BruteForce=0.7, QCQP=0.7, Existence=0.6)]
    assert summarize(rows)["pct_existence_beats_qcqp"] == 50.0
    with pytest.raises(ValueError):
        summarize([])


def test_bad_csv_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(errors.ValidationError):
        read_csv(p)
