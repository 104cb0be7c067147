"""Command line entry point: ``sandbox-game <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analytic, experiments
from .best_response import best_response
from .brute_force import brute_force_spne
from .core import (
    AMStrategy,
    MStrategy,
    NaturalStrategy,
    load_setting,
    natural_strategy,
    utility_am,
)
from .errors import SolverError, ValidationError
from .qcqp import SolverConfig
from .simulation import simulate

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER = 0, 2, 3


def _vector(text: str, what: str) -> np.ndarray:
    """A JSON array, a comma separated list, or a path to a JSON array file."""
    path = Path(text)
    raw = path.read_text() if path.is_file() else text
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        try:
            value = [float(x) for x in raw.split(",")]
        except ValueError:
            raise ValidationError(f"cannot read {what} from {text!r}") from None
    arr = np.asarray(value, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValidationError(f"{what} must be a vector or a matrix")
    return arr


def _am(s, text: str) -> AMStrategy:
    if text in {ns.value for ns in NaturalStrategy}:
        return natural_strategy(s, text)
    arr = _vector(text, "--pi")
    try:
        am = AMStrategy.naive(arr) if arr.ndim == 1 else AMStrategy.sophisticated(arr)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if am.n != s.n:
        raise ValidationError(f"--pi has {am.n} types, setting has {s.n}")
    return am


def _rho(s, text: str) -> MStrategy:
    arr = _vector(text, "--rho")
    if arr.shape != (s.n,):
        raise ValidationError(f"--rho must have {s.n} entries")
    try:
        return MStrategy(arr)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _print(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_solve(args) -> int:
    s = load_setting(args.setting)
    cfg = analytic.SolveConfig(args.sophisticated, SolverConfig(restarts=args.restarts, rng_seed=args.seed))
    sol = analytic.solve(s, cfg)
    _print(sol.to_dict())
    return EXIT_OK


def cmd_best_response(args) -> int:
    s = load_setting(args.setting)
    am = _am(s, args.pi)
    rho, u_m = best_response(s, am, tie_break=args.tie_break)
    _print({"rho": rho.to_list(), "u_m": u_m, "u_am": utility_am(s, am, rho)})
    return EXIT_OK


def cmd_brute_force(args) -> int:
    s = load_setting(args.setting)
    _print(brute_force_spne(s, args.step).to_dict())
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = load_setting(args.setting)
    if args.machines < 1:
        raise ValidationError("--machines must be at least 1")
    res = simulate(s, _am(s, args.pi), _rho(s, args.rho), args.machines, args.seed)
    _print(res.to_dict())
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.settings < 1 or args.types < 1:
        raise ValidationError("--settings and --types must be at least 1")
    cfg = experiments.ExperimentConfig(n_settings=args.settings, n_types=args.types, seed=args.seed)
    settings, stats = experiments.generate_dataset(cfg)
    experiments.save_dataset(settings, args.out, cfg, stats)
    print(f"wrote {len(settings)} hard settings to {args.out} "
          f"(acceptance rate {100 * stats.acceptance_rate:.2f}% over {stats.draws} draws)")
    return EXIT_OK


def cmd_compare(args) -> int:
    settings, manifest = experiments.load_dataset(args.dataset)
    seed = args.seed if args.seed is not None else manifest.get("seed", 0)
    cfg = experiments.ExperimentConfig(n_settings=max(len(settings), 1),
                                       n_types=settings[0].n if settings else 1,
                                       seed=seed, step=args.step,
                                       qcqp=SolverConfig(restarts=args.restarts, rng_seed=seed))
    rows = experiments.compare_strategies(settings, cfg)
    experiments.write_csv(rows, args.out)
    print(f"wrote {len(rows)} settings to {args.out}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    summary = experiments.summarize(experiments.read_csv(args.results))
    if args.out:
        experiments.write_summary(summary, args.out)
    _print(summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sandbox-game", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("solve", help="AM-optimal equilibrium of a setting")
    c.add_argument("setting")
    c.add_argument("--sophisticated", action="store_true")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--restarts", type=int, default=10)
    c.set_defaults(func=cmd_solve)

    c = sub.add_parser("best-response", help="M's exact best response to an AM strategy")
    c.add_argument("setting")
    c.add_argument("--pi", required=True, help="natural strategy name, JSON array/matrix, or file")
    c.add_argument("--tie-break", choices=("first", "am"), default="first")
    c.set_defaults(func=cmd_best_response)

    c = sub.add_parser("brute-force", help="grid search over naive AM strategies")
    c.add_argument("setting")
    c.add_argument("--step", type=float, default=0.01)
    c.set_defaults(func=cmd_brute_force)

    c = sub.add_parser("simulate", help="Monte-Carlo play of a strategy pair")
    c.add_argument("setting")
    c.add_argument("--pi", required=True)
    c.add_argument("--rho", required=True, help="JSON array, comma list, or file")
    c.add_argument("--machines", type=int, default=100_000)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("generate", help="draw a dataset of hard settings")
    c.add_argument("--settings", type=int, default=1000)
    c.add_argument("--types", type=int, default=2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_generate)

    c = sub.add_parser("compare", help="evaluate every strategy on a dataset")
    c.add_argument("--dataset", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--step", type=float, default=0.01)
    c.add_argument("--restarts", type=int, default=10)
    c.add_argument("--seed", type=int, default=None, help="QCQP seed (default: dataset seed)")
    c.set_defaults(func=cmd_compare)

    c = sub.add_parser("summarize", help="summary statistics of a comparison CSV")
    c.add_argument("results")
    c.add_argument("--out", help="also write the summary JSON here")
    c.set_defaults(func=cmd_summarize)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
