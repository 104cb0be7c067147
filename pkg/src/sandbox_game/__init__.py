"""Equilibria of the sandbox game between anti-malware and malware."""
from .analytic import (
    SolveConfig,
    certify,
    solve,
    solve_at_most_half,
    solve_fully_defended_naive,
    solve_fully_defended_sophisticated,
    solve_naive_deterministic_am,
    solve_single_type_defended,
)
from .best_response import (
    ConstraintPattern,
    Tag,
    best_response,
    best_response_batch,
    best_response_grid,
    enumerate_patterns,
    naive_best_response_batch,
    solve_pattern,
)
from .brute_force import brute_force_spne, simplex_grid
from .core import (
    AMStrategy,
    EquilibriumSolution,
    MachineType,
    MStrategy,
    NaturalStrategy,
    Provenance,
    SettingClass,
    StrategyKind,
    WorldSetting,
    classify_setting,
    load_setting,
    natural_strategy,
    save_setting,
    utility_am,
    utility_m,
    validate_setting,
)
from .errors import *  # noqa: F401,F403
from .experiments import (
    ComparisonRow,
    ExperimentConfig,
    compare_strategies,
    generate_dataset,
    read_csv,
    summarize,
    write_csv,
)
from .qcqp import (
    SolverConfig,
    SubproblemSpec,
    VerificationReport,
    build_subproblem,
    solve_am_optimal,
    solve_subproblem,
    verify_candidate,
)
from .simulation import SimulationResult, simulate

__version__ = "0.1.0"
