"""Closed-form AM-optimal equilibria for the easy regimes, and the dispatcher.

Fully defended settings are solved by Existence (naive) or by emulating the
current machine (sophisticated); M then attacks with probability 1/2 and
AM keeps 3/4 of the machines.  When at most half the machines are defended,
Undefended makes always-attacking M's best response and AM keeps ``D``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .best_response import best_response
from .core import (
    AMStrategy,
    CLASS_TOL,
    EquilibriumSolution,
    MStrategy,
    NaturalStrategy,
    Provenance,
    SettingClass,
    WorldSetting,
    classify_setting,
    natural_strategy,
    utility_am,
    utility_m,
)
from .errors import WrongClass
from .qcqp import SolverConfig, existence_solution, solve_am_optimal

# Largest best-response gap an analytic solution may show and still be certified.
CERTIFY_TOL = 1e-6


@dataclass(frozen=True)
class SolveConfig:
    """Options for :func:`solve`."""

    sophisticated: bool = False
    qcqp: SolverConfig = field(default_factory=SolverConfig)


def certify(s: WorldSetting, am: AMStrategy, m: MStrategy, provenance=Provenance.ANALYTIC,
            flags: tuple[str, ...] = (), tol: float = CERTIFY_TOL) -> EquilibriumSolution:
    """Package ``(am, m)`` with its utilities and an exact best-response check."""
    _, best = best_response(s, am)
    u_m = utility_m(s, am, m)
    gap = max(best - u_m, 0.0)
    return EquilibriumSolution(am, m, utility_am(s, am, m), u_m, provenance,
                               bool(gap <= tol), gap, flags)


def _require(s: WorldSetting, *allowed: SettingClass) -> SettingClass:
    cls = classify_setting(s)
    if cls not in allowed:
        names = ", ".join(c.value for c in allowed)
        raise WrongClass(f"setting is {cls.value}, solver needs {names}")
    return cls


def solve_fully_defended_naive(s: WorldSetting) -> EquilibriumSolution:
    """Existence against a fully defended population: ``u_AM = 0.75``."""
    _require(s, SettingClass.FULLY_DEFENDED)
    am = natural_strategy(s, NaturalStrategy.EXISTENCE)
    return certify(s, am, MStrategy(np.full(s.n, 0.5)))


def solve_fully_defended_sophisticated(s: WorldSetting) -> EquilibriumSolution:
    """Emulate the machine being protected (``Pi = I``): ``u_AM = 0.75``."""
    _require(s, SettingClass.FULLY_DEFENDED)
    am = AMStrategy.sophisticated(np.eye(s.n))
    return certify(s, am, MStrategy(np.full(s.n, 0.5)))


def solve_naive_deterministic_am(s: WorldSetting) -> EquilibriumSolution:
    """Best deterministic naive AM (Majority) against an unrestricted M.

    Every deterministic naive strategy always emulates one type, and in a
    fully defended setting emulating the most common type is best.  M's
    answer is its exact best response, ties going to AM.
    """
    _require(s, SettingClass.FULLY_DEFENDED)
    best = None
    for m in range(s.n):
        pi = np.zeros(s.n)
        pi[m] = 1.0
        am = AMStrategy.naive(pi)
        rho, _ = best_response(s, am, tie_break="am")
        sol = certify(s, am, rho)
        if best is None or sol.u_am > best.u_am + 1e-12:
            best = sol
    return best


def solve_at_most_half(s: WorldSetting) -> EquilibriumSolution:
    """Undefended when ``D <= 1/2``; M always attacks and ``u_AM = D``."""
    _require(s, SettingClass.AT_MOST_HALF)
    ones = MStrategy(np.ones(s.n))
    if s.total_defended <= 0:
        return certify(s, natural_strategy(s, NaturalStrategy.EXISTENCE), ones, flags=("trivial",))
    am = natural_strategy(s, NaturalStrategy.UNDEFENDED)
    slack = s.existence - s.defended - s.total_defended * am.pi
    flags = () if np.all(slack >= -CLASS_TOL) else ("condition-violated",)
    return certify(s, am, ones, flags=flags)


def solve_single_type_defended(s: WorldSetting, cfg: SolverConfig | None = None) -> EquilibriumSolution:
    """Vertex enumeration over ``{0, unit vectors}``, cross-checked by the QCQP.

    ``u_AM`` under best response is not linear in ``pi`` once M switches
    patterns, so the vertex optimum can be beaten in the interior; the
    pattern search is run as well and the better verified answer returned.
    """
    _require(s, SettingClass.SINGLE_TYPE_DEFENDED)
    best = None
    for pi in np.vstack([np.zeros(s.n), np.eye(s.n)]):
        am = AMStrategy.naive(pi)
        rho, _ = best_response(s, am, tie_break="am")
        sol = certify(s, am, rho)
        if best is None or sol.u_am > best.u_am + 1e-12:
            best = sol
    q = solve_am_optimal(s, cfg or SolverConfig())
    if q.verified and "fallback" not in q.flags and q.u_am > best.u_am + 1e-12:
        return q
    return best


def solve(s: WorldSetting, config: SolveConfig | None = None) -> EquilibriumSolution:
    """AM-optimal equilibrium by setting class."""
    config = config or SolveConfig()
    cls = classify_setting(s)
    if cls is SettingClass.FULLY_DEFENDED:
        if config.sophisticated:
            return solve_fully_defended_sophisticated(s)
        return solve_fully_defended_naive(s)
    if cls is SettingClass.AT_MOST_HALF:
        return solve_at_most_half(s)
    if cls is SettingClass.SINGLE_TYPE_DEFENDED:
        return solve_single_type_defended(s, config.qcqp)
    q = solve_am_optimal(s, config.qcqp)
    ex = existence_solution(s)
    if "fallback" in q.flags or ex.u_am > q.u_am:
        return existence_solution(s, ("existence",) + tuple(q.flags))
    return q
