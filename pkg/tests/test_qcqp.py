import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sandbox_game import errors
from sandbox_game.best_response import ConstraintPattern, Tag
from sandbox_game.core import AMStrategy, Provenance, natural_strategy, utility_am, validate_setting
from sandbox_game.qcqp import (
    SolverConfig,
    build_subproblem,
    project_capped_simplex,
    solve_am_optimal,
    solve_subproblem,
    verify_candidate,
)

I, ONE, ZERO = Tag.INTERIOR, Tag.ONE, Tag.ZERO
FD = validate_setting([0.4, 0.6], [0.4, 0.6])
THREE = validate_setting([0.1, 0.2, 0.7], [0.07, 0.14, 0.21])


def test_config_checks():
    with pytest.raises(ValueError):
        SolverConfig(restarts=0)
    with pytest.raises(ValueError):
        SolverConfig(best_response_slack=0.0)


def test_subproblem_shapes():
    spec = build_subproblem(FD, ConstraintPattern((ONE, ONE)))
    assert spec.residual([0.2, 0.3], [1, 1]).size == 0
    # fully defended, rho = 1: u_AM = (pi . 1) D is linear in pi
    assert spec.objective([0.2, 0.3], [1, 1]) == pytest.approx(0.5)
    spec = build_subproblem(FD, ConstraintPattern((I, ONE)))
    assert spec.residual([0.2, 0.3], [0.5, 1]).size == 1
    # L_a = 0.4 - 0.4 * 0.37 - 0.2 * 0.74 = 0.104 beats the 0.1 miss on rho_b
    assert spec.violation([0.2, 0.3], [0.5, 0.9]) == pytest.approx(0.104)


def test_three_type_residual():
    spec = build_subproblem(THREE, ConstraintPattern((I, I, ONE)))
    rho = np.array([0.3, 0.4, 1.0])
    res = spec.residual(THREE.existence, rho)
    assert res[0] == pytest.approx(0.1 - 0.014 * 0.3 - 0.028 * 0.4 - 0.07)


def test_projection_examples():
    V = np.array([[2.0, 0.0], [0.8, 0.8], [-1.0, 0.3], [0.2, 0.3]])
    np.testing.assert_allclose(project_capped_simplex(V),
                               [[1, 0], [0.5, 0.5], [0, 0.3], [0.2, 0.3]], atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_projection_is_nearest(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(1, n)) * 2
    p = project_capped_simplex(v)[0]
    assert p.min() >= 0 and p.sum() <= 1 + 1e-12
    # no random feasible point is closer
    others = rng.dirichlet(np.ones(n + 1), size=500)[:, :n]
    assert np.all(np.linalg.norm(others - v, axis=1) >= np.linalg.norm(p - v) - 1e-12)


def test_verify_interior_solution():
    rep = verify_candidate(FD, [0.4, 0.6], [0.5, 0.5], pattern=ConstraintPattern((I, I)))
    assert rep.accepted and rep.feasible
    assert abs(rep.br_gap) < 1e-12


def test_verify_rejects_non_best_response():
    s = validate_setting([0.5, 0.5], [0.25, 0.25])
    pi = natural_strategy(s, "undefended").pi
    rep = verify_candidate(s, pi, [0.0, 0.0])
    assert not rep.accepted
    assert rep.br_gap == pytest.approx(0.5)


def test_subproblem_interior_recovers_analytic():
    sol = solve_subproblem(build_subproblem(FD, ConstraintPattern((I, I))))
    assert sol is not None
    pi, rho, u = sol
    assert u == pytest.approx(0.75, abs=1e-3)
    assert verify_candidate(FD, pi, rho).accepted


def test_subproblem_linear_vertex():
    # without the best-response term pattern (1, 1) is max D * sum(pi): value 1 at sum(pi) = 1
    cfg = SolverConfig(enforce_best_response=False)
    pi, rho, u = solve_subproblem(build_subproblem(FD, ConstraintPattern((ONE, ONE))), cfg)
    assert u == pytest.approx(1.0, abs=1e-6)
    assert pi.sum() == pytest.approx(1.0, abs=1e-9)


def test_solve_fully_defended():
    sol = solve_am_optimal(FD)
    assert sol.provenance is Provenance.QCQP and sol.verified
    assert 0.75 - 1e-3 <= sol.u_am <= 0.75 + 1e-6


def test_solve_three_type():
    sol = solve_am_optimal(THREE)
    assert sol.u_am == pytest.approx(0.42, abs=1e-3)
    assert sol.u_am <= 0.42 + 1e-6


def test_solve_single_type_defended():
    # indifference between rho = (1/2, 1) and (1, 0) at pi_a = 4/15 gives 0.56
    s = validate_setting([0.6, 0.4], [0.6, 0.0])
    sol = solve_am_optimal(s)
    assert sol.u_am == pytest.approx(0.56, abs=1e-3)


def test_accepted_solution_invariants():
    s = validate_setting([0.5, 0.5], [0.45, 0.35])
    cfg = SolverConfig()
    sol = solve_am_optimal(s, cfg)
    pi, rho = sol.am.pi, sol.m.rho
    assert pi.min() >= 0 and pi.sum() <= 1 + 1e-9
    assert rho.min() >= 0 and rho.max() <= 1
    assert sol.br_gap <= cfg.best_response_slack
    rep = verify_candidate(s, pi, rho, cfg)
    assert rep.accepted
    assert sol.u_am == pytest.approx(utility_am(s, AMStrategy.naive(pi), rho), abs=1e-12)


def test_deterministic_and_monotone_in_restarts():
    s = validate_setting([0.5535, 0.4465], [0.2801, 0.3505])
    a = solve_am_optimal(s, SolverConfig(restarts=3))
    b = solve_am_optimal(s, SolverConfig(restarts=3))
    assert a.u_am == b.u_am
    np.testing.assert_array_equal(a.am.pi, b.am.pi)
    c = solve_am_optimal(s, SolverConfig(restarts=6))
    assert c.u_am >= a.u_am - 1e-9


def test_fallback_when_nothing_verifies(monkeypatch):
    import sandbox_game.qcqp as q
    monkeypatch.setattr(q, "_local_search", lambda s, specs, cfg: [[] for _ in specs])
    s = validate_setting([0.5, 0.5], [0.45, 0.35])
    sol = solve_am_optimal(s)
    assert "fallback" in sol.flags
    assert sol.provenance is Provenance.ANALYTIC
    assert sol.am.pi.tolist() == pytest.approx([0.5, 0.5])


def test_universe_cap():
    s = validate_setting(np.full(13, 1 / 13), np.full(13, 0.5 / 13))
    with pytest.raises(errors.UniverseTooLarge):
        solve_am_optimal(s)
