from math import comb

import numpy as np
import pytest

from sandbox_game import errors
from sandbox_game.brute_force import brute_force_spne, simplex_grid
from sandbox_game.core import Provenance, utility_am, validate_setting


def test_grid_small():
    g = simplex_grid(2, 0.5)
    np.testing.assert_allclose(g, [[0, 0], [0, 0.5], [0, 1], [0.5, 0], [0.5, 0.5], [1, 0]])
    assert simplex_grid(3, 0.1).shape[0] == comb(13, 3)
    assert np.all(simplex_grid(3, 0.1).sum(axis=1) <= 1 + 1e-12)


def test_grid_limits():
    with pytest.raises(errors.GridTooLarge):
        simplex_grid(4, 0.005)
    with pytest.raises(ValueError):
        simplex_grid(2, 0.0)
    with pytest.raises(ValueError):
        simplex_grid(2, 0.3)


def test_fully_defended():
    s = validate_setting([0.4, 0.6], [0.4, 0.6])
    sol = brute_force_spne(s)
    assert sol.u_am == pytest.approx(0.75, abs=1e-9)
    assert sol.provenance is Provenance.BRUTE_FORCE and sol.verified


def test_at_most_half_reaches_d():
    # Undefended = (0.5, 0.5) is on the grid and D * 0.5 < e - d, so all-attack is M's answer
    s = validate_setting([0.5, 0.5], [0.2, 0.2])
    assert brute_force_spne(s).u_am == pytest.approx(0.4, abs=1e-9)


def test_single_type_defended():
    # rho = (1/2, 1) is M's answer once pi_a > 4/15 on sum(pi) = 1, giving
    # u_AM = 0.6 - 0.15 pi_a; the first such grid point is pi_a = 0.27
    s = validate_setting([0.6, 0.4], [0.6, 0.0])
    sol = brute_force_spne(s)
    assert sol.u_am == pytest.approx(0.6 - 0.15 * 0.27, abs=1e-9)
    np.testing.assert_allclose(sol.am.pi, [0.27, 0.73], atol=1e-12)
    np.testing.assert_allclose(sol.m.rho, [0.5, 1.0], atol=1e-9)
    assert sol.u_am == pytest.approx(utility_am(s, sol.am, sol.m), abs=1e-12)


def test_double_grid_is_coarser():
    s = validate_setting([0.5, 0.5], [0.45, 0.35])
    exact = brute_force_spne(s, step=0.1)
    coarse = brute_force_spne(s, step=0.1, double_grid=True)
    assert not coarse.verified
    assert abs(exact.u_am - coarse.u_am) < 0.05
