"""Grid search over naive AM strategies, used as the benchmark equilibrium."""
from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .best_response import best_response_batch, best_response_grid, grid_points
from .core import AMStrategy, EquilibriumSolution, MStrategy, Provenance, WorldSetting
from .errors import GridTooLarge

DEFAULT_MAX_POINTS = 2_000_000


def simplex_grid(n: int, step: float, max_points: int = DEFAULT_MAX_POINTS) -> np.ndarray:
    """All ``pi`` in ``{0, step, ..., 1}^n`` with ``sum(pi) <= 1``.

    Rows are in lexicographic order of the integer numerators.
    """
    if not 0 < step <= 0.5:
        raise ValueError("grid step must lie in (0, 0.5]")
    grid_points(step)
    N = int(round(1.0 / step))
    count = comb(N + n, n)
    if count > max_points:
        raise GridTooLarge(f"{count} AM grid points exceeds the cap of {max_points}")
    rows = [k for k in itertools.product(range(N + 1), repeat=n) if sum(k) <= N]
    return np.array(rows, dtype=float) / N


def brute_force_spne(s: WorldSetting, step: float = 0.01, double_grid: bool = False,
                     max_points: int = DEFAULT_MAX_POINTS, chunk: int = 4096) -> EquilibriumSolution:
    """Best grid ``pi`` for AM when M answers with its exact best response.

    M breaks ties in AM's favour.  With ``double_grid`` M instead maximizes
    over the same ``step`` grid, which reproduces a fully discretized search.
    The first grid point (lexicographic) wins ties for AM.
    """
    grid = simplex_grid(s.n, step, max_points)
    best_u, best_pi, best_rho = -np.inf, None, None
    if double_grid:
        for pi in grid:
            am = AMStrategy.naive(pi)
            rho, _ = best_response_grid(s, am, step)
            u = float((1 - rho.rho) @ s.defended + (pi @ rho.rho) * (rho.rho @ s.defended))
            if u > best_u + 1e-12:
                best_u, best_pi, best_rho = u, pi, rho.rho
    else:
        for start in range(0, grid.shape[0], chunk):
            pis = grid[start:start + chunk]
            Pi = np.repeat(pis[:, None, :], s.n, axis=1)
            rho, _, u_am = best_response_batch(s, Pi, tie_break="am")
            j = int(np.argmax(u_am))
            if u_am[j] > best_u + 1e-12:
                best_u, best_pi, best_rho = float(u_am[j]), pis[j], rho[j]
    am = AMStrategy.naive(best_pi)
    m = MStrategy(best_rho)
    u_m = float(best_rho @ s.existence - (best_pi @ best_rho) * (best_rho @ s.defended))
    return EquilibriumSolution(am, m, best_u, u_m, Provenance.BRUTE_FORCE, not double_grid)
