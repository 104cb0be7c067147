"""M's exact best response to a committed AM strategy.

``u_M(rho) = e . rho - rho^T A rho`` with ``A[r, m] = d_r Pi[r, m]`` is a
quadratic over the unit box, so its maximum sits at a KKT point: each
coordinate is either at a bound or has zero partial derivative

    L_m = e_m - sum_l (d_m Pi[m, l] + d_l Pi[l, m]) rho_l .

For a naive strategy this is ``e_m - 2 d_m pi_m rho_m - sum_{l != m}
(d_m pi_l + d_l pi_m) rho_l``.  Each assignment of the coordinates to
{0, 1, stationary} gives one linear system; enumerating all of them and
keeping the best feasible solution yields the global maximum.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .core import (
    AMStrategy,
    MStrategy,
    PROB_TOL,
    WorldSetting,
    matrix_am_utility,
    matrix_m_utility,
    naive_m_utility,
    strategy_matrix,
)
from .errors import GridTooLarge, UniverseTooLarge

DEFAULT_MAX_TYPES = 12
# Two candidate utilities closer than this are treated as a tie.
TIE_TOL = 1e-12
# Systems solved per vectorized chunk.
CHUNK = 1 << 15


class Tag(enum.IntEnum):
    ZERO = 0
    ONE = 1
    INTERIOR = 2


@dataclass(frozen=True)
class ConstraintPattern:
    tags: tuple[Tag, ...]

    def __post_init__(self):
        tags = tuple(Tag(t) for t in self.tags)
        if all(t is Tag.ZERO for t in tags):
            raise ValueError("the all-zero pattern is not a constraint pattern")
        object.__setattr__(self, "tags", tags)

    @property
    def n(self) -> int:
        return len(self.tags)

    @property
    def free(self) -> np.ndarray:
        return np.array([t is Tag.INTERIOR for t in self.tags])

    @property
    def bound_values(self) -> np.ndarray:
        """Fixed value of each bound coordinate (0 for interior ones)."""
        return np.array([1.0 if t is Tag.ONE else 0.0 for t in self.tags])

    def __str__(self):
        return "".join("01b"[t] for t in self.tags)


@dataclass(frozen=True)
class LinearSystem:
    matrix: np.ndarray
    rhs: np.ndarray


def check_universe(n: int, max_types: int = DEFAULT_MAX_TYPES) -> None:
    if n > max_types:
        raise UniverseTooLarge(f"{n} machine types exceeds the cap of {max_types} "
                               f"(3^{n} - 1 = {3 ** n - 1} systems)")


@lru_cache(maxsize=None)
def pattern_codes(n: int) -> np.ndarray:
    """All ``3^n`` tag vectors in ternary counting order, all-zero first."""
    codes = np.array(list(itertools.product(range(3), repeat=n)), dtype=np.int8).reshape(-1, n)
    codes.setflags(write=False)
    return codes


def enumerate_patterns(n: int, max_types: int = DEFAULT_MAX_TYPES) -> list[ConstraintPattern]:
    if n < 1:
        raise ValueError("need at least one machine type")
    check_universe(n, max_types)
    return [ConstraintPattern(tuple(row)) for row in pattern_codes(n)[1:]]


def stationarity_matrix(s: WorldSetting, Pi) -> np.ndarray:
    """``Q`` with ``L = e - Q @ rho``; accepts a batch of matrices."""
    A = s.defended[:, None] * Pi
    return A + np.swapaxes(A, -1, -2)


def stationarity(s: WorldSetting, am, rho) -> np.ndarray:
    """Partial derivatives ``L_m`` of ``u_M`` with respect to ``rho_m``."""
    Q = stationarity_matrix(s, strategy_matrix(am, s.n))
    return s.existence - Q @ np.asarray(rho, dtype=float)


def build_system(s: WorldSetting, am, c: ConstraintPattern) -> LinearSystem:
    Q = stationarity_matrix(s, strategy_matrix(am, s.n))
    free = c.free
    matrix = np.where(free[:, None], Q, np.eye(s.n))
    rhs = np.where(free, s.existence, c.bound_values)
    return LinearSystem(matrix, rhs)


def _feasible(rho: np.ndarray, ok: np.ndarray):
    inside = np.all((rho >= -PROB_TOL) & (rho <= 1 + PROB_TOL), axis=-1)
    return ok & inside, np.clip(rho, 0.0, 1.0)


def solve_pattern(s: WorldSetting, am, c: ConstraintPattern) -> MStrategy | None:
    """Solve one KKT candidate system; ``None`` if singular or outside the box."""
    system = build_system(s, am, c)
    with np.errstate(all="ignore"):
        x, ok = linalg.solve_batch(system.matrix, system.rhs)
    good, rho = _feasible(x, np.asarray(ok))
    if not good:
        return None
    rho = np.where(c.free, rho, c.bound_values)
    return MStrategy(rho)


def _candidates(s: WorldSetting, Pi: np.ndarray, codes: np.ndarray):
    """Feasible KKT solutions for a batch ``Pi[K]`` and pattern block ``codes[P]``.

    Returns ``rho[K, P, n]`` and a mask ``ok[K, P]``.
    """
    K, n = Pi.shape[0], s.n
    P = codes.shape[0]
    Q = stationarity_matrix(s, Pi)
    free = codes == Tag.INTERIOR
    bound = (codes == Tag.ONE).astype(float)
    M = np.where(free[None, :, :, None], Q[:, None], np.eye(n))
    rhs = np.where(free[None], s.existence, bound[None])
    rhs = np.broadcast_to(rhs, (K, P, n))
    with np.errstate(all="ignore"):
        x, ok = linalg.solve_batch(M.reshape(K * P, n, n), rhs.reshape(K * P, n))
    x = x.reshape(K, P, n)
    good, x = _feasible(x, ok.reshape(K, P))
    x = np.where(free[None], x, bound[None])
    return x, good


def _select(u_m, u_am, tie_break):
    """Index of the chosen candidate along the last axis."""
    tied = u_m >= u_m.max(axis=-1, keepdims=True) - TIE_TOL
    if tie_break == "am":
        am = np.where(tied, u_am, -np.inf)
        tied &= am >= am.max(axis=-1, keepdims=True) - TIE_TOL
    return np.argmax(tied, axis=-1)


def _best_response(s: WorldSetting, Pi, pis, tie_break, max_types):
    if tie_break not in ("first", "am"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    n = s.n
    check_universe(n, max_types)
    e, d = s.existence, s.defended
    if pis is not None:
        K = pis.shape[0]
        Pi = np.repeat(pis[:, None, :], n, axis=1)

        def utilities(rho):
            pr = np.sum(pis[:, None] * rho, axis=-1)
            dr = rho @ d
            return rho @ e - pr * dr, (1.0 - rho) @ d + pr * dr
    else:
        K = Pi.shape[0]

        def utilities(rho):
            return (matrix_m_utility(e, d, Pi[:, None], rho),
                    matrix_am_utility(d, Pi[:, None], rho))
    codes = pattern_codes(n)
    # running winner, seeded with the all-zero response
    rho = np.zeros((K, n))
    u_m = np.zeros(K)
    u_am = np.full(K, s.total_defended)
    rows = np.arange(K)
    step = max(1, CHUNK // max(K, 1))
    for start in range(1, codes.shape[0], step):
        block = codes[start:start + step]
        cand, ok = _candidates(s, Pi, block)
        um, ua = utilities(cand)
        um = np.where(ok, um, -np.inf)
        ua = np.where(ok, ua, -np.inf)
        j = _select(um, ua, tie_break)
        # fold the block winner after the incumbent so earlier candidates win ties
        pair_m = np.stack([u_m, um[rows, j]], axis=1)
        pair_a = np.stack([u_am, ua[rows, j]], axis=1)
        take = _select(pair_m, pair_a, tie_break) == 1
        rho = np.where(take[:, None], cand[rows, j], rho)
        u_m = np.where(take, pair_m[:, 1], u_m)
        u_am = np.where(take, pair_a[:, 1], u_am)
    return rho, u_m, u_am


def best_response_batch(s: WorldSetting, Pi, tie_break: str = "first",
                        max_types: int = DEFAULT_MAX_TYPES):
    """Best responses to a batch of strategy matrices ``Pi[K, n, n]``.

    Candidates are the all-zero response followed by every feasible pattern
    solution in ternary order.  Among candidates within ``TIE_TOL`` of the
    best ``u_M``, ``tie_break="first"`` keeps the earliest one and ``"am"``
    keeps the one best for AM (the AM-optimal equilibrium convention).
    Returns ``(rho, u_m, u_am)`` arrays.
    """
    Pi = np.asarray(Pi, dtype=float)
    if Pi.ndim == 2:
        Pi = Pi[None]
    return _best_response(s, Pi, None, tie_break, max_types)


def naive_best_response_batch(s: WorldSetting, pis, tie_break: str = "first",
                              max_types: int = DEFAULT_MAX_TYPES):
    """:func:`best_response_batch` for naive strategy vectors ``pis[K, n]``."""
    pis = np.atleast_2d(np.asarray(pis, dtype=float))
    return _best_response(s, None, pis, tie_break, max_types)


def best_response(s: WorldSetting, am: AMStrategy, tie_break: str = "first",
                  max_types: int = DEFAULT_MAX_TYPES) -> tuple[MStrategy, float]:
    """Exact best response of M to ``am`` and the utility it earns.

    Naive and sophisticated strategies are both handled; the all-zero
    response is always a candidate so the result exists in every setting.
    """
    Pi = strategy_matrix(am, s.n)
    rho, u, _ = best_response_batch(s, Pi[None], tie_break, max_types)
    return MStrategy(rho[0]), float(u[0])


def grid_points(step: float) -> np.ndarray:
    count = int(round(1.0 / step))
    if step <= 0 or abs(count * step - 1.0) > 1e-9:
        raise ValueError(f"grid step {step} does not divide 1")
    return np.linspace(0.0, 1.0, count + 1)


def best_response_grid(s: WorldSetting, am: AMStrategy, step: float,
                       max_points: int = 20_000_000) -> tuple[MStrategy, float]:
    """Maximize ``u_M`` over the grid ``{0, step, ..., 1}^n`` by exhaustion."""
    axis = grid_points(step)
    total = axis.size ** s.n
    if total > max_points:
        raise GridTooLarge(f"{total} grid points exceeds the cap of {max_points}")
    Pi = strategy_matrix(am, s.n)
    naive = bool(np.all(Pi == Pi[0]))
    best_u, best_idx = -np.inf, 0
    chunk = 1 << 18
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = np.stack(np.unravel_index(idx, (axis.size,) * s.n), axis=-1)
        rho = axis[digits]
        if naive:
            u = naive_m_utility(s.existence, s.defended, Pi[0], rho)
        else:
            u = matrix_m_utility(s.existence, s.defended, Pi, rho)
        j = int(np.argmax(u))
        if u[j] > best_u:
            best_u, best_idx = float(u[j]), int(idx[j])
    digits = np.array(np.unravel_index(best_idx, (axis.size,) * s.n))
    return MStrategy(axis[digits]), best_u
