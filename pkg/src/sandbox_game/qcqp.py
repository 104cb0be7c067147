"""AM-optimal equilibria in hard settings by pattern-wise QCQP search.

For every pattern of M's response (each coordinate of ``rho`` pinned to 0,
pinned to 1, or free with zero partial derivative) we maximize ``u_AM`` over
the joint variables ``(pi, rho)``.  Objective and constraints are bilinear, so
the subproblem is a nonconvex QCQP; it is attacked with a multi-start
augmented-Lagrangian method whose inner loop is projected gradient ascent
over the box ``rho in [0, 1]`` and the capped simplex ``pi >= 0, sum(pi) <= 1``.

Each candidate is then checked against M's exact best response, which is what
turns a pattern-constrained optimum into an equilibrium.  By default the local
search also penalizes the best-response gap ``V(pi) - u_M(pi, rho)`` (``V`` is
M's optimal utility against ``pi``) so restarts are steered toward candidates
that survive that check; ``enforce_best_response=False`` drops the term.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .best_response import (
    ConstraintPattern,
    DEFAULT_MAX_TYPES,
    Tag,
    best_response,
    naive_best_response_batch,
    check_universe,
    pattern_codes,
)
from .core import (
    AMStrategy,
    EquilibriumSolution,
    MStrategy,
    NaturalStrategy,
    Provenance,
    WorldSetting,
    natural_strategy,
    utility_am,
    utility_m,
)
from .linalg import solve_batch

log = logging.getLogger(__name__)

MU_START = 1e3
MU_MAX = 1e8
# feasible-start pool size, per constraint pattern
POOL_PER_PATTERN = 64
# local searches must end this close to a best response; any slack left
# here is slack AM's utility could be overstated by
GAP_TOL = 1e-7


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 10
    max_iterations: int = 500
    violation_tolerance: float = 1e-4
    best_response_slack: float = 0.01
    rng_seed: int = 0
    enforce_best_response: bool = True
    outer_iterations: int = 12
    improvement_tol: float = 1e-9

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.best_response_slack <= 0:
            raise ValueError("best_response_slack must be positive")
        if self.max_iterations < 1 or self.outer_iterations < 1:
            raise ValueError("iteration limits must be positive")


@dataclass(frozen=True)
class SubproblemSpec:
    """``max u_AM(pi, rho)`` subject to the pinned/stationary rows of ``pattern``."""

    setting: WorldSetting
    pattern: ConstraintPattern
    index: int = 0  # position in ternary enumeration, used to derive seeds

    @property
    def free(self) -> np.ndarray:
        return self.pattern.free

    @property
    def bound_values(self) -> np.ndarray:
        return self.pattern.bound_values

    def objective(self, pi, rho) -> float:
        return utility_am(self.setting, np.asarray(pi), rho)

    def residual(self, pi, rho) -> np.ndarray:
        """Stationarity rows ``L_m`` for the free coordinates."""
        s = self.setting
        pi, rho = np.asarray(pi, float), np.asarray(rho, float)
        L = s.existence - s.defended * (pi @ rho) - pi * (s.defended @ rho)
        return L[self.free]

    def violation(self, pi, rho) -> float:
        """Largest breach of any equality, bound or simplex constraint."""
        pi, rho = np.asarray(pi, float), np.asarray(rho, float)
        parts = [0.0]
        res = self.residual(pi, rho)
        if res.size:
            parts.append(np.max(np.abs(res)))
        fixed = ~self.free
        if fixed.any():
            parts.append(np.max(np.abs(rho[fixed] - self.bound_values[fixed])))
        parts += [-pi.min(), pi.max() - 1, pi.sum() - 1, -rho.min(), rho.max() - 1]
        return float(max(parts))


def build_subproblem(s: WorldSetting, c: ConstraintPattern) -> SubproblemSpec:
    digits = [int(t) for t in c.tags]
    index = int(np.ravel_multi_index(digits, (3,) * s.n))
    return SubproblemSpec(s, c, index)


@dataclass(frozen=True)
class Candidate:
    pi: np.ndarray
    rho: np.ndarray
    u_am: float
    violation: float
    pattern_index: int
    restart: int

    @property
    def converged(self) -> bool:
        return bool(np.isfinite(self.violation))


@dataclass(frozen=True)
class VerificationReport:
    feasible: bool
    violation: float
    br_gap: float
    accepted: bool


# -- projections -----------------------------------------------------------

def project_capped_simplex(V: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean projection onto ``{x : 0 <= x <= 1, sum(x) <= 1}``."""
    X = np.clip(V, 0.0, 1.0)
    over = X.sum(axis=1) > 1.0
    if over.any():
        W = V[over]
        srt = -np.sort(-W, axis=1)
        css = np.cumsum(srt, axis=1) - 1.0
        k = np.arange(1, W.shape[1] + 1)
        cond = srt - css / k > 0
        rho = W.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
        theta = css[np.arange(W.shape[0]), rho] / (rho + 1)
        X[over] = np.maximum(W - theta[:, None], 0.0)
    return X


# -- batched augmented Lagrangian ------------------------------------------

class _Batch:
    """State of many independent local searches, one per row.

    Rows may belong to different patterns; every operation is row-wise so a
    row's trajectory does not depend on which other rows share the batch.
    """

    def __init__(self, s: WorldSetting, codes: np.ndarray, pi0: np.ndarray,
                 rho0: np.ndarray, enforce_br: bool):
        self.s = s
        self.e = s.existence
        self.d = s.defended
        self.free = codes == Tag.INTERIOR
        self.bound = (codes == Tag.ONE).astype(float)
        self.pi = pi0.copy()
        self.rho = np.where(self.free, rho0, self.bound)
        self.enforce_br = enforce_br
        R = pi0.shape[0]
        self.lam = np.zeros_like(self.pi)
        self.lam_g = np.zeros(R)
        self.mu = np.full(R, MU_START)

    def evaluate(self, pi, rho):
        """Merit value, its gradients, and the raw violations at ``(pi, rho)``."""
        e, d, free = self.e, self.d, self.free
        pr = np.sum(pi * rho, axis=1)
        dr = rho @ d
        f = (1.0 - rho) @ d + pr * dr
        gf_pi = dr[:, None] * rho
        gf_rho = -d + pr[:, None] * d + dr[:, None] * pi
        L = e - d * pr[:, None] - pi * dr[:, None]
        h = np.where(free, L, 0.0)
        mu = self.mu[:, None]
        w = np.where(free, self.lam + mu * h, 0.0)
        wd = w @ d
        wp = np.sum(w * pi, axis=1)
        merit = -f + np.sum(self.lam * h + 0.5 * mu * h * h, axis=1)
        g_pi = -gf_pi - rho * wd[:, None] - w * dr[:, None]
        g_rho = -gf_rho - pi * wd[:, None] - d * wp[:, None]
        gap = np.zeros(pi.shape[0])
        if self.enforce_br:
            rho_star, v, _ = naive_best_response_batch(self.s, pi)
            u_m = rho @ e - pr * dr
            gap = np.maximum(v - u_m, 0.0)
            wg = self.lam_g + self.mu * gap
            merit = merit + self.lam_g * gap + 0.5 * self.mu * gap * gap
            dv_pi = -(rho_star @ d)[:, None] * rho_star
            g_pi = g_pi + wg[:, None] * (dv_pi + dr[:, None] * rho)
            g_rho = g_rho - wg[:, None] * L
        g_rho = np.where(free, g_rho, 0.0)
        return merit, g_pi, g_rho, f, np.max(np.abs(h), axis=1), gap

    def project(self, pi, rho):
        return project_capped_simplex(pi), np.where(self.free, np.clip(rho, 0.0, 1.0), self.bound)

    def inner(self, budget: np.ndarray, tol: float, active: np.ndarray, memory: int = 8):
        """Nonmonotone spectral projected gradient on the merit function.

        Only rows flagged in ``active`` move, and each iteration is charged
        to the row's entry of ``budget``.  A row stops once its step
        vanishes, the line search fails, or its best merit has not improved
        by ``tol`` over ``3 * memory`` iterations.
        """
        R = self.pi.shape[0]
        active = active & (budget > 0)
        merit = np.zeros(R)
        g_pi = np.zeros_like(self.pi)
        g_rho = np.zeros_like(self.rho)
        rows = np.flatnonzero(active)
        if rows.size == 0:
            return
        merit[rows], g_pi[rows], g_rho[rows], *_ = self._subset(rows).evaluate(self.pi[rows], self.rho[rows])
        hist = np.tile(merit[:, None], (1, memory))
        best = merit.copy()
        stall = np.zeros(R, dtype=int)
        alpha = np.ones(R)
        it = -1
        while True:
            it += 1
            rows = np.flatnonzero(active)
            if rows.size == 0:
                break
            sub = self._subset(rows)
            pi, rho = self.pi[rows], self.rho[rows]
            gp, gr = g_pi[rows], g_rho[rows]
            a = alpha[rows, None]
            tp, tr = sub.project(pi - a * gp, rho - a * gr)
            dp, dr = tp - pi, tr - rho
            size = np.maximum(np.abs(dp).max(axis=1), np.abs(dr).max(axis=1))
            slope = np.sum(gp * dp, axis=1) + np.sum(gr * dr, axis=1)
            ref = hist[rows].max(axis=1)
            lam = np.ones(rows.size)
            pending = size > 1e-12
            out = [pi.copy(), rho.copy(), merit[rows].copy(), gp.copy(), gr.copy()]
            base = merit[rows]
            for _ in range(20):
                idx = np.flatnonzero(pending)
                if idx.size == 0:
                    break
                l = lam[idx, None]
                cp, cr = pi[idx] + l * dp[idx], rho[idx] + l * dr[idx]
                m_c, gp_c, gr_c, *_ = sub._subset(idx).evaluate(cp, cr)
                ok = m_c <= ref[idx] + 1e-4 * lam[idx] * slope[idx]
                acc = idx[ok]
                out[0][acc], out[1][acc], out[2][acc] = cp[ok], cr[ok], m_c[ok]
                out[3][acc], out[4][acc] = gp_c[ok], gr_c[ok]
                pending[acc] = False
                # safeguarded quadratic interpolation of the merit along the step
                rej = idx[~ok]
                l = lam[rej]
                curv = m_c[~ok] - base[rej] - l * slope[rej]
                with np.errstate(all="ignore"):
                    trial = -slope[rej] * l * l / (2.0 * curv)
                trial = np.where(np.isfinite(trial) & (curv > 0), trial, 0.5 * l)
                lam[rej] = np.clip(trial, 0.1 * l, 0.5 * l)
            moved = ~pending & (size > 1e-12)
            s_vec = np.concatenate([out[0] - pi, out[1] - rho], axis=1)
            y_vec = np.concatenate([out[3] - gp, out[4] - gr], axis=1)
            sy = np.sum(s_vec * y_vec, axis=1)
            ss = np.sum(s_vec * s_vec, axis=1)
            new_alpha = np.where(sy > 0, ss / np.where(sy > 0, sy, 1.0), 1e3)
            # after a heavily damped step, do not trust a much longer one
            new_alpha = np.minimum(new_alpha, 100.0 * lam * alpha[rows])
            alpha[rows] = np.where(moved, np.clip(new_alpha, 1e-8, 1e8), alpha[rows])
            change = merit[rows] - out[2]
            self.pi[rows], self.rho[rows] = out[0], out[1]
            merit[rows], g_pi[rows], g_rho[rows] = out[2], out[3], out[4]
            hist[rows, it % memory] = out[2]
            better = out[2] < best[rows] - tol * np.maximum(1.0, np.abs(best[rows]))
            best[rows] = np.minimum(best[rows], out[2])
            stall[rows] = np.where(better, 0, stall[rows] + 1)
            done = ((size <= 1e-10) | pending | (stall[rows] >= 3 * memory)
                    | (moved & (np.abs(change) < tol * 1e-3) & (size < 1e-7)))
            budget[rows] -= 1
            done |= budget[rows] <= 0
            active[rows[done]] = False

    def _subset(self, rows):
        sub = object.__new__(_Batch)
        sub.s, sub.e, sub.d, sub.enforce_br = self.s, self.e, self.d, self.enforce_br
        sub.free, sub.bound = self.free[rows], self.bound[rows]
        sub.lam, sub.lam_g, sub.mu = self.lam[rows], self.lam_g[rows], self.mu[rows]
        return sub

    def run(self, cfg: SolverConfig):
        R = self.pi.shape[0]
        prev = np.full(R, np.inf)
        open_ = np.ones(R, dtype=bool)
        budget = np.full(R, cfg.max_iterations)
        for k in range(cfg.outer_iterations):
            # inexact inner solves early on, tightening toward improvement_tol
            tol = max(cfg.improvement_tol, 10.0 ** -(k + 3))
            self.inner(budget, tol, open_)
            _, _, _, _, hviol, gap = self.evaluate(self.pi, self.rho)
            viol = np.maximum(hviol, gap)
            # rows that are feasible to high accuracy, or whose penalty is
            # maxed out without progress, are finished
            stuck = (self.mu >= MU_MAX) & (viol > 0.25 * prev)
            open_ &= ~((viol <= 1e-10) | stuck) & (budget > 0)
            if not open_.any():
                break
            h = np.where(self.free, self._residual(), 0.0)
            upd = open_[:, None]
            self.lam = np.where(upd, self.lam + self.mu[:, None] * h, self.lam)
            self.lam_g = np.where(open_, self.lam_g + self.mu * gap, self.lam_g)
            slow = open_ & (viol > 0.25 * prev)
            self.mu = np.where(slow, np.minimum(self.mu * 10.0, MU_MAX), self.mu)
            prev = np.where(open_, viol, prev)
        self.polish()
        if self.enforce_br:
            self.restore()

    def _residual(self):
        pr = np.sum(self.pi * self.rho, axis=1)
        dr = self.rho @ self.d
        return self.e - self.d * pr[:, None] - self.pi * dr[:, None]

    def polish(self):
        """Re-solve the free coordinates exactly where the pattern system is regular."""
        n = self.pi.shape[1]
        A = self.d[:, None] * self.pi[:, None, :]
        Q = A + np.swapaxes(A, -1, -2)
        M = np.where(self.free[:, :, None], Q, np.eye(n))
        rhs = np.where(self.free, self.e, self.bound)
        with np.errstate(all="ignore"):
            x, ok = solve_batch(M, rhs)
        inside = np.all((x >= -1e-9) & (x <= 1 + 1e-9), axis=1)
        take = ok & inside & self.free.any(axis=1)
        self.rho[take] = np.where(self.free[take], np.clip(x[take], 0.0, 1.0), self.bound[take])


    def _gaps(self, pi, rho):
        rho_star, v, _ = naive_best_response_batch(self.s, pi)
        pr = np.sum(pi * rho, axis=1)
        return v - (rho @ self.e - pr * (rho @ self.d)), rho_star

    def restore(self, iterations: int = 30, reach: float = 1e-3):
        """Gauss-Newton steps onto ``{gap = 0, pattern equalities}``.

        Penalty methods leave a small best-response gap, and a candidate with
        gap ``g`` can overstate AM's equilibrium utility by about ``g``.  For
        rows within ``reach`` of feasibility, take minimum-norm Newton steps
        on the stacked residual (keeping active simplex and zero bounds of
        ``pi`` fixed) while the violation keeps falling.
        """
        R, n = self.pi.shape
        d = self.d
        gap, rho_star = self._gaps(self.pi, self.rho)
        viol = np.maximum(np.abs(np.where(self.free, self._residual(), 0.0)).max(axis=1), gap)
        rows = np.flatnonzero((viol <= reach) & (viol > 1e-12))
        for _ in range(iterations):
            if rows.size == 0:
                break
            pi, rho, free = self.pi[rows], self.rho[rows], self.free[rows]
            K = rows.size
            dr = rho @ d
            J = np.zeros((K, n + 2, 2 * n))
            # stationarity rows of the free coordinates
            J[:, :n, :n] = -(d[:, None] * rho[:, None, :]) - np.eye(n) * dr[:, None, None]
            J[:, :n, n:] = -(d[:, None] * pi[:, None, :]) - pi[:, :, None] * d[None, None, :]
            J[:, :n] *= free[:, :, None]
            L = self.e - d * np.sum(pi * rho, axis=1)[:, None] - pi * dr[:, None]
            g, rho_star = self._gaps(pi, rho)
            J[:, n, :n] = -(rho_star @ d)[:, None] * rho_star + dr[:, None] * rho
            J[:, n, n:] = -L
            tight = pi.sum(axis=1) >= 1 - 1e-12
            J[:, n + 1, :n] = tight[:, None]
            # frozen columns: pi coordinates at zero, and rho coordinates
            # that are fixed or sitting on a bound
            edge = (rho <= 1e-12) | (rho >= 1 - 1e-12)
            frozen = np.concatenate([pi <= 1e-12, ~free | edge], axis=1)
            J[frozen[:, None, :].repeat(n + 2, axis=1)] = 0.0
            r = np.concatenate([np.where(free, L, 0.0), g[:, None], np.zeros((K, 1))], axis=1)
            step = -np.einsum("kij,kj->ki", np.linalg.pinv(J, rcond=1e-10), r)
            base = np.maximum(np.abs(r[:, :n]).max(axis=1), g)
            done = np.zeros(K, dtype=bool)
            for lam in (1.0, 0.5, 0.25, 0.125):
                cp = project_capped_simplex(pi + lam * step[:, :n])
                cr = np.where(free, np.clip(rho + lam * step[:, n:], 0.0, 1.0), self.bound[rows])
                cg, _ = self._gaps(cp, cr)
                cL = self.e - d * np.sum(cp * cr, axis=1)[:, None] - cp * (cr @ d)[:, None]
                cv = np.maximum(np.abs(np.where(free, cL, 0.0)).max(axis=1), cg)
                ok = ~done & (cv < base)
                self.pi[rows[ok]], self.rho[rows[ok]] = cp[ok], cr[ok]
                done |= ok
                base = np.where(ok, cv, base)
            rows = rows[done & (base > 1e-12)]


def _pattern_of(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Ternary tag of every coordinate of each row of ``rho``."""
    tags = np.full(rho.shape, int(Tag.INTERIOR))
    tags[rho <= tol] = Tag.ZERO
    tags[rho >= 1 - tol] = Tag.ONE
    return tags


def _start_pool(s: WorldSetting, cfg: SolverConfig, size: int):
    """Random ``pi`` with M's exact best response and its pattern index."""
    rng = np.random.default_rng([cfg.rng_seed, 3 ** s.n])
    pis = rng.dirichlet(np.ones(s.n + 1), size=size)[:, :s.n]
    if not cfg.enforce_best_response:
        return pis, np.zeros_like(pis), np.full(size, -1)
    rho, _, _ = naive_best_response_batch(s, pis, tie_break="am")
    index = _pattern_of(rho) @ (3 ** np.arange(s.n - 1, -1, -1))
    return pis, rho, index


def _starts(spec_index: int, n: int, free: np.ndarray, cfg: SolverConfig, restarts: range,
            pool=None):
    """Initial points for one pattern.

    Pool strategies whose best response already has this pattern come first,
    so those starts satisfy every constraint; the rest are uniform draws.
    """
    hits = []
    if pool is not None:
        hits = np.flatnonzero(pool[2] == spec_index)
    pis, rhos = [], []
    for r in restarts:
        if r < len(hits):
            pis.append(pool[0][hits[r]])
            rhos.append(np.where(free, pool[1][hits[r]], 0.0))
            continue
        rng = np.random.default_rng([cfg.rng_seed, spec_index, r])
        pis.append(rng.dirichlet(np.ones(n + 1))[:n])
        rhos.append(np.where(free, rng.uniform(size=n), 0.0))
    return np.array(pis), np.array(rhos)


def _local_search(s: WorldSetting, specs: list[SubproblemSpec], cfg: SolverConfig) -> list[list[Candidate]]:
    codes, pis, rhos, owner = [], [], [], []
    pool = _start_pool(s, cfg, POOL_PER_PATTERN * 3 ** s.n)
    for k, spec in enumerate(specs):
        pi0, rho0 = _starts(spec.index, s.n, spec.free, cfg, range(cfg.restarts), pool)
        pis.append(pi0)
        rhos.append(rho0)
        codes.append(np.tile(np.array([int(t) for t in spec.pattern.tags]), (cfg.restarts, 1)))
        owner += [(k, r) for r in range(cfg.restarts)]
    batch = _Batch(s, np.concatenate(codes), np.concatenate(pis), np.concatenate(rhos),
                   cfg.enforce_best_response)
    batch.run(cfg)
    gap = np.zeros(len(owner))
    if cfg.enforce_best_response:
        # the gap counts as a constraint, so the slack cannot be spent on u_AM
        _, v, _ = naive_best_response_batch(s, batch.pi)
        pr = np.sum(batch.pi * batch.rho, axis=1)
        gap = v - (batch.rho @ s.existence - pr * (batch.rho @ s.defended))
    out: list[list[Candidate]] = [[] for _ in specs]
    for row, (k, r) in enumerate(owner):
        spec = specs[k]
        pi, rho = batch.pi[row], batch.rho[row]
        viol = spec.violation(pi, rho)
        if viol > cfg.violation_tolerance or gap[row] > GAP_TOL:
            viol = np.inf
        out[k].append(Candidate(pi.copy(), rho.copy(), spec.objective(pi, rho), viol, spec.index, r))
    return out


def _ranked(cands: list[Candidate]) -> list[Candidate]:
    good = [c for c in cands if c.converged]
    return sorted(good, key=lambda c: (-c.u_am, c.restart))


def solve_subproblem(spec: SubproblemSpec, cfg: SolverConfig = SolverConfig()):
    """Best converged local solution ``(pi, rho, u_am)`` of one pattern, or ``None``."""
    ranked = _ranked(_local_search(spec.setting, [spec], cfg)[0])
    if not ranked:
        return None
    best = ranked[0]
    return best.pi, best.rho, best.u_am


def verify_candidate(s: WorldSetting, pi, rho, cfg: SolverConfig = SolverConfig(),
                     pattern: ConstraintPattern | None = None) -> VerificationReport:
    """Constraint check followed by the exact best-response test.

    Without ``pattern`` only the box and simplex constraints are checked.
    """
    pi = np.asarray(pi, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if pattern is not None:
        violation = build_subproblem(s, pattern).violation(pi, rho)
    else:
        violation = float(max(0.0, -pi.min(), pi.max() - 1, pi.sum() - 1, -rho.min(), rho.max() - 1))
    feasible = violation <= cfg.violation_tolerance
    am = AMStrategy.naive(np.clip(pi, 0, 1) / max(1.0, np.clip(pi, 0, 1).sum()))
    rho_c = np.clip(rho, 0.0, 1.0)
    _, u_best = best_response(s, am)
    br_gap = u_best - utility_m(s, am, rho_c)
    accepted = feasible and br_gap <= cfg.best_response_slack
    return VerificationReport(bool(feasible), float(violation), float(br_gap), bool(accepted))


def existence_solution(s: WorldSetting, flags: tuple[str, ...] = ()) -> EquilibriumSolution:
    am = natural_strategy(s, NaturalStrategy.EXISTENCE)
    rho, u_m = best_response(s, am, tie_break="am")
    return EquilibriumSolution(am, rho, utility_am(s, am, rho), u_m, Provenance.ANALYTIC,
                               True, 0.0, flags)


def solve_am_optimal(s: WorldSetting, cfg: SolverConfig = SolverConfig(),
                     max_types: int = DEFAULT_MAX_TYPES) -> EquilibriumSolution:
    """Run the pattern enumeration and return the best verified equilibrium.

    When no candidate survives verification the Existence strategy under
    exact best response is returned, tagged with the ``fallback`` flag.
    """
    check_universe(s.n, max_types)
    codes = pattern_codes(s.n)[1:]
    specs = [build_subproblem(s, ConstraintPattern(tuple(row))) for row in codes]
    results = _local_search(s, specs, cfg)
    accepted = []
    for spec, cands in zip(specs, results):
        for cand in _ranked(cands):
            report = verify_candidate(s, cand.pi, cand.rho, cfg, spec.pattern)
            if report.accepted:
                accepted.append((cand, report))
                break
    if not accepted:
        log.warning("no QCQP candidate passed verification for %r; using Existence", s)
        return existence_solution(s, ("fallback",))
    cand, report = max(accepted, key=lambda cr: (cr[0].u_am, -cr[0].pattern_index, -cr[0].restart))
    am = AMStrategy.naive(cand.pi)
    rho = MStrategy(cand.rho)
    return EquilibriumSolution(am, rho, utility_am(s, am, rho), utility_m(s, am, rho),
                               Provenance.QCQP, True, max(report.br_gap, 0.0))
