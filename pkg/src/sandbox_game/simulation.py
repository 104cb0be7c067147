"""Monte-Carlo play of the three-stage game over a synthetic fleet.

Each machine is drawn i.i.d.: type ``r ~ e``, defended with probability
``d_r / e_r``.  On a defended machine AM shows a sandbox of type ``m`` with
probability ``Pi[r, m]`` (none with the leftover mass); M attacks a sandbox
of type ``m`` with probability ``rho_m`` and is caught, otherwise it reaches
the real machine and attacks it with probability ``rho_r``.

Random numbers come from numpy's PCG64 generator seeded with ``seed``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AMStrategy, MStrategy, WorldSetting, strategy_matrix

OUTCOMES = (
    "caught_in_sandbox",
    "evaded_then_hid",
    "no_sandbox_hid",
    "attacked_defended",
    "attacked_undefended",
    "hid_undefended",
)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    @classmethod
    def binomial(cls, hits: int, trials: int) -> "Estimate":
        if trials == 0:
            return cls(float("nan"), float("nan"))
        p = hits / trials
        return cls(p, float(np.sqrt(p * (1 - p) / trials)))

    def within(self, target: float, sigmas: float) -> bool:
        # a zero standard error only happens at p in {0, 1}, where the
        # estimate must then be exact
        return abs(self.value - target) <= sigmas * self.stderr + 1e-12


@dataclass(frozen=True)
class SimulationResult:
    n_machines: int
    counts: dict
    empirical_u_am: Estimate
    empirical_u_m: Estimate
    protected_among_defended: Estimate

    def to_dict(self) -> dict:
        return {
            "n_machines": self.n_machines,
            "counts": dict(self.counts),
            "u_am": {"value": self.empirical_u_am.value, "stderr": self.empirical_u_am.stderr},
            "u_m": {"value": self.empirical_u_m.value, "stderr": self.empirical_u_m.stderr},
            "protected_among_defended": {
                "value": self.protected_among_defended.value,
                "stderr": self.protected_among_defended.stderr,
            },
        }


def simulate(s: WorldSetting, am: AMStrategy | np.ndarray, m: MStrategy | np.ndarray,
             n_machines: int, seed: int = 0) -> SimulationResult:
    """Play the game once on each of ``n_machines`` independent machines.

    ``empirical_u_am`` is the share of all machines that are defended and
    end up unharmed; ``empirical_u_m`` the share attacked on the real machine.
    """
    if n_machines < 1:
        raise ValueError("n_machines must be at least 1")
    n = s.n
    Pi = strategy_matrix(am, n)
    rho = m.rho if isinstance(m, MStrategy) else np.asarray(m, dtype=float)
    if rho.shape != (n,):
        raise ValueError(f"rho must have {n} entries")
    e, d = s.existence, s.defended
    rng = np.random.Generator(np.random.PCG64(seed))
    N = int(n_machines)

    kind = np.minimum(np.searchsorted(np.cumsum(e), rng.random(N), side="right"), n - 1)
    defended = rng.random(N) < (d / e)[kind]
    # sandbox index n stands for "no sandbox"
    cum = np.cumsum(Pi, axis=1)
    sandbox = np.sum(rng.random(N)[:, None] >= cum[kind], axis=1)
    has_box = defended & (sandbox < n)
    attack_box = rng.random(N) < np.append(rho, 0.0)[sandbox]
    attack_real = rng.random(N) < rho[kind]

    caught = has_box & attack_box
    reached = defended & ~caught
    counts = {
        "caught_in_sandbox": int(caught.sum()),
        "evaded_then_hid": int((has_box & ~attack_box & ~attack_real).sum()),
        "no_sandbox_hid": int((defended & ~has_box & ~attack_real).sum()),
        "attacked_defended": int((reached & attack_real).sum()),
        "attacked_undefended": int((~defended & attack_real).sum()),
        "hid_undefended": int((~defended & ~attack_real).sum()),
    }
    protected = counts["caught_in_sandbox"] + counts["evaded_then_hid"] + counts["no_sandbox_hid"]
    attacked = counts["attacked_defended"] + counts["attacked_undefended"]
    return SimulationResult(
        N,
        counts,
        Estimate.binomial(protected, N),
        Estimate.binomial(attacked, N),
        Estimate.binomial(protected, int(defended.sum())),
    )
