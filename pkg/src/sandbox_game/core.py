"""Domain types, setting validation, utilities and the natural AM strategies.

Utilities follow the three-stage timing of the sandbox game: on a defended
machine of real type ``r`` the AM draws a sandbox type ``m`` from row ``r``
of its strategy matrix (or none), M attacks the sandbox with probability
``rho[m]``; if M was not caught it runs on the real machine and attacks with
probability ``rho[r]``.  In matrix form (``Pi`` row ``r`` = sandbox
distribution on real type ``r``)::

    u_M  = e . rho - d . ((Pi @ rho) * rho)
    u_AM = d . (1 - rho) + d . ((Pi @ rho) * rho)

Both are fractions of *all* real machines, so ``0 <= u_AM <= D``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import (
    DefendedExceedsExistence,
    DimensionMismatch,
    EmptyUniverse,
    ExistenceNotNormalized,
    NegativeEntry,
    UndefinedStrategy,
    ValidationError,
    ZeroExistence,
)

# Accepted gap between sum(e) and 1 on input; the vectors are rescaled.
NORMALIZATION_TOL = 1e-6
# Slack allowed on probabilities before they are clipped into range.
PROB_TOL = 1e-9
# Tolerance used when comparing defended and existence masses.
CLASS_TOL = 1e-12

ArrayLike = Union[Sequence[float], np.ndarray]


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MachineType:
    index: int
    label: str | None = None

    @property
    def name(self) -> str:
        return self.label if self.label is not None else str(self.index)


@dataclass(frozen=True, eq=False)
class WorldSetting:
    """Existence vector ``e`` and defended vector ``d`` over the machine types.

    Build instances through :func:`validate_setting`; the constructor runs the
    same checks but does not renormalize.
    """

    existence: np.ndarray
    defended: np.ndarray
    types: tuple[MachineType, ...] = ()

    def __post_init__(self):
        e = _frozen(self.existence, 1)
        d = _frozen(self.defended, 1)
        if e.size == 0:
            raise EmptyUniverse("a setting needs at least one machine type")
        if e.shape != d.shape:
            raise DimensionMismatch(f"existence has {e.size} entries, defended has {d.size}")
        if np.any(e < 0) or np.any(d < 0):
            raise NegativeEntry("existence and defended fractions must be non-negative")
        if np.any(e == 0):
            raise ZeroExistence(f"types {np.flatnonzero(e == 0).tolist()} have zero existence")
        if abs(e.sum() - 1.0) > PROB_TOL:
            raise ExistenceNotNormalized(f"existence sums to {e.sum():.12g}")
        if np.any(d > e + CLASS_TOL):
            bad = np.flatnonzero(d > e + CLASS_TOL).tolist()
            raise DefendedExceedsExistence(f"defended exceeds existence for types {bad}")
        d = _frozen(np.minimum(d, e), 1)
        types = tuple(self.types) or tuple(MachineType(i) for i in range(e.size))
        if len(types) != e.size or [t.index for t in types] != list(range(e.size)):
            raise ValidationError("machine type indices must be 0..n-1 in order")
        object.__setattr__(self, "existence", e)
        object.__setattr__(self, "defended", d)
        object.__setattr__(self, "types", types)

    @property
    def n(self) -> int:
        return self.existence.size

    @property
    def total_defended(self) -> float:
        """``D``: the fraction of all real machines running AM."""
        return float(self.defended.sum())

    @property
    def labels(self) -> list[str]:
        return [t.name for t in self.types]

    def __repr__(self):
        return f"WorldSetting(e={self.existence.tolist()}, d={self.defended.tolist()})"


class StrategyKind(str, enum.Enum):
    NAIVE = "naive"
    SOPHISTICATED = "sophisticated"


@dataclass(frozen=True, eq=False)
class AMStrategy:
    """Sandbox-generation strategy of the AM.

    ``pi`` is a vector for a naive strategy and an ``n x n`` matrix (row ``r``
    is the distribution used on real type ``r``) for a sophisticated one.  Row
    sums may fall short of one; the shortfall is the chance of no sandbox.
    """

    kind: StrategyKind
    pi: np.ndarray

    def __post_init__(self):
        ndim = 1 if self.kind is StrategyKind.NAIVE else 2
        pi = np.array(self.pi, dtype=float)
        if pi.ndim != ndim:
            raise DimensionMismatch(f"{self.kind.value} strategy needs a {ndim}-d array")
        if ndim == 2 and pi.shape[0] != pi.shape[1]:
            raise DimensionMismatch(f"strategy matrix must be square, got {pi.shape}")
        if np.any(pi < -PROB_TOL) or np.any(pi > 1 + PROB_TOL):
            raise ValidationError("sandbox probabilities must lie in [0, 1]")
        if np.any(pi.sum(axis=-1) > 1 + PROB_TOL):
            raise ValidationError("sandbox probabilities on a real machine sum above 1")
        pi = np.clip(pi, 0.0, 1.0)
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def naive(cls, pi: ArrayLike) -> "AMStrategy":
        return cls(StrategyKind.NAIVE, pi)

    @classmethod
    def sophisticated(cls, matrix: ArrayLike) -> "AMStrategy":
        return cls(StrategyKind.SOPHISTICATED, matrix)

    @property
    def n(self) -> int:
        return self.pi.shape[-1]

    @property
    def is_naive(self) -> bool:
        return self.kind is StrategyKind.NAIVE

    def matrix(self) -> np.ndarray:
        if self.is_naive:
            return np.tile(self.pi, (self.n, 1))
        return self.pi.copy()

    def expanded(self) -> "AMStrategy":
        return AMStrategy.sophisticated(self.matrix())

    def as_naive(self) -> "AMStrategy":
        """Collapse a sophisticated strategy whose rows all agree."""
        if self.is_naive:
            return self
        if not np.allclose(self.pi, self.pi[0], atol=PROB_TOL, rtol=0):
            raise ValidationError("strategy rows differ; it is not naive")
        return AMStrategy.naive(self.pi[0])

    def to_list(self) -> list:
        return self.pi.tolist()

    def __repr__(self):
        return f"AMStrategy.{self.kind.value}({np.round(self.pi, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class MStrategy:
    """Attack probability of M in each perceived environment."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.ndim != 1:
            raise DimensionMismatch("attack strategy must be a vector")
        if np.any(rho < -PROB_TOL) or np.any(rho > 1 + PROB_TOL):
            raise ValidationError("attack probabilities must lie in [0, 1]")
        rho = np.clip(rho, 0.0, 1.0)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.rho.size

    @property
    def is_deterministic(self) -> bool:
        return bool(np.all((self.rho == 0) | (self.rho == 1)))

    @property
    def is_naive(self) -> bool:
        return bool(np.all(self.rho == self.rho[0]))

    def to_list(self) -> list:
        return self.rho.tolist()

    def __repr__(self):
        return f"MStrategy({np.round(self.rho, 6).tolist()})"


class Provenance(str, enum.Enum):
    ANALYTIC = "Analytic"
    QCQP = "Qcqp"
    BRUTE_FORCE = "BruteForce"
    MANUAL = "Manual"


@dataclass(frozen=True)
class EquilibriumSolution:
    am: AMStrategy
    m: MStrategy
    u_am: float
    u_m: float
    provenance: Provenance
    verified: bool
    br_gap: float = 0.0
    flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "am": {"kind": self.am.kind.value, "pi": self.am.to_list()},
            "rho": self.m.to_list(),
            "u_am": self.u_am,
            "u_m": self.u_m,
            "provenance": self.provenance.value,
            "verified": self.verified,
            "br_gap": self.br_gap,
            "flags": list(self.flags),
        }


class SettingClass(str, enum.Enum):
    FULLY_DEFENDED = "FullyDefended"
    AT_MOST_HALF = "AtMostHalf"
    SINGLE_TYPE_DEFENDED = "SingleTypeDefended"
    HARD = "Hard"


def validate_setting(existence: ArrayLike, defended: ArrayLike,
                     labels: Sequence[str] | None = None) -> WorldSetting:
    """Check a candidate setting and return it as a :class:`WorldSetting`.

    If ``sum(existence)`` is within ``1e-6`` of one, both vectors are divided
    by that sum (so the defended share of each type is preserved); larger
    gaps raise :class:`ExistenceNotNormalized`.
    """
    e = np.asarray(existence, dtype=float)
    d = np.asarray(defended, dtype=float)
    if e.ndim != 1 or d.ndim != 1:
        raise DimensionMismatch("existence and defended must be vectors")
    if e.size == 0:
        raise EmptyUniverse("a setting needs at least one machine type")
    if e.shape != d.shape:
        raise DimensionMismatch(f"existence has {e.size} entries, defended has {d.size}")
    if np.any(e < 0) or np.any(d < 0):
        raise NegativeEntry("existence and defended fractions must be non-negative")
    total = e.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ExistenceNotNormalized(f"existence sums to {total:.12g}, not 1")
    e, d = e / total, d / total
    types = ()
    if labels is not None:
        if len(labels) != e.size:
            raise DimensionMismatch(f"{len(labels)} labels for {e.size} types")
        types = tuple(MachineType(i, str(lab)) for i, lab in enumerate(labels))
    return WorldSetting(e, d, types)


def classify_setting(s: WorldSetting) -> SettingClass:
    D = s.total_defended
    if np.all(np.abs(s.existence - s.defended) <= CLASS_TOL):
        return SettingClass.FULLY_DEFENDED
    if D <= 0.5 + CLASS_TOL:
        return SettingClass.AT_MOST_HALF
    if np.count_nonzero(s.defended > 0) == 1:
        return SettingClass.SINGLE_TYPE_DEFENDED
    return SettingClass.HARD


# -- utilities -------------------------------------------------------------

def strategy_matrix(am: AMStrategy | ArrayLike, n: int | None = None) -> np.ndarray:
    """Return the ``n x n`` sandbox matrix of ``am`` (vectors are naive)."""
    if isinstance(am, AMStrategy):
        mat = am.matrix()
    else:
        arr = np.asarray(am, dtype=float)
        mat = np.tile(arr, (arr.size, 1)) if arr.ndim == 1 else arr
    if n is not None and mat.shape != (n, n):
        raise DimensionMismatch(f"strategy of shape {mat.shape} for {n} machine types")
    return mat


def _rho(m: MStrategy | ArrayLike, n: int) -> np.ndarray:
    rho = m.rho if isinstance(m, MStrategy) else np.asarray(m, dtype=float)
    if rho.shape != (n,):
        raise DimensionMismatch(f"attack strategy of shape {rho.shape} for {n} machine types")
    return rho


def matrix_m_utility(e, d, Pi, rho):
    """Batched ``u_M`` for matrices ``Pi[..., n, n]`` and ``rho[..., n]``."""
    caught = np.einsum("...rm,...m->...r", Pi, rho)
    return rho @ e - np.sum(d * caught * rho, axis=-1)


def matrix_am_utility(d, Pi, rho):
    caught = np.einsum("...rm,...m->...r", Pi, rho)
    return (1.0 - rho) @ d + np.sum(d * caught * rho, axis=-1)


def naive_m_utility(e, d, pi, rho):
    """Batched ``u_M`` for naive ``pi[..., n]`` (all matrix rows equal)."""
    return rho @ e - np.sum(pi * rho, axis=-1) * (rho @ d)


def naive_am_utility(d, pi, rho):
    return (1.0 - rho) @ d + np.sum(pi * rho, axis=-1) * (rho @ d)


def utility_m(s: WorldSetting, am: AMStrategy | ArrayLike, m: MStrategy | ArrayLike) -> float:
    """Expected fraction of all real machines that M attacks successfully."""
    Pi = strategy_matrix(am, s.n)
    rho = _rho(m, s.n)
    return float(matrix_m_utility(s.existence, s.defended, Pi, rho))


def utility_am(s: WorldSetting, am: AMStrategy | ArrayLike, m: MStrategy | ArrayLike) -> float:
    """Expected fraction of all real machines that are defended and not attacked."""
    Pi = strategy_matrix(am, s.n)
    rho = _rho(m, s.n)
    return float(matrix_am_utility(s.defended, Pi, rho))


# -- natural strategies ----------------------------------------------------

class NaturalStrategy(str, enum.Enum):
    EXISTENCE = "existence"
    DEFENDED = "defended"
    UNDEFENDED = "undefended"
    PCT_DEFENDED = "pct-defended"
    PCT_UNDEFENDED = "pct-undefended"
    MAJORITY = "majority"
    UNIFORM = "uniform"

    @property
    def display(self) -> str:
        return _DISPLAY[self]


_DISPLAY = {
    NaturalStrategy.EXISTENCE: "Existence",
    NaturalStrategy.DEFENDED: "Defended",
    NaturalStrategy.UNDEFENDED: "Undefended",
    NaturalStrategy.PCT_DEFENDED: "%Defended",
    NaturalStrategy.PCT_UNDEFENDED: "%Undefended",
    NaturalStrategy.MAJORITY: "Majority",
    NaturalStrategy.UNIFORM: "Uniform",
}


def _distribution(weights: np.ndarray, what: str) -> np.ndarray:
    total = weights.sum()
    if total <= 0:
        raise UndefinedStrategy(f"{what} has no mass in this setting")
    return weights / total


def natural_strategy(s: WorldSetting, name: NaturalStrategy | str) -> AMStrategy:
    """One of the seven closed-form naive strategies.

    The ``%`` strategies are normalized to distributions, and "undefended"
    mass of a type is ``e_m - d_m``.
    """
    name = NaturalStrategy(name)
    e, d = s.existence, s.defended
    D = s.total_defended
    if name is NaturalStrategy.EXISTENCE:
        pi = e.copy()
    elif name is NaturalStrategy.DEFENDED:
        if D <= 0:
            raise UndefinedStrategy("Defended needs D > 0")
        pi = d / D
    elif name is NaturalStrategy.UNDEFENDED:
        if D >= 1 - CLASS_TOL:
            raise UndefinedStrategy("Undefended needs D < 1")
        pi = _distribution(e - d, "Undefended")
    elif name is NaturalStrategy.PCT_DEFENDED:
        pi = _distribution(d / e, "%Defended")
    elif name is NaturalStrategy.PCT_UNDEFENDED:
        pi = _distribution((e - d) / e, "%Undefended")
    elif name is NaturalStrategy.MAJORITY:
        pi = np.zeros(s.n)
        pi[int(np.argmax(e))] = 1.0
    else:
        pi = np.full(s.n, 1.0 / s.n)
    return AMStrategy.naive(pi)


# -- JSON setting files ----------------------------------------------------

def setting_from_dict(raw: dict) -> WorldSetting:
    try:
        existence = raw["existence"]
        defended = raw["defended"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"setting needs 'existence' and 'defended' arrays: {exc}") from None
    return validate_setting(existence, defended, raw.get("types"))


def setting_to_dict(s: WorldSetting) -> dict:
    out = {"existence": s.existence.tolist(), "defended": s.defended.tolist()}
    if any(t.label is not None for t in s.types):
        out = {"types": s.labels, **out}
    return out


def load_setting(path: str | Path) -> WorldSetting:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return setting_from_dict(raw)


def save_setting(s: WorldSetting, path: str | Path) -> None:
    Path(path).write_text(json.dumps(setting_to_dict(s), indent=2) + "\n")
