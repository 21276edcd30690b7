"""CHSH correlations for deterministic local hidden-variable models.

A model has a finite hidden-variable space, outcome functions A(a, lam) and
B(b, lam) with values +-1 for settings a, b in {1, 2}, and one distribution
of lam per setting pair.  When the four distributions coincide, |S| <= 2;
when they may differ, any four correlations are reachable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))
SIGNS = np.array([1.0, 1.0, 1.0, -1.0])
MAX_SIZE = 16
LITERAL_ENUMERATION_MAX = 4


@dataclass(frozen=True)
class HiddenVariableSpace:
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"size must be a positive integer, got {self.size}")


@dataclass(frozen=True, eq=False)
class Strategy:
    """Outcome tables ``A[a-1, lam]`` and ``B[b-1, lam]``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        B = np.array(self.B, dtype=float)
        if A.ndim != 2 or A.shape[0] != 2 or A.shape != B.shape:
            raise ValueError("A and B must both have shape (2, size)")
        if not (np.all(np.abs(A) == 1) and np.all(np.abs(B) == 1)):
            raise ValueError("outcomes must be +1 or -1")
        A.flags.writeable = False
        B.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def size(self) -> int:
        return self.A.shape[1]

    def permuted(self, perm) -> Strategy:
        return Strategy(self.A[:, perm], self.B[:, perm])


@dataclass(frozen=True, eq=False)
class DistributionSet:
    """``rho[i]`` is the distribution of lam in the experiment with setting pair ``PAIRS[i]``."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.ndim != 2 or rho.shape[0] != 4:
            raise ValueError("rho must have shape (4, size)")
        if np.any(rho < 0):
            raise ValueError("probabilities must be non-negative")
        if np.any(np.abs(rho.sum(axis=1) - 1) > 1e-12):
            raise ValueError("each distribution must sum to 1")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def shared(cls, rho) -> DistributionSet:
        return cls(np.tile(np.asarray(rho, dtype=float), (4, 1)))

    @property
    def is_shared(self) -> bool:
        return bool(np.all(self.rho == self.rho[0]))

    def permuted(self, perm) -> DistributionSet:
        return DistributionSet(self.rho[:, perm])


@dataclass(frozen=True)
class ChshReport:
    correlations: tuple[float, float, float, float]
    S: float

    def __post_init__(self):
        if any(abs(e) > 1 + 1e-12 for e in self.correlations):
            raise ValueError("correlations must lie in [-1, 1]")


def correlation(strategy: Strategy, rho_i, pair: tuple[int, int]) -> float:
    a, b = pair
    rho_i = np.asarray(rho_i, dtype=float)
    return float(np.sum(rho_i * strategy.A[a - 1] * strategy.B[b - 1]))


def chsh(strategy: Strategy, dist: DistributionSet) -> ChshReport:
    """``S = E(1,1) + E(1,2) + E(2,1) - E(2,2)``, each E under its own distribution."""
    if dist.rho.shape[1] != strategy.size:
        raise ValueError("strategy and distributions disagree on the hidden-variable space size")
    e = tuple(correlation(strategy, dist.rho[i], pair) for i, pair in enumerate(PAIRS))
    return ChshReport(e, e[0] + e[1] + e[2] - e[3])


def _chsh_at_point_masses(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """S for every point-mass distribution; A, B have shape (..., 2, size)."""
    terms = np.stack([A[..., a - 1, :] * B[..., b - 1, :] for a, b in PAIRS], axis=-2)
    return np.einsum("i,...il->...l", SIGNS, terms)


def _all_tables(size: int) -> np.ndarray:
    """Every (2, size) table of +-1 outcomes, shape (4**size, 2, size)."""
    bits = np.array(list(itertools.product((1.0, -1.0), repeat=2 * size)))
    return bits.reshape(-1, 2, size)


def max_chsh_shared(space: HiddenVariableSpace) -> float:
    """Largest |S| over all strategies when the four distributions are equal.

    S is linear in the shared distribution, so its extreme values are taken
    at point masses.  Up to size 4 every (A, B) pair is enumerated.  Above
    that the enumeration is factorized: at a point mass on lam, S reads only
    column lam of A and B, so the maximum equals the maximum over the 16
    local outcome assignments.
    """
    size = space.size
    if size > MAX_SIZE:
        raise CapacityError(f"exhaustive enumeration is limited to size <= {MAX_SIZE}, got {size}")
    if size <= LITERAL_ENUMERATION_MAX:
        tables = _all_tables(size)
        best = 0.0
        for A in tables:
            s = _chsh_at_point_masses(A[None, :, :], tables)
            best = max(best, float(np.max(np.abs(s))))
        return best
    local = _all_tables(1)
    s = _chsh_at_point_masses(local[:, None, :, :], local[None, :, :, :])
    return float(np.max(np.abs(s)))


def random_shared_models(size: int, count: int, gen: np.random.Generator):
    """Random strategies with random shared distributions (Dirichlet(1) weights)."""
    A = gen.choice([-1.0, 1.0], size=(count, 2, size))
    B = gen.choice([-1.0, 1.0], size=(count, 2, size))
    rho = gen.dirichlet(np.ones(size), size=count)
    return A, B, rho


def chsh_shared_batch(A: np.ndarray, B: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Vectorized S for many models with shared distributions."""
    return np.einsum("nl,nl->n", _chsh_at_point_masses(A, B), rho)


def outcome_space() -> tuple[HiddenVariableSpace, Strategy]:
    """lam enumerates the outcome pairs (+,+), (+,-), (-,+), (-,-); settings are ignored."""
    a = np.array([1.0, 1.0, -1.0, -1.0])
    b = np.array([1.0, -1.0, 1.0, -1.0])
    return HiddenVariableSpace(4), Strategy(np.vstack([a, a]), np.vstack([b, b]))


def fit_setting_dependent(targets) -> tuple[Strategy, DistributionSet]:
    """Per-experiment distributions reproducing four target correlations exactly."""
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (4,) or np.any(np.abs(targets) > 1):
        raise ValueError("need four targets in [-1, 1]")
    _, strategy = outcome_space()
    rows = []
    for e in targets:
        same = (1 + e) / 4
        diff = (1 - e) / 4
        rows.append([same, diff, diff, same])
    return strategy, DistributionSet(np.array(rows))


def singlet_targets(a1: float, a2: float, b1: float, b2: float) -> tuple[float, float, float, float]:
    """Spin-singlet correlations ``-cos(a - b)`` for the four setting pairs."""
    angles = {1: a1, 2: a2}, {1: b1, 2: b2}
    return tuple(-np.cos(angles[0][a] - angles[1][b]) for a, b in PAIRS)


CANONICAL_ANGLES = (0.0, np.pi / 2, np.pi / 4, -np.pi / 4)
