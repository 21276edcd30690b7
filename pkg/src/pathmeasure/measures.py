"""Measures on boundary conditions.

The classical measure is plain length of a set of initial momenta.  The
quantum measure of a set of final positions is the probability that a
narrow Gaussian released at the origin at t = 0 is found there at time T,
computed by split-step Fourier propagation on a periodic grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoundaryLeakError
from .pathcore import MaskEvent, Potential
from .region import Region

LEAK_THRESHOLD = 1e-6
EDGE_POINTS = 4


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic grid of ``n`` cell-centred points on ``[x_min, x_max)``.

    Points sit at ``x_min + (k + 1/2) dx`` so a domain symmetric about zero
    gives a grid that is exactly mirror symmetric.
    """

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max={self.x_max} must exceed x_min={self.x_min}")
        n = int(self.n)
        if n != self.n or n < 64 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 64, got {self.n}")
        object.__setattr__(self, "n", n)

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> SpatialGrid:
        return cls(-half_width, half_width, n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def full_region(self) -> Region:
        return Region.interval(self.x_min, self.x_max)

    def refined(self, factor: int = 2) -> SpatialGrid:
        return SpatialGrid(self.x_min, self.x_max, self.n * factor)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    grid: SpatialGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} amplitudes, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm2(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def inner(self, other: GridWavefunction) -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.dx)

    def distance(self, other: GridWavefunction) -> float:
        diff = self.amplitudes - other.amplitudes
        return float(np.sqrt(np.sum(np.abs(diff) ** 2) * self.grid.dx))

    def edge_mass(self, points: int = EDGE_POINTS) -> float:
        rho = self.density
        return float((np.sum(rho[:points]) + np.sum(rho[-points:])) * self.grid.dx)


@dataclass(frozen=True)
class RegularizedSource:
    """Normalized Gaussian standing in for the improper position eigenvector at x=0."""

    center: float = 0.0
    sigma0: float = 0.05

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")

    def sample(self, grid: SpatialGrid) -> GridWavefunction:
        if self.sigma0 < 2 * grid.dx * (1 - 1e-12):
            raise ValueError(
                f"sigma0={self.sigma0} is under-resolved by dx={grid.dx} (need sigma0 >= 2 dx)"
            )
        psi = np.exp(-((grid.x - self.center) ** 2) / (4 * self.sigma0**2)).astype(complex)
        psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
        return GridWavefunction(grid, psi)

    def free_amplitude(self, x, t: float) -> np.ndarray:
        """Exact freely spread amplitude at time ``t`` (continuum normalization)."""
        s2 = self.sigma0**2
        z = 1 + 1j * t / (2 * s2)
        x = np.asarray(x, dtype=float) - self.center
        return (2 * np.pi * s2) ** -0.25 / np.sqrt(z) * np.exp(-(x**2) / (4 * s2 * z))

    def sigma_at(self, t: float) -> float:
        return float(np.sqrt(self.sigma0**2 + (t / (2 * self.sigma0)) ** 2))


@dataclass(frozen=True)
class MeasureReport:
    value: float
    method: str
    region: Region

    def __post_init__(self):
        if self.method not in ("classical", "quantum"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.value < 0:
            raise ValueError(f"measure must be non-negative, got {self.value}")
        if self.method == "quantum" and self.value > 1 + 1e-9:
            raise ValueError(f"quantum measure exceeds 1: {self.value}")


def _check_leak(psi: np.ndarray, dx: float, threshold: float) -> None:
    rho = np.abs(psi[:EDGE_POINTS]) ** 2
    rho_hi = np.abs(psi[-EDGE_POINTS:]) ** 2
    mass = float((rho.sum() + rho_hi.sum()) * dx)
    if mass > threshold:
        raise BoundaryLeakError(mass, threshold)


def evolve(
    psi: GridWavefunction,
    potential: Potential,
    duration: float,
    steps: int,
    *,
    leak_threshold: float = LEAK_THRESHOLD,
    checks: int = 32,
) -> GridWavefunction:
    """Strang-split propagation ``exp(-i H duration)``.

    Each step is half a potential kick, a full kinetic drift in Fourier space
    and another half kick.  A negative ``duration`` propagates backwards.
    The edge mass is checked at up to ``checks`` evenly spaced steps and at
    the end.
    """
    if duration == 0:
        raise ValueError("duration must be nonzero")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    grid = psi.grid
    dt = duration / steps
    kinetic = np.exp(-0.5j * dt * grid.k**2)
    a = psi.amplitudes.copy()
    _check_leak(a, grid.dx, leak_threshold)
    every = max(1, steps // max(1, checks))

    if potential.is_free:
        for step in range(1, steps + 1):
            a = np.fft.ifft(np.fft.fft(a) * kinetic)
            if step % every == 0:
                _check_leak(a, grid.dx, leak_threshold)
    else:
        v = potential.value(grid.x)
        half_kick = np.exp(-0.5j * dt * v)
        full_kick = half_kick * half_kick
        a = a * half_kick
        for step in range(1, steps + 1):
            a = np.fft.ifft(np.fft.fft(a) * kinetic)
            # merged half kicks; the phase does not change |psi| for the leak check
            a = a * (full_kick if step < steps else half_kick)
            if step % every == 0:
                _check_leak(a, grid.dx, leak_threshold)
    _check_leak(a, grid.dx, leak_threshold)
    return GridWavefunction(grid, a)


def apply_projector(psi: GridWavefunction, region: Region) -> GridWavefunction:
    """Zero the amplitudes outside ``region`` (points with lo <= x < hi are kept)."""
    grid = psi.grid
    if not region.is_empty and (region.hi <= grid.x_min or region.lo >= grid.x_max):
        raise ValueError("region does not overlap the grid domain")
    keep = region.contains(grid.x)
    return GridWavefunction(grid, np.where(keep, psi.amplitudes, 0))


def region_mass(psi: GridWavefunction, region: Region) -> float:
    return float(np.sum(psi.density[region.contains(psi.grid.x)]) * psi.grid.dx)


def _split_steps(steps: int, t_mask: float, T: float) -> tuple[int, int]:
    first = min(max(1, round(steps * t_mask / T)), max(1, steps - 1))
    return first, max(1, steps - first)


def final_state(
    potential: Potential,
    T: float,
    source: RegularizedSource,
    grid: SpatialGrid,
    steps: int,
    mask: MaskEvent | None = None,
) -> GridWavefunction:
    """Evolve the source to time T, optionally through a mask at ``mask.t_mask``.

    The mask is an intermediate projector: evolve, project, evolve.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    psi = source.sample(grid)
    if mask is None:
        return evolve(psi, potential, T, steps)
    if not 0 < mask.t_mask < T:
        raise ValueError(f"mask time {mask.t_mask} must lie in (0, {T})")
    steps_a, steps_b = _split_steps(steps, mask.t_mask, T)
    psi = evolve(psi, potential, mask.t_mask, steps_a)
    psi = apply_projector(psi, mask.open)
    return evolve(psi, potential, T - mask.t_mask, steps_b)


def quantum_measure(
    region: Region,
    potential: Potential,
    T: float,
    source: RegularizedSource,
    grid: SpatialGrid,
    steps: int,
) -> MeasureReport:
    """Probability that the evolved source is found in ``region`` at time T."""
    psi = final_state(potential, T, source, grid, steps)
    return MeasureReport(region_mass(psi, region), "quantum", region)


def quantum_measures(
    regions: Sequence[Region],
    potential: Potential,
    T: float,
    source: RegularizedSource,
    grid: SpatialGrid,
    steps: int,
) -> list[MeasureReport]:
    """:func:`quantum_measure` for many regions sharing one propagation."""
    psi = final_state(potential, T, source, grid, steps)
    return [MeasureReport(region_mass(psi, r), "quantum", r) for r in regions]


def classical_measure(region: Region) -> MeasureReport:
    """Volume (length) of a set of initial momenta."""
    return MeasureReport(region.length, "classical", region)


def induced_path_weight(
    final_region: Region,
    potential: Potential,
    T: float,
    source: RegularizedSource,
    grid: SpatialGrid,
    steps: int,
) -> float:
    """Weight of the set of least-action paths ending in ``final_region``.

    A path from the origin is fixed by its endpoint at T, so the set of paths
    and the set of final positions are in one-to-one correspondence and the
    path weight is the quantum measure of the endpoints.
    """
    return quantum_measure(final_region, potential, T, source, grid, steps).value


def interference_defect(
    region: Region,
    mask_both: MaskEvent,
    mask_a: MaskEvent,
    mask_b: MaskEvent,
    potential: Potential,
    T: float,
    source: RegularizedSource,
    grid: SpatialGrid,
    steps: int,
) -> float:
    """``mu(both) - mu(a) - mu(b)`` on ``region``; zero for an additive measure."""
    if not (mask_a.t_mask == mask_b.t_mask == mask_both.t_mask):
        raise ValueError("all masks must act at the same time")
    if not mask_a.open.is_disjoint(mask_b.open) or mask_a.open.union(mask_b.open) != mask_both.open:
        raise ValueError("mask_a and mask_b must partition mask_both")
    values = [
        region_mass(final_state(potential, T, source, grid, steps, m), region)
        for m in (mask_both, mask_a, mask_b)
    ]
    return values[0] - values[1] - values[2]
