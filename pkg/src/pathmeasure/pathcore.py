"""Classical single-particle dynamics in one dimension.

Natural units throughout (hbar = m = 1).  Two ways of fixing a path are
supported: initial position and momentum, integrated with velocity Verlet,
and positions at two times, solved by minimizing the discretized action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import ConvergenceError, InvalidPathError, NoPathError
from .region import Region


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            raise ValueError("time bounds must be finite")
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end={self.t_end} must exceed t_start={self.t_start}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.p)):
            raise ValueError(f"phase point must be finite, got ({self.x}, {self.p})")


@dataclass(frozen=True, eq=False)
class Potential:
    """External potential V(x).

    Use the constructors :meth:`free`, :meth:`harmonic` and :meth:`tabulated`.
    Tabulated samples are interpolated with a cubic spline so that the
    force is the exact derivative of the interpolated V.
    """

    kind: str = "free"
    omega: float = 0.0
    x_samples: np.ndarray | None = None
    v_samples: np.ndarray | None = None
    _spline: CubicSpline | None = field(default=None, repr=False)

    @classmethod
    def free(cls) -> Potential:
        return cls("free")

    @classmethod
    def harmonic(cls, omega: float) -> Potential:
        if not omega > 0:
            raise ValueError(f"harmonic potential needs omega > 0, got {omega}")
        return cls("harmonic", omega=float(omega))

    @classmethod
    def tabulated(cls, x, v) -> Potential:
        x = np.array(x, dtype=float)
        v = np.array(v, dtype=float)
        if x.shape != v.shape or x.ndim != 1 or len(x) < 4:
            raise ValueError("tabulated potential needs matching 1-D sample arrays (>= 4 points)")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("tabulated potential samples must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValueError("tabulated sample positions must be strictly increasing")
        x.flags.writeable = False
        v.flags.writeable = False
        return cls("tabulated", x_samples=x, v_samples=v, _spline=CubicSpline(x, v))

    @property
    def is_free(self) -> bool:
        return self.kind == "free"

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return 0.5 * self.omega**2 * x**2
        return self._spline(x)

    def derivative(self, x) -> np.ndarray:
        """dV/dx (minus the force)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return self.omega**2 * x
        return self._spline(x, 1)

    def to_dict(self) -> dict:
        if self.kind == "harmonic":
            return {"kind": "harmonic", "omega": self.omega}
        if self.kind == "tabulated":
            return {"kind": "tabulated", "x": self.x_samples.tolist(), "v": self.v_samples.tolist()}
        return {"kind": "free"}

    @classmethod
    def from_dict(cls, d: dict) -> Potential:
        kind = d.get("kind", "free")
        if kind == "free":
            return cls.free()
        if kind == "harmonic":
            return cls.harmonic(d["omega"])
        if kind == "tabulated":
            return cls.tabulated(d["x"], d["v"])
        raise ValueError(f"unknown potential kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Path:
    grid: TimeGrid
    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.shape != (self.grid.steps + 1,):
            raise InvalidPathError(
                f"path needs {self.grid.steps + 1} positions, got shape {pos.shape}"
            )
        if not np.all(np.isfinite(pos)):
            raise InvalidPathError("path positions must be finite")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @classmethod
    def straight(cls, grid: TimeGrid, x_start: float, x_end: float) -> Path:
        return cls(grid, np.linspace(x_start, x_end, grid.steps + 1))


@dataclass(frozen=True)
class MaskEvent:
    """An instantaneous screen at ``t_mask`` that only lets ``open`` through."""

    t_mask: float
    open: Region

    def __post_init__(self):
        if self.open.is_empty:
            raise NoPathError("mask has no open interval")


class Flow(NamedTuple):
    path: Path
    final: PhasePoint
    momenta: np.ndarray


def _check_finite(positions: np.ndarray) -> None:
    if not np.all(np.isfinite(positions)):
        raise InvalidPathError("path positions must be finite")


def discretized_action(path: Path, potential: Potential) -> float:
    """Midpoint-rule action ``sum dt * (v_k**2 / 2 - V(xbar_k))``."""
    x = path.positions
    _check_finite(x)
    dt = path.grid.dt
    v = np.diff(x) / dt
    mid = 0.5 * (x[1:] + x[:-1])
    return float(dt * np.sum(0.5 * v**2 - potential.value(mid)))


def action_gradient(path: Path, potential: Potential) -> np.ndarray:
    """Exact gradient of :func:`discretized_action` over the interior nodes."""
    x = path.positions
    dt = path.grid.dt
    v = np.diff(x) / dt
    dv_mid = potential.derivative(0.5 * (x[1:] + x[:-1]))
    # node j touches intervals j-1 and j
    return v[:-1] - v[1:] - 0.5 * dt * (dv_mid[:-1] + dv_mid[1:])


def hamiltonian_flow(start: PhasePoint, potential: Potential, grid: TimeGrid) -> Flow:
    """Velocity-Verlet integration of Hamilton's equations."""
    n = grid.steps
    dt = grid.dt
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    x, p = float(start.x), float(start.p)
    xs[0], ps[0] = x, p
    force = -float(potential.derivative(x))
    for k in range(1, n + 1):
        p_half = p + 0.5 * dt * force
        x = x + dt * p_half
        force = -float(potential.derivative(x))
        p = p_half + 0.5 * dt * force
        xs[k], ps[k] = x, p
    ps.flags.writeable = False
    return Flow(Path(grid, xs), PhasePoint(x, p), ps)


def energy(x, p, potential: Potential) -> np.ndarray:
    return 0.5 * np.asarray(p) ** 2 + potential.value(x)


def two_segment_action(crossing, x_final: float, t_start: float, t_mask: float, t_end: float):
    """Free action of the broken line 0 -> crossing (at t_mask) -> x_final."""
    crossing = np.asarray(crossing, dtype=float)
    first = 0.5 * crossing**2 / (t_mask - t_start)
    second = 0.5 * (x_final - crossing) ** 2 / (t_end - t_mask)
    return first + second


class MaskedSolution(NamedTuple):
    path: Path
    p_initial: float
    crossing: float


def solve_least_action_masked_free(x_final: float, grid: TimeGrid, mask: MaskEvent) -> MaskedSolution:
    """Least-action free path from the origin at ``t_start`` to ``x_final``
    that passes through ``mask.open`` at ``mask.t_mask``.

    The two-segment action is a convex parabola in the crossing point, so the
    constrained minimizer is the feasible point closest to the free one.
    """
    if mask.open.is_empty:
        raise NoPathError("mask has no open interval")
    t0, tm, t1 = grid.t_start, mask.t_mask, grid.t_end
    if not t0 < tm < t1:
        raise ValueError(f"t_mask={tm} must lie strictly inside ({t0}, {t1})")
    y_free = x_final * (tm - t0) / (t1 - t0)
    crossing = mask.open.nearest_point(y_free)
    t = grid.times
    pos = np.where(
        t <= tm,
        crossing * (t - t0) / (tm - t0),
        crossing + (x_final - crossing) * (t - tm) / (t1 - tm),
    )
    pos[0] = 0.0
    pos[-1] = x_final
    return MaskedSolution(Path(grid, pos), crossing / (tm - t0), crossing)


def _kinetic_preconditioner(n_interior: int, dt: float) -> np.ndarray:
    ab = np.empty((3, n_interior))
    ab[0, :] = -1.0 / dt
    ab[1, :] = 2.0 / dt
    ab[2, :] = -1.0 / dt
    return ab


def solve_least_action_numeric(
    x_start: float,
    x_final: float,
    potential: Potential,
    grid: TimeGrid,
    init: Path | None = None,
    *,
    tol: float = 1e-9,
    max_iter: int = 100_000,
) -> Path:
    """Minimize the discretized action over interior nodes, endpoints clamped.

    Gradient descent with Armijo backtracking.  Descent directions are taken in
    the metric of the free kinetic term (the gradient is preconditioned by the
    tridiagonal kinetic Hessian); plain Euclidean steps would need O(steps^2)
    iterations on fine grids.
    """
    if init is None:
        init = Path.straight(grid, x_start, x_final)
    if init.grid != grid:
        raise ValueError("init path must live on the requested time grid")
    if init.positions[0] != x_start or init.positions[-1] != x_final:
        raise ValueError("init path endpoints must equal the boundary values")
    if grid.steps < 2:
        return init

    x = init.positions.copy()
    dt = grid.dt
    ab = _kinetic_preconditioner(grid.steps - 1, dt)

    def action_of(interior):
        x[1:-1] = interior
        return discretized_action(Path(grid, x), potential)

    interior = x[1:-1].copy()
    s = action_of(interior)
    g = action_gradient(Path(grid, x), potential)
    gnorm = float(np.max(np.abs(g)))
    it = 0
    while gnorm >= tol:
        if it >= max_iter:
            raise ConvergenceError("least-action descent did not converge", gnorm, it)
        direction = -solve_banded((1, 1), ab, g)
        slope = float(g @ direction)
        alpha = 1.0
        accepted = False
        for _ in range(60):
            trial = interior + alpha * direction
            s_trial = action_of(trial)
            # roundoff slack: near the optimum the predicted decrease is below eps*|S|
            if s_trial <= s + 1e-4 * alpha * slope + 4 * np.finfo(float).eps * (1 + abs(s)):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise ConvergenceError("line search failed", gnorm, it)
        interior, s = trial, s_trial
        x[1:-1] = interior
        g = action_gradient(Path(grid, x), potential)
        gnorm = float(np.max(np.abs(g)))
        it += 1
    x[1:-1] = interior
    return Path(grid, x)


def initial_momentum_of(path: Path) -> float:
    x = path.positions
    return float((x[1] - x[0]) / path.grid.dt)
