"""Two-slit experiment with classical paths.

A point-like source at the origin emits at t = 0, a screen with two slits
acts at ``t_mask`` and the detector plate records positions at ``T``.  The
quantum screen pattern comes from the quantum measure with an intermediate
projector; the classical pattern from straight lines with uniformly
distributed initial momenta.  Inverting plate positions through least-action
paths gives the distribution of initial momenta each pattern implies.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .errors import DegenerateConfigError, IncompatibleHistogramsError
from .measures import RegularizedSource, SpatialGrid, final_state
from .pathcore import MaskEvent, Potential, TimeGrid, solve_least_action_masked_free
from .region import Region

PATH_STEPS = 120


class SlitSelection(enum.Enum):
    FIRST_ONLY = "first_only"
    SECOND_ONLY = "second_only"
    BOTH = "both"


@dataclass(frozen=True)
class SlitConfig:
    """Geometry and resolution of a two-slit run.

    ``mask.open`` holds exactly two intervals; the first slit is the one with
    the smaller coordinate.
    """

    source: RegularizedSource = field(default_factory=RegularizedSource)
    mask: MaskEvent = field(
        default_factory=lambda: MaskEvent(10.0, Region([(-1.125, -0.875), (0.875, 1.125)]))
    )
    T: float = 60.0
    grid: SpatialGrid = field(default_factory=lambda: SpatialGrid.symmetric(3276.8, 2**18))
    screen_bins: int = 512
    momentum_window: tuple[float, float] = (-1.0, 1.0)
    samples: int = 1_000_000
    steps: int = 16
    momentum_bins: int = 16

    def __post_init__(self):
        if not 0 < self.mask.t_mask < self.T:
            raise ValueError(f"t_mask={self.mask.t_mask} must lie in (0, T={self.T})")
        if len(self.mask.open.intervals) != 2:
            raise ValueError("a two-slit mask needs exactly two open intervals")
        if self.screen_bins < 16:
            raise ValueError(f"screen_bins must be >= 16, got {self.screen_bins}")
        if self.samples < 10_000:
            raise ValueError(f"samples must be >= 1e4, got {self.samples}")
        lo, hi = self.momentum_window
        if not lo < hi:
            raise ValueError("momentum_window must satisfy p_lo < p_hi")
        if self.momentum_bins < 1 or self.steps < 2:
            raise ValueError("momentum_bins must be >= 1 and steps >= 2")

    @classmethod
    def symmetric(
        cls,
        separation: float = 2.0,
        width: float = 0.25,
        t_mask: float = 10.0,
        **kwargs,
    ) -> SlitConfig:
        if not 0 < width < separation:
            raise ValueError(f"need 0 < width < separation, got w={width}, d={separation}")
        half_d, half_w = separation / 2, width / 2
        slits = Region([(-half_d - half_w, -half_d + half_w), (half_d - half_w, half_d + half_w)])
        return cls(mask=MaskEvent(t_mask, slits), **kwargs)

    @property
    def t_mask(self) -> float:
        return self.mask.t_mask

    @property
    def slits(self) -> tuple[Region, Region]:
        first, second = self.mask.open.intervals
        return Region([first]), Region([second])

    @property
    def separation(self) -> float:
        first, second = self.mask.open.intervals
        return 0.5 * (second[0] + second[1]) - 0.5 * (first[0] + first[1])

    def open_region(self, sel: SlitSelection) -> Region:
        first, second = self.slits
        if sel is SlitSelection.FIRST_ONLY:
            return first
        if sel is SlitSelection.SECOND_ONLY:
            return second
        return self.mask.open

    def screen_edges(self) -> np.ndarray:
        return np.linspace(self.grid.x_min, self.grid.x_max, self.screen_bins + 1)

    def momentum_edges(self, slit: int | None = None) -> np.ndarray:
        """Bins over the initial momenta that reach slit ``slit`` (or either slit)."""
        region = self.mask.open if slit is None else self.slits[slit]
        return np.linspace(region.lo / self.t_mask, region.hi / self.t_mask, self.momentum_bins + 1)

    def refined(self, factor: int = 2) -> SlitConfig:
        return replace(self, grid=self.grid.refined(factor), steps=self.steps * factor)


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_edges: np.ndarray
    weights: np.ndarray
    errors: np.ndarray | None = None

    def __post_init__(self):
        edges = np.array(self.bin_edges, dtype=float)
        w = np.array(self.weights, dtype=float)
        if edges.ndim != 1 or w.shape != (len(edges) - 1,):
            raise ValueError("need len(bin_edges) == len(weights) + 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        for arr in (edges, w):
            arr.flags.writeable = False
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "weights", w)
        if self.errors is not None:
            err = np.array(self.errors, dtype=float)
            err.flags.writeable = False
            object.__setattr__(self, "errors", err)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def normalized(self) -> np.ndarray:
        total = self.total
        if total <= 0:
            raise DegenerateConfigError("cannot normalize a histogram with zero weight")
        return self.weights / total


class ScreenHistogram(Histogram):
    """Blackening of the plate: probability per position bin."""


class MomentumHistogram(Histogram):
    """Weight per bin of initial momentum."""


@dataclass(frozen=True)
class IPReport:
    tv_distance: float
    config_a: SlitSelection
    config_b: SlitSelection
    method: str

    def __post_init__(self):
        if not -1e-15 <= self.tv_distance <= 1 + 1e-12:
            raise ValueError(f"tv_distance out of [0, 1]: {self.tv_distance}")


def _bin_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    # last bin is closed on the right, like numpy.histogram
    idx = np.searchsorted(edges, values, side="right") - 1
    idx[values == edges[-1]] = len(edges) - 2
    return idx


def screen_quantum(config: SlitConfig, sel: SlitSelection) -> ScreenHistogram:
    """Quantum plate distribution; total weight is the transmitted probability."""
    mask = MaskEvent(config.t_mask, config.open_region(sel))
    psi = final_state(Potential.free(), config.T, config.source, config.grid, config.steps, mask)
    edges = config.screen_edges()
    weights = np.histogram(config.grid.x, bins=edges, weights=psi.density * config.grid.dx)[0]
    return ScreenHistogram(edges, weights)


def _classical_counts(config: SlitConfig, seed: int, workers: int | None, count_chunk) -> np.ndarray:
    lo, hi = config.momentum_window
    # every selection reuses the same momentum draws: one prior, many acceptance events

    def chunk(gen, size):
        p = lo + (hi - lo) * gen.random(size)
        return count_chunk(p)

    parts = rng.map_chunks(chunk, config.samples, seed, workers)
    return np.sum(parts, axis=0, dtype=np.int64)


def _passes(config: SlitConfig, sel: SlitSelection, p: np.ndarray) -> np.ndarray:
    return config.open_region(sel).contains(p * config.t_mask)


def screen_classical(
    config: SlitConfig, sel: SlitSelection, seed: int = 0, workers: int | None = None
) -> ScreenHistogram:
    """Straight-line paths with uniform initial momenta, filtered by the open slits.

    Weights are counts divided by the number of samples drawn; ``errors`` are
    the binomial standard errors of those weights.
    """
    edges = config.screen_edges()
    nb = config.screen_bins

    def count(p):
        p = p[_passes(config, sel, p)]
        x_final = p * config.T
        inside = (x_final >= edges[0]) & (x_final <= edges[-1])
        return np.bincount(_bin_index(x_final[inside], edges), minlength=nb)

    counts = _classical_counts(config, seed, workers, count)
    if counts.sum() == 0:
        raise DegenerateConfigError("no classical path passed the open slits")
    n = config.samples
    w = counts / n
    return ScreenHistogram(edges, w, np.sqrt(w * (1 - w) / n))


def slit_of(config: SlitConfig, crossing: float) -> int:
    for i, (lo, hi) in enumerate(config.mask.open.intervals):
        if lo <= crossing <= hi:
            return i
    raise ValueError(f"crossing {crossing} is not inside a slit")


def invert_screen_position(config: SlitConfig, sel: SlitSelection, x_final: float):
    """Least-action path from the source to ``x_final`` through the open slits."""
    grid = TimeGrid(0.0, config.T, PATH_STEPS)
    return solve_least_action_masked_free(x_final, grid, MaskEvent(config.t_mask, config.open_region(sel)))


def induced_momentum_quantum(
    config: SlitConfig,
    sel: SlitSelection,
    condition_on: int | None = None,
    screen: ScreenHistogram | None = None,
) -> MomentumHistogram:
    """Push the quantum plate distribution forward to initial momenta.

    Each screen bin's weight goes to the initial momentum of the least-action
    path ending at the bin centre.  With ``condition_on`` set, only paths
    crossing that slit (0 = first, 1 = second) are kept.
    """
    if screen is None:
        screen = screen_quantum(config, sel)
    edges = config.momentum_edges(condition_on)
    momenta = []
    weights = []
    for x_s, w in zip(screen.centers, screen.weights):
        sol = invert_screen_position(config, sel, float(x_s))
        if condition_on is not None and slit_of(config, sol.crossing) != condition_on:
            continue
        momenta.append(sol.p_initial)
        weights.append(w)
    momenta = np.clip(np.array(momenta, dtype=float), edges[0], edges[-1])
    idx = _bin_index(momenta, edges)
    hist = np.bincount(idx, weights=np.array(weights, dtype=float), minlength=len(edges) - 1)
    return MomentumHistogram(edges, hist)


def momentum_classical(
    config: SlitConfig,
    sel: SlitSelection,
    condition_on: int | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> MomentumHistogram:
    """Initial momenta of the classical paths that pass the open slits."""
    edges = config.momentum_edges(condition_on)
    nb = len(edges) - 1
    gate = config.open_region(sel)
    if condition_on is not None:
        gate = Region(
            iv for iv in gate.intervals if iv in config.slits[condition_on].intervals
        )

    def count(p):
        p = p[gate.contains(p * config.t_mask)]
        p = np.clip(p, edges[0], edges[-1])
        return np.bincount(_bin_index(p, edges), minlength=nb)

    counts = _classical_counts(config, seed, workers, count) if not gate.is_empty else np.zeros(nb, int)
    n = config.samples
    w = counts / n
    return MomentumHistogram(edges, w, np.sqrt(w * (1 - w) / n))


def ip_statistic(
    h_a: Histogram,
    h_b: Histogram,
    *,
    config_a: SlitSelection = SlitSelection.BOTH,
    config_b: SlitSelection = SlitSelection.FIRST_ONLY,
    method: str = "quantum",
) -> IPReport:
    """Total-variation distance between two normalized histograms."""
    if h_a.bin_edges.shape != h_b.bin_edges.shape or not np.array_equal(h_a.bin_edges, h_b.bin_edges):
        raise IncompatibleHistogramsError("histograms have different bin edges")
    tv = 0.5 * float(np.sum(np.abs(h_a.normalized() - h_b.normalized())))
    return IPReport(min(max(tv, 0.0), 1.0), config_a, config_b, method)


def tv_standard_error(h_a: Histogram, h_b: Histogram, samples: int) -> float:
    """Noise scale of the TV distance between two Monte-Carlo histograms.

    Half the sum over bins of the standard error of the difference of
    normalized bin weights, treating each histogram as an independent
    multinomial sample with as many accepted draws as it holds.
    """
    total = 0.0
    var = np.zeros(len(h_a.weights))
    for h in (h_a, h_b):
        accepted = h.total * samples
        q = h.normalized()
        var = var + q * (1 - q) / max(accepted, 1.0)
        total += accepted
    return 0.5 * float(np.sum(np.sqrt(var)))


def nonadditivity(both: Histogram, first: Histogram, second: Histogram) -> float:
    """``sum |both - first - second|`` relative to the weight of ``both``."""
    diff = both.weights - first.weights - second.weights
    return float(np.sum(np.abs(diff)) / both.total)


def nonadditivity_standard_error(both: Histogram, first: Histogram, second: Histogram) -> float:
    """Upper noise scale of :func:`nonadditivity` for Monte-Carlo histograms."""
    errs = [h.errors if h.errors is not None else np.zeros_like(h.weights) for h in (both, first, second)]
    per_bin = np.sqrt(errs[0] ** 2 + errs[1] ** 2 + errs[2] ** 2)
    return float(np.sum(per_bin) / both.total)


def far_field_fringe_spacing(config: SlitConfig) -> float:
    return 2 * np.pi * (config.T - config.t_mask) / config.separation


def single_slit_first_zero(config: SlitConfig) -> float:
    """Distance from the pattern centre to the first zero of one slit's envelope."""
    lo, hi = config.slits[0].intervals[0]
    return 2 * np.pi * (config.T - config.t_mask) / (hi - lo)


def smooth(weights: np.ndarray, width: int = 3) -> np.ndarray:
    if width <= 1:
        return np.asarray(weights, dtype=float)
    kernel = np.ones(width) / width
    return np.convolve(weights, kernel, mode="same")


def local_maxima(weights: np.ndarray, rel_floor: float = 0.0) -> np.ndarray:
    """Indices of strict interior local maxima above ``rel_floor * max``."""
    w = np.asarray(weights, dtype=float)
    if len(w) < 3:
        return np.array([], dtype=int)
    inner = (w[1:-1] > w[:-2]) & (w[1:-1] > w[2:]) & (w[1:-1] > rel_floor * w.max())
    return np.nonzero(inner)[0] + 1


def peak_positions(hist: Histogram, rel_floor: float = 0.05, window: float | None = None) -> np.ndarray:
    """Local maxima refined by a parabola through each peak bin and its neighbours."""
    w = hist.weights
    c = hist.centers
    width = hist.bin_edges[1] - hist.bin_edges[0]
    out = []
    for i in local_maxima(w, rel_floor):
        denom = w[i - 1] - 2 * w[i] + w[i + 1]
        offset = 0.5 * (w[i - 1] - w[i + 1]) / denom if denom != 0 else 0.0
        out.append(c[i] + offset * width)
    out = np.array(out)
    if window is not None:
        out = out[np.abs(out) <= window]
    return out


def measure_fringe_spacing(hist: Histogram, window: float) -> float:
    """Least-squares slope of peak position against peak order within ``|x| <= window``."""
    peaks = np.sort(peak_positions(hist, window=window))
    if len(peaks) < 3:
        raise ValueError(f"only {len(peaks)} fringes inside |x| <= {window}")
    order = np.arange(len(peaks))
    return float(np.polyfit(order, peaks, 1)[0])


@dataclass(frozen=True)
class IPResult:
    quantum: IPReport
    classical: IPReport
    classical_se: float
    quantum_hists: tuple[MomentumHistogram, MomentumHistogram]
    classical_hists: tuple[MomentumHistogram, MomentumHistogram]


def ip_violation(
    config: SlitConfig,
    seed: int = 0,
    slit: int = 0,
    workers: int | None = None,
    screens: dict | None = None,
) -> IPResult:
    """Compare initial momenta of paths through ``slit`` with the other slit open vs closed."""
    alone = SlitSelection.FIRST_ONLY if slit == 0 else SlitSelection.SECOND_ONLY
    both = SlitSelection.BOTH
    screens = screens or {}
    q_both = induced_momentum_quantum(config, both, slit, screens.get(both))
    q_alone = induced_momentum_quantum(config, alone, slit, screens.get(alone))
    c_both = momentum_classical(config, both, slit, seed, workers)
    c_alone = momentum_classical(config, alone, slit, seed, workers)
    return IPResult(
        quantum=ip_statistic(q_both, q_alone, config_a=both, config_b=alone, method="quantum"),
        classical=ip_statistic(c_both, c_alone, config_a=both, config_b=alone, method="classical"),
        classical_se=tv_standard_error(c_both, c_alone, config.samples),
        quantum_hists=(q_both, q_alone),
        classical_hists=(c_both, c_alone),
    )
