import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from pathmeasure.errors import DegenerateConfigError, IncompatibleHistogramsError
from pathmeasure.twoslit import (
    Histogram,
    MomentumHistogram,
    SlitConfig,
    SlitSelection,
    invert_screen_position,
    ip_statistic,
    local_maxima,
    momentum_classical,
    nonadditivity,
    screen_classical,
    slit_of,
    smooth,
)

BOTH, FIRST, SECOND = SlitSelection.BOTH, SlitSelection.FIRST_ONLY, SlitSelection.SECOND_ONLY


def test_config_validation():
    with pytest.raises(ValueError):
        SlitConfig.symmetric(t_mask=70.0)
    with pytest.raises(ValueError):
        SlitConfig.symmetric(separation=0.2, width=0.25)
    with pytest.raises(ValueError):
        SlitConfig(samples=100)
    with pytest.raises(ValueError):
        SlitConfig(momentum_window=(1.0, -1.0))


def test_default_geometry(default_config):
    first, second = default_config.slits
    assert first.intervals == ((-1.125, -0.875),)
    assert second.intervals == ((0.875, 1.125),)
    assert default_config.separation == 2.0
    assert default_config.open_region(BOTH) == first.union(second)


def test_histogram_validation():
    with pytest.raises(ValueError):
        Histogram([0, 1, 2], [1.0])
    with pytest.raises(ValueError):
        Histogram([0, 2, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        Histogram([0, 1], [-1.0])
    with pytest.raises(DegenerateConfigError):
        Histogram([0, 1], [0.0]).normalized()


@settings(max_examples=50)
@given(w=st.lists(st.floats(0.01, 10), min_size=2, max_size=20))
def test_ip_statistic_properties(w):
    edges = np.arange(len(w) + 1, dtype=float)
    h = MomentumHistogram(edges, w)
    assert ip_statistic(h, h).tv_distance == 0
    g = MomentumHistogram(edges, w[::-1])
    tv = ip_statistic(h, g).tv_distance
    assert 0 <= tv <= 1
    assert tv == pytest.approx(ip_statistic(g, h).tv_distance, abs=1e-15)


def test_ip_statistic_disjoint_support():
    edges = [0.0, 1.0, 2.0]
    assert ip_statistic(Histogram(edges, [1, 0]), Histogram(edges, [0, 3])).tv_distance == 1.0


def test_ip_statistic_rejects_mismatched_bins():
    with pytest.raises(IncompatibleHistogramsError):
        ip_statistic(Histogram([0, 1, 2], [1, 1]), Histogram([0, 1, 3], [1, 1]))


def test_local_maxima_and_smooth():
    w = np.array([0, 1, 0, 2, 2, 0, 3, 0])
    assert list(local_maxima(w)) == [1, 6]
    assert list(local_maxima(w, rel_floor=0.5)) == [6]
    assert np.allclose(smooth(np.ones(10))[1:-1], 1)


def test_inversion_picks_lower_slit_on_tie(default_config):
    sol = invert_screen_position(default_config, BOTH, 0.0)
    assert sol.crossing == -0.875
    assert slit_of(default_config, sol.crossing) == 0


def test_inversion_through_slit(default_config):
    sol = invert_screen_position(default_config, BOTH, 6.0)
    assert sol.crossing == pytest.approx(1.0)
    assert sol.p_initial == pytest.approx(0.1)
    with pytest.raises(ValueError):
        slit_of(default_config, 0.0)


def test_quantum_screen_mirror_symmetry(quantum_screens):
    both = quantum_screens[BOTH].weights
    assert np.max(np.abs(both - both[::-1])) <= 1e-6 * both.max()
    first, second = quantum_screens[FIRST].weights, quantum_screens[SECOND].weights
    assert np.max(np.abs(first - second[::-1])) <= 1e-6 * first.max()


def test_first_slit_transmission_matches_free_amplitude(default_config, quantum_screens):
    src = default_config.source
    lo, hi = default_config.slits[0].intervals[0]
    exact, _ = quad(lambda x: abs(src.free_amplitude(x, default_config.t_mask)) ** 2, lo, hi, epsabs=1e-14)
    assert quantum_screens[FIRST].total == pytest.approx(exact, rel=1e-3)


def test_classical_screen_acceptance_rate(default_config, classical_screens):
    # each slit admits momenta of width w / t_mask out of a window of width 2
    expected = 0.25 / default_config.t_mask / 2.0
    h = classical_screens[FIRST]
    se = np.sqrt(expected * (1 - expected) / default_config.samples)
    assert abs(h.total - expected) < 4 * se


def test_classical_screen_is_additive(classical_screens):
    both, first, second = (classical_screens[s] for s in (BOTH, FIRST, SECOND))
    assert nonadditivity(both, first, second) == 0.0


def test_classical_screen_worker_invariant(default_config):
    one = screen_classical(default_config, BOTH, seed=3, workers=1)
    four = screen_classical(default_config, BOTH, seed=3, workers=4)
    assert np.array_equal(one.weights, four.weights)
    other = screen_classical(default_config, BOTH, seed=4, workers=1)
    assert not np.array_equal(one.weights, other.weights)


def test_classical_momentum_conditioning(default_config):
    h_both = momentum_classical(default_config, BOTH, condition_on=0, seed=5)
    h_first = momentum_classical(default_config, FIRST, condition_on=0, seed=5)
    assert np.array_equal(h_both.weights, h_first.weights)
    h_second = momentum_classical(default_config, SECOND, condition_on=0, seed=5)
    assert h_second.total == 0


def test_dark_fringe_interference_defect(default_config, quantum_screens):
    both, first, second = (quantum_screens[s] for s in (BOTH, FIRST, SECOND))
    centers = both.centers
    # first dark fringe sits half a fringe spacing from the centre
    dark = int(np.argmin(np.abs(centers - 0.5 * 2 * np.pi * (default_config.T - default_config.t_mask) / 2.0)))
    separate = first.weights[dark] + second.weights[dark]
    assert both.weights[dark] < 0.2 * separate
    assert both.weights[dark] - separate < 0


def test_full_screen_defect_vanishes(quantum_screens):
    both, first, second = (quantum_screens[s] for s in (BOTH, FIRST, SECOND))
    assert abs(both.total - first.total - second.total) < 1e-9
