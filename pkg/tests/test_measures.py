import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pathmeasure.errors import BoundaryLeakError
from pathmeasure.measures import (
    GridWavefunction,
    MeasureReport,
    RegularizedSource,
    SpatialGrid,
    apply_projector,
    evolve,
    final_state,
    induced_path_weight,
    interference_defect,
    quantum_measure,
    quantum_measures,
    region_mass,
)
from pathmeasure.pathcore import MaskEvent, Potential
from pathmeasure.region import Region

GRID = SpatialGrid.symmetric(40.0, 1024)
SOURCE = RegularizedSource(sigma0=1.0)
FREE = Potential.free()
WIDE = SpatialGrid.symmetric(160.0, 4096)


def random_state(seed):
    gen = np.random.default_rng(seed)
    a = gen.normal(size=GRID.n) + 1j * gen.normal(size=GRID.n)
    a *= np.exp(-(GRID.x**2) / 200)
    return GridWavefunction(GRID, a / np.sqrt(np.sum(np.abs(a) ** 2) * GRID.dx))


def region_on_grid():
    cuts = st.lists(st.integers(-3900, 3900), min_size=2, max_size=6, unique=True)
    return cuts.map(lambda c: Region((lo / 100, hi / 100) for lo, hi in zip(sorted(c)[0::2], sorted(c)[1::2])))


def test_grid_validation():
    for n in (63, 100, 32):
        with pytest.raises(ValueError):
            SpatialGrid(-1, 1, n)
    with pytest.raises(ValueError):
        SpatialGrid(1, -1, 64)


def test_grid_is_mirror_symmetric():
    x = GRID.x
    assert np.array_equal(x, -x[::-1])


def test_source_resolution_check():
    with pytest.raises(ValueError):
        RegularizedSource(sigma0=0.05).sample(SpatialGrid.symmetric(10, 128))
    assert RegularizedSource(sigma0=0.05).sample(SpatialGrid.symmetric(3.2, 256)).norm2 == pytest.approx(1, abs=1e-14)


def test_measure_report_bounds():
    r = Region.interval(0, 1)
    with pytest.raises(ValueError):
        MeasureReport(-0.1, "quantum", r)
    with pytest.raises(ValueError):
        MeasureReport(1.1, "quantum", r)
    with pytest.raises(ValueError):
        MeasureReport(0.5, "other", r)
    assert MeasureReport(7.0, "classical", r).value == 7.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), region=region_on_grid())
def test_projector_idempotent_and_complementary(seed, region):
    psi = random_state(seed)
    once = apply_projector(psi, region)
    assert np.array_equal(apply_projector(once, region).amplitudes, once.amplitudes)
    rest = Region.interval(GRID.x_min, GRID.x_max)
    pieces = [(lo, hi) for lo, hi in zip([GRID.x_min] + [h for _, h in region.intervals],
                                         [l for l, _ in region.intervals] + [GRID.x_max]) if hi > lo]
    complement = apply_projector(psi, Region(pieces))
    assert np.allclose(once.amplitudes + complement.amplitudes, psi.amplitudes, atol=0)
    assert abs(once.inner(complement)) < 1e-15
    assert region_mass(psi, region) + region_mass(psi, Region(pieces)) == pytest.approx(psi.norm2, abs=1e-12)
    assert region_mass(psi, rest) == pytest.approx(psi.norm2, abs=1e-12)


def test_projector_requires_overlap():
    with pytest.raises(ValueError):
        apply_projector(random_state(0), Region.interval(100, 200))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10**6), duration=st.floats(0.1, 5.0))
def test_evolution_unitary_and_reversible(seed, duration):
    psi = random_state(seed)
    pot = Potential.harmonic(0.1)
    fwd = evolve(psi, pot, duration, 50, leak_threshold=1.0)
    assert fwd.norm2 == pytest.approx(psi.norm2, abs=1e-12)
    back = evolve(fwd, pot, -duration, 50, leak_threshold=1.0)
    assert back.distance(psi) < 1e-12


def test_free_spreading_matches_analytic():
    psi = evolve(SOURCE.sample(GRID), FREE, 5.0, 10)
    exact = SOURCE.free_amplitude(GRID.x, 5.0)
    assert np.sqrt(np.sum(np.abs(psi.amplitudes - exact) ** 2) * GRID.dx) < 1e-6


def test_sigma_at():
    psi = evolve(SOURCE.sample(GRID), FREE, 6.0, 1)
    var = np.sum(GRID.x**2 * psi.density) * GRID.dx
    assert np.sqrt(var) == pytest.approx(SOURCE.sigma_at(6.0), rel=1e-9)


def test_harmonic_revival():
    src = RegularizedSource(center=2.0, sigma0=0.5)
    psi0 = src.sample(GRID)
    psi = evolve(psi0, Potential.harmonic(1.0), 2 * np.pi, 4000)
    # a full period returns the state up to the global phase exp(-i pi)
    assert abs(abs(psi.inner(psi0)) - 1) < 1e-6


def test_leak_detected():
    with pytest.raises(BoundaryLeakError) as info:
        evolve(SOURCE.sample(GRID), FREE, 200.0, 20)
    assert info.value.edge_mass > 1e-6


def test_evolve_argument_checks():
    psi = SOURCE.sample(GRID)
    with pytest.raises(ValueError):
        evolve(psi, FREE, 0.0, 10)
    with pytest.raises(ValueError):
        evolve(psi, FREE, 1.0, 0)


@settings(max_examples=20, deadline=None)
@given(a=region_on_grid(), shift=st.floats(-5, 5))
def test_quantum_measure_bounded(a, shift):
    r = a.shifted(shift)
    m = quantum_measure(r, FREE, 2.0, SOURCE, GRID, 4).value
    assert 0 <= m <= 1 + 1e-9


def test_quantum_measure_matches_erf_oracle():
    from scipy.special import erf

    T = 4.0
    s = SOURCE.sigma_at(T)
    r = Region([(-1.0, 0.5), (2.0, 3.0)])
    exact = sum(0.5 * (erf(hi / (np.sqrt(2) * s)) - erf(lo / (np.sqrt(2) * s))) for lo, hi in r.intervals)
    fine = SpatialGrid.symmetric(40.0, 16384)
    assert quantum_measure(r, FREE, T, SOURCE, fine, 1).value == pytest.approx(exact, abs=2e-3)


def test_quantum_measures_share_propagation():
    regions = [Region.interval(-1, 0), Region.interval(0, 1)]
    batch = quantum_measures(regions, FREE, 2.0, SOURCE, GRID, 4)
    singles = [quantum_measure(r, FREE, 2.0, SOURCE, GRID, 4) for r in regions]
    assert [b.value for b in batch] == [s.value for s in singles]


def test_induced_path_weight_equals_endpoint_measure():
    r = Region.interval(0.5, 2.0)
    assert induced_path_weight(r, FREE, 3.0, SOURCE, GRID, 3) == quantum_measure(r, FREE, 3.0, SOURCE, GRID, 3).value


def test_mask_time_validated():
    with pytest.raises(ValueError):
        final_state(FREE, 2.0, SOURCE, GRID, 4, MaskEvent(3.0, Region.interval(0, 1)))


def test_full_domain_defect_vanishes():
    slits = Region([(-2.0, -1.0), (1.0, 2.0)])
    a, b = Region.interval(-2.0, -1.0), Region.interval(1.0, 2.0)
    d = interference_defect(
        WIDE.full_region, MaskEvent(1.0, slits), MaskEvent(1.0, a), MaskEvent(1.0, b), FREE, 1.5, SOURCE, WIDE, 30
    )
    assert abs(d) < 1e-9


def test_defect_nonzero_on_subregion():
    slits = Region([(-2.0, -1.0), (1.0, 2.0)])
    a, b = Region.interval(-2.0, -1.0), Region.interval(1.0, 2.0)
    d = interference_defect(
        Region.interval(-0.5, 0.5), MaskEvent(1.0, slits), MaskEvent(1.0, a), MaskEvent(1.0, b),
        FREE, 1.5, SOURCE, WIDE, 30,
    )
    assert abs(d) > 1e-4


def test_defect_rejects_non_partition():
    a, b = Region.interval(0, 1), Region.interval(0.5, 2)
    with pytest.raises(ValueError):
        interference_defect(
            GRID.full_region, MaskEvent(1.0, Region.interval(0, 2)), MaskEvent(1.0, a), MaskEvent(1.0, b),
            FREE, 1.5, SOURCE, WIDE, 30,
        )


def test_far_field_matches_point_source():
    src = RegularizedSource(sigma0=0.05)
    grid = SpatialGrid.symmetric(3276.8, 2**18)
    T = 60.0
    psi = evolve(src.sample(grid), FREE, T, 1)
    point_source = abs(np.sum(src.sample(grid).amplitudes) * grid.dx) ** 2 / (2 * np.pi * T)
    rho = psi.density
    centre = rho[grid.n // 2]
    assert centre == pytest.approx(point_source, rel=1e-4)
    # flat over the image |x| <= p_c T of the unit momentum window
    window = np.abs(grid.x) <= 1.0 * T
    assert rho[window].min() / rho[window].max() > np.exp(-2 * src.sigma0**2) - 1e-6


def test_quantum_measure_converges_under_refinement():
    grid = SpatialGrid.symmetric(50.0, 4096)
    src = RegularizedSource(sigma0=0.05)
    slits = Region([(-1.125, -0.875), (0.875, 1.125)])
    harmonic = Potential.harmonic(1.0)
    coarse = quantum_measure(slits, harmonic, 10.0, src, grid, 5000).value
    fine = quantum_measure(slits, harmonic, 10.0, src, grid.refined(), 10_000).value
    assert abs(fine - coarse) < 1e-4
