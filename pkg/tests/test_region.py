import numpy as np
import pytest
from hypothesis import given, strategies as st

from pathmeasure.measures import classical_measure
from pathmeasure.region import Region


def regions(max_intervals=4):
    cuts = st.lists(st.integers(-10_000, 10_000), min_size=0, max_size=2 * max_intervals, unique=True)
    return cuts.map(lambda c: Region((lo / 100, hi / 100) for lo, hi in zip(sorted(c)[0::2], sorted(c)[1::2])))


def test_rejects_overlap_and_reversed():
    with pytest.raises(ValueError):
        Region([(0, 2), (1, 3)])
    with pytest.raises(ValueError):
        Region([(1, 1)])


def test_touching_intervals_are_disjoint():
    a, b = Region.interval(0, 1), Region.interval(1, 2)
    assert a.is_disjoint(b)
    assert not a.is_disjoint(Region.interval(0.5, 3))


def test_half_open_membership():
    r = Region([(0, 1)])
    assert list(r.contains([-1e-12, 0, 0.5, 1 - 1e-12, 1])) == [False, True, True, True, False]


def test_nearest_point():
    r = Region([(-3, -1), (1, 3)])
    assert r.nearest_point(0.0) == -1.0
    assert r.nearest_point(0.2) == 1.0
    assert r.nearest_point(2.0) == 2.0
    assert r.nearest_point(9.0) == 3.0
    with pytest.raises(ValueError):
        Region.empty().nearest_point(0)


@given(a=regions(), b=regions())
def test_classical_measure_additive(a, b):
    if not a.is_disjoint(b):
        return
    total = classical_measure(a.union(b)).value
    assert total == pytest.approx(classical_measure(a).value + classical_measure(b).value, abs=1e-9)


@given(r=regions(), shift=st.floats(-50, 50))
def test_classical_measure_translation_invariant(r, shift):
    assert classical_measure(r.shifted(shift)).value == pytest.approx(classical_measure(r).value, abs=1e-9)


def test_classical_measure_empty():
    assert classical_measure(Region.empty()).value == 0


@given(r=regions(), y=st.floats(-200, 200))
def test_nearest_point_is_nearest(r, y):
    if r.is_empty:
        return
    p = r.nearest_point(y)
    edges = np.array([e for iv in r.intervals for e in iv])
    inside = r.contains(y) or np.any(edges == y)
    assert abs(p - y) <= (0 if inside else np.min(np.abs(edges - y))) + 1e-12
