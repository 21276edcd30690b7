"""Finite unions of disjoint real intervals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Region:
    """Sorted, pairwise disjoint half-open intervals ``[lo, hi)``.

    Membership of a point follows the projector convention ``lo <= x < hi``.
    """

    intervals: tuple[tuple[float, float], ...]

    def __init__(self, intervals: Iterable[Sequence[float]] = ()):
        ivs = tuple(sorted((float(lo), float(hi)) for lo, hi in intervals))
        for lo, hi in ivs:
            if not lo < hi:
                raise ValueError(f"interval ({lo}, {hi}) must satisfy lo < hi")
        for (_, hi0), (lo1, _) in zip(ivs, ivs[1:]):
            if lo1 < hi0:
                raise ValueError(f"intervals overlap at {lo1} < {hi0}")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def empty(cls) -> Region:
        return cls(())

    @classmethod
    def interval(cls, lo: float, hi: float) -> Region:
        return cls([(lo, hi)])

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def length(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    @property
    def lo(self) -> float:
        return self.intervals[0][0]

    @property
    def hi(self) -> float:
        return self.intervals[-1][1]

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        mask = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            mask |= (x >= lo) & (x < hi)
        return mask

    def union(self, other: Region) -> Region:
        return Region(self.intervals + other.intervals)

    def is_disjoint(self, other: Region) -> bool:
        try:
            self.union(other)
        except ValueError:
            return False
        return True

    def shifted(self, offset: float) -> Region:
        return Region((lo + offset, hi + offset) for lo, hi in self.intervals)

    def nearest_point(self, y: float) -> float:
        """Closest point of the closure to ``y``; ties go to the smaller coordinate."""
        if self.is_empty:
            raise ValueError("empty region has no nearest point")
        best = None
        best_dist = np.inf
        for lo, hi in self.intervals:
            if lo <= y <= hi:
                return float(y)
            for edge in (lo, hi):
                dist = abs(edge - y)
                # intervals are sorted, so strict < keeps the smaller edge on ties
                if dist < best_dist:
                    best, best_dist = edge, dist
        return float(best)

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]
