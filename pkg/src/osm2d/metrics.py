"""Quantitative evaluation of indicator maps.

Scoring follows the thresholded intersection-over-union convention: a
normalized map is binarized at a threshold and compared against the true
object region (cell centers inside a scatterer disk).  Peak extraction uses
a plain height cut plus greedy separation filtering, with the half-wavelength
resolution limit as the natural separation scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (DegenerateMapError, InvalidInputError, PeakCountError)
from .forward import Scene
from .geometry import Frequency, Medium, wavelength
from .imaging import ImagingGrid, IndicatorMap

#: Thresholds used for sweep plots: 0.01, 0.02, ..., 0.99.
DEFAULT_THRESHOLDS = tuple(np.round(np.arange(0.01, 1.0, 0.01), 2))

#: Default height cut for peak extraction (fraction of the global maximum).
DEFAULT_PROMINENCE = 0.5


@dataclass(frozen=True)
class TruthMask:
    """Boolean ground-truth region on a grid (cell center inside a disk)."""

    grid: ImagingGrid
    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))
        if self.mask.shape != (self.grid.ny, self.grid.nx):
            raise InvalidInputError("mask shape does not match grid")


@dataclass(frozen=True)
class PeakSet:
    """Extracted peaks sorted by value descending.

    ``peaks`` is a tuple of ``(location, value)`` with locations as (x, y)
    arrays; accepted peaks are pairwise at least ``min_separation`` apart.
    """

    peaks: tuple
    min_separation: float
    min_prominence: float

    def __len__(self):
        return len(self.peaks)

    def locations(self) -> np.ndarray:
        if not self.peaks:
            return np.zeros((0, 2))
        return np.asarray([p for p, _ in self.peaks])


def truth_mask(scene: Scene, grid: ImagingGrid) -> TruthMask:
    """Cells whose centers lie inside some scatterer disk."""
    pts = grid.points()
    inside = np.zeros(len(pts), dtype=bool)
    for s in scene.scatterers:
        d = np.hypot(pts[:, 0] - s.center[0], pts[:, 1] - s.center[1])
        inside |= d <= s.radius
    return TruthMask(grid=grid, mask=inside.reshape(grid.ny, grid.nx))


def _check_normalized(imap: IndicatorMap) -> None:
    peak = float(imap.values.max())
    if not math.isclose(peak, 1.0, rel_tol=1e-9):
        raise InvalidInputError(
            f"map must be normalized to max 1 (got max {peak}); apply imaging.normalize")


def jaccard(imap: IndicatorMap, truth: TruthMask, threshold: float) -> float:
    """Intersection over union of ``{values >= threshold}`` and the truth."""
    if not 0.0 < threshold < 1.0:
        raise InvalidInputError("threshold must be in (0, 1)")
    if imap.grid != truth.grid:
        raise InvalidInputError("map and truth grids differ")
    if float(imap.values.max()) == 0.0 and not truth.mask.any():
        raise DegenerateMapError("jaccard undefined: blank map and blank truth")
    _check_normalized(imap)
    above = imap.values >= threshold
    union = int(np.logical_or(above, truth.mask).sum())
    return int(np.logical_and(above, truth.mask).sum()) / union


def jaccard_sweep(imap: IndicatorMap, truth: TruthMask, thresholds=DEFAULT_THRESHOLDS):
    """Jaccard index at each threshold, in input order."""
    return [(float(t), jaccard(imap, truth, float(t))) for t in thresholds]


def find_peaks(imap: IndicatorMap, min_separation: float,
               min_prominence: float = DEFAULT_PROMINENCE) -> PeakSet:
    """Local maxima above a height cut, greedily separation-filtered.

    A cell is a candidate when its value is >= all 8 neighbors and >=
    ``min_prominence``.  Candidates are visited in descending value (ties
    broken row-major) and accepted when at least ``min_separation`` from
    every previously accepted peak, so the result is deterministic.  An
    all-zero map yields an empty set.
    """
    if min_separation < 0:
        raise InvalidInputError("min_separation must be >= 0")
    if float(imap.values.max()) == 0.0:
        return PeakSet(peaks=(), min_separation=min_separation,
                       min_prominence=min_prominence)
    _check_normalized(imap)
    v = imap.values
    padded = np.full((v.shape[0] + 2, v.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = v
    is_max = np.ones_like(v, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = padded[1 + di:padded.shape[0] - 1 + di,
                             1 + dj:padded.shape[1] - 1 + dj]
            is_max &= v >= shifted
    is_max &= v >= min_prominence

    xs, ys = imap.grid.xs(), imap.grid.ys()
    order = [(float(-v[i, j]), i, j) for i, j in zip(*np.nonzero(is_max))]
    order.sort()
    accepted = []
    for neg, i, j in order:
        loc = np.array([xs[j], ys[i]])
        if all(np.hypot(*(loc - q)) >= min_separation for q, _ in accepted):
            accepted.append((loc, -neg))
    return PeakSet(peaks=tuple(accepted), min_separation=min_separation,
                   min_prominence=min_prominence)


def resolvable(r1, r2, freq: Frequency, medium: Medium) -> bool:
    """Half-wavelength resolution predicate ``|r1 - r2| > lambda / 2``."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    return float(np.hypot(*(r1 - r2))) > wavelength(freq, medium) / 2.0


def localization_error(peaks: PeakSet, scene: Scene) -> float:
    """Mean peak-to-center distance under the optimal assignment, m."""
    centers = np.asarray([s.center for s in scene.scatterers])
    if len(peaks) != len(centers):
        raise PeakCountError(
            f"peak count {len(peaks)} != scatterer count {len(centers)}")
    locs = peaks.locations()
    cost = np.hypot(locs[:, None, 0] - centers[None, :, 0],
                    locs[:, None, 1] - centers[None, :, 1])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())
