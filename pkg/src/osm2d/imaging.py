"""Indicator maps: single-source, summed, multi-source, and analytic forms.

Data-driven maps correlate the measurement rows against the background
Green's function at each trial point:

* ``phi_map``   -- complex inner product ``Phi(r', a_m) = sum_n u_scat(b_n; a_m) conj(G(b_n, r'))``
* ``osm_map``   -- ``|Phi|`` for one source
* ``osmm_map``  -- sum of ``osm_map`` over all sources
* ``mosm_map``  -- ``|sum_m Phi(r', a_m) conj(G(r', a_m))|``

Analytic maps evaluate the closed-form structures these converge to for
point-collapsed scenes (large receiver count for the single-source map,
large emitter count for the multi-source map), built from ``J_0`` plus the
series factors in :mod:`osm2d.specfun`.  They are the oracles for the
data-driven maps and involve no measurement data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateMapError, InvalidInputError
from .forward import MeasurementSet, Scene, green
from .geometry import (ArrayGeometry, Frequency, Medium, emitter_angle,
                       emitter_position, receiver_positions, wavenumber)
from .specfun import (SeriesTruncation, bessel_j, default_truncation,
                      disturb_factor_E, multi_factor_M)


@dataclass(frozen=True)
class ImagingGrid:
    """Uniform cell-centered sampling lattice over a rectangle.

    Sample points are cell centers: ``x_i = x_min + (i + 1/2) dx`` with
    ``dx = (x_max - x_min) / nx``, and likewise in y.  ``values[iy, ix]``
    conventions throughout the package follow y ascending with row index.
    """

    x_min: float = -0.1
    x_max: float = 0.1
    y_min: float = -0.1
    y_max: float = 0.1
    nx: int = 64
    ny: int = 64

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InvalidInputError("grid extents must satisfy max > min")
        if self.nx < 2 or self.ny < 2:
            raise InvalidInputError("nx and ny must be >= 2")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def cell_diagonal(self) -> float:
        return math.hypot(self.dx, self.dy)

    def xs(self) -> np.ndarray:
        return self.x_min + self.dx * (np.arange(self.nx) + 0.5)

    def ys(self) -> np.ndarray:
        return self.y_min + self.dy * (np.arange(self.ny) + 0.5)

    def points(self) -> np.ndarray:
        """All cell centers, shape (ny * nx, 2), row-major in (iy, ix)."""
        X, Y = np.meshgrid(self.xs(), self.ys())
        return np.stack([X.ravel(), Y.ravel()], axis=-1)


@dataclass(frozen=True)
class ComplexFieldMap:
    """Pre-modulus inner product ``Phi`` for one source over a grid."""

    grid: ImagingGrid
    values: np.ndarray
    source: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.values.shape != (self.grid.ny, self.grid.nx):
            raise InvalidInputError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("values must be finite")


@dataclass(frozen=True)
class IndicatorMap:
    """Non-negative indicator over a grid with provenance.

    ``kind`` is one of ``osm``, ``osmm``, ``mosm``, ``analytic-single``,
    ``analytic-multi``; ``source`` is the 1-based emitter index for the
    per-source kinds, None otherwise.
    """

    grid: ImagingGrid
    values: np.ndarray
    kind: str
    freq: Frequency
    source: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.shape != (self.grid.ny, self.grid.nx):
            raise InvalidInputError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InvalidInputError("indicator values must be finite and >= 0")

    def label(self) -> str:
        return self.kind if self.source is None else f"{self.kind}(m={self.source})"


def phi_map(ms: MeasurementSet, m: int, grid: ImagingGrid,
            medium: Medium | None = None) -> ComplexFieldMap:
    """Complex correlation of row ``m`` with the receiver-side test vector.

    The test vector is the exact background Green's function sampled at the
    receivers of emitter ``m`` (free space unless ``medium`` overrides it).
    """
    if not 1 <= m <= ms.geometry.num_emitters:
        raise InvalidInputError(
            f"source index m={m} out of range [1, {ms.geometry.num_emitters}]")
    k = wavenumber(ms.freq, medium if medium is not None else Medium())
    pts = grid.points()
    receivers = receiver_positions(ms.geometry, m)
    g = green(pts[:, None, :], receivers[None, :, :], k)   # (P, N)
    phi = g.conj() @ ms.data[m - 1]
    return ComplexFieldMap(grid=grid, values=phi.reshape(grid.ny, grid.nx), source=m)


def osm_map(ms: MeasurementSet, m: int, grid: ImagingGrid,
            medium: Medium | None = None) -> IndicatorMap:
    """Single-source indicator ``|Phi(r', a_m)|``."""
    phi = phi_map(ms, m, grid, medium)
    return IndicatorMap(grid=grid, values=np.abs(phi.values), kind="osm",
                        freq=ms.freq, source=m)


def osmm_map(ms: MeasurementSet, grid: ImagingGrid,
             medium: Medium | None = None) -> IndicatorMap:
    """Sum of the single-source indicators over every emitter."""
    total = np.zeros((grid.ny, grid.nx))
    for m in range(1, ms.geometry.num_emitters + 1):
        total += np.abs(phi_map(ms, m, grid, medium).values)
    return IndicatorMap(grid=grid, values=total, kind="osmm", freq=ms.freq)


def mosm_map(ms: MeasurementSet, grid: ImagingGrid,
             medium: Medium | None = None) -> IndicatorMap:
    """Multi-source indicator ``|sum_m Phi(r', a_m) conj(G(r', a_m))|``."""
    k = wavenumber(ms.freq, medium if medium is not None else Medium())
    pts = grid.points()
    acc = np.zeros(len(pts), dtype=complex)
    for m in range(1, ms.geometry.num_emitters + 1):
        phi = phi_map(ms, m, grid, medium).values.ravel()
        g_emit = green(pts, emitter_position(ms.geometry, m)[None, :], k)
        acc += phi * g_emit.conj()
    return IndicatorMap(grid=grid, values=np.abs(acc).reshape(grid.ny, grid.nx),
                        kind="mosm", freq=ms.freq)


def _series_trunc(k: float, grid: ImagingGrid, scene: Scene,
                  trunc: SeriesTruncation | None) -> SeriesTruncation:
    if trunc is not None:
        return trunc
    corners = np.array([[grid.x_min, grid.y_min], [grid.x_min, grid.y_max],
                        [grid.x_max, grid.y_min], [grid.x_max, grid.y_max]])
    dist_max = max(
        float(np.hypot(corners[:, 0] - s.center[0], corners[:, 1] - s.center[1]).max())
        for s in scene.scatterers)
    return default_truncation(k, dist_max)


def analytic_single_map(scene: Scene, geom: ArrayGeometry, m: int, freq: Frequency,
                        grid: ImagingGrid,
                        trunc: SeriesTruncation | None = None) -> IndicatorMap:
    """Closed-form single-source structure for a point-collapsed scene.

    ``(k/(6|b|)) | sum_s area_s contrast_s G(r_s, a_m)
    [J_0(k|r'-r_s|) + (3/pi) E(r', r_s, a_m)] |``
    """
    k = wavenumber(freq, scene.medium)
    trunc = _series_trunc(k, grid, scene, trunc)
    pts = grid.points()
    a_m = emitter_position(geom, m)
    theta_m = emitter_angle(geom, m)
    acc = np.zeros(len(pts), dtype=complex)
    for s in scene.scatterers:
        offset = pts - np.asarray(s.center)
        dist = np.hypot(offset[:, 0], offset[:, 1])
        phi_ang = np.arctan2(offset[:, 1], offset[:, 0])
        e_term = disturb_factor_E(dist, k, theta_m, phi_ang, trunc)
        g_emit = green(np.asarray(s.center), a_m, k)
        acc += s.area * scene.contrast(s) * g_emit \
            * (bessel_j(0, k * dist) + (3.0 / math.pi) * e_term)
    values = np.abs(k / (6.0 * geom.receiver_radius) * acc)
    return IndicatorMap(grid=grid, values=values.reshape(grid.ny, grid.nx),
                        kind="analytic-single", freq=freq, source=m)


def analytic_multi_map(scene: Scene, geom: ArrayGeometry, freq: Frequency,
                       grid: ImagingGrid,
                       trunc: SeriesTruncation | None = None) -> IndicatorMap:
    """Closed-form multi-source structure; independent of emitter angles.

    ``(2/(3|a||b|)) | sum_s area_s contrast_s
    [J_0(k|r'-r_s|)^2 + (3/pi) M(r', r_s)] |``
    """
    k = wavenumber(freq, scene.medium)
    trunc = _series_trunc(k, grid, scene, trunc)
    pts = grid.points()
    acc = np.zeros(len(pts), dtype=complex)
    for s in scene.scatterers:
        offset = pts - np.asarray(s.center)
        dist = np.hypot(offset[:, 0], offset[:, 1])
        m_term = multi_factor_M(dist, k, trunc)
        acc += s.area * scene.contrast(s) \
            * (bessel_j(0, k * dist) ** 2 + (3.0 / math.pi) * m_term)
    scale = 2.0 / (3.0 * geom.emitter_radius * geom.receiver_radius)
    return IndicatorMap(grid=grid, values=np.abs(scale * acc).reshape(grid.ny, grid.nx),
                        kind="analytic-multi", freq=freq)


def normalize(imap: IndicatorMap) -> IndicatorMap:
    """Scale the map so its maximum equals 1."""
    peak = float(imap.values.max())
    if peak <= 0.0:
        raise DegenerateMapError("cannot normalize an all-zero map")
    return replace(imap, values=imap.values / peak)


def save_map_csv(imap: IndicatorMap, path) -> None:
    """Matrix CSV: one row per grid row (y ascending), metadata in comments."""
    g = imap.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# osm2d indicator map kind = {imap.label()}\n")
        fh.write(f"# frequency_hz = {imap.freq.f:.17g}\n")
        fh.write(f"# x_min = {g.x_min:.17g}\n# x_max = {g.x_max:.17g}\n")
        fh.write(f"# y_min = {g.y_min:.17g}\n# y_max = {g.y_max:.17g}\n")
        fh.write(f"# nx = {g.nx}\n# ny = {g.ny}\n")
        if imap.source is not None:
            fh.write(f"# source = {imap.source}\n")
        for row in imap.values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_map_csv(path) -> IndicatorMap:
    """Read a file written by :func:`save_map_csv`."""
    meta = {}
    kind = "unknown"
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("# ")
                if body.startswith("osm2d indicator map kind ="):
                    kind = body.split("=", 1)[1].strip()
                elif "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            rows.append([float(t) for t in line.split(",")])
    grid = ImagingGrid(x_min=float(meta["x_min"]), x_max=float(meta["x_max"]),
                       y_min=float(meta["y_min"]), y_max=float(meta["y_max"]),
                       nx=int(meta["nx"]), ny=int(meta["ny"]))
    source = int(meta["source"]) if "source" in meta else None
    base_kind = kind.split("(")[0]
    return IndicatorMap(grid=grid, values=np.asarray(rows), kind=base_kind,
                        freq=Frequency(float(meta["frequency_hz"])), source=source)


def save_map_pgm(imap: IndicatorMap, path) -> None:
    """8-bit ASCII PGM of the normalized map; top image row is y_max."""
    norm = normalize(imap)
    pixels = np.rint(norm.values[::-1] * 255.0).astype(int)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("P2\n")
        fh.write(f"# {imap.label()} at {imap.freq.f / 1e9:g} GHz\n")
        fh.write(f"{imap.grid.nx} {imap.grid.ny}\n255\n")
        for row in pixels:
            fh.write(" ".join(str(v) for v in row) + "\n")
