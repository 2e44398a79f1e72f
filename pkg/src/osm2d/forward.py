"""Synthetic scattered-field data under the Born / point-collapse model.

``born_field`` collapses each small disk to its center (mean-value theorem),
which is the model the indicator-structure analysis is built on.
``quadrature_field`` integrates the same Born kernel over the actual disks
with a polar tensor rule and serves as the independent oracle: the two agree
in the limit of electrically small disks.

The time convention is ``exp(-i omega t)``; the background Green's function
is ``G(r, r') = -(i/4) H_0^(1)(k |r - r'|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, InvalidInputError, InvalidSceneError
from .geometry import (ArrayGeometry, Frequency, Medium, emitter_positions,
                       receiver_positions, wavenumber)
from .specfun import hankel1_0


@dataclass(frozen=True)
class Scatterer:
    """Small circular dielectric scatterer.

    Attributes
    ----------
    center : tuple of float
        Disk center (x, y), m.
    radius : float
        Disk radius, m, > 0.
    eps : float
        Permittivity of the disk, F/m, > 0.
    """

    center: tuple
    radius: float
    eps: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.shape != (2,) or not np.all(np.isfinite(c)):
            raise InvalidInputError(f"center must be a finite 2-vector, got {self.center}")
        object.__setattr__(self, "center", (float(c[0]), float(c[1])))
        if not (self.radius > 0):
            raise InvalidInputError("radius must be > 0")
        if not (self.eps > 0):
            raise InvalidInputError("eps must be > 0")

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class Scene:
    """Collection of pairwise-disjoint scatterers in a background medium."""

    scatterers: tuple
    medium: Medium = field(default_factory=Medium)

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if not self.scatterers:
            raise InvalidSceneError("scene must contain at least one scatterer")
        for i, a in enumerate(self.scatterers):
            for b in self.scatterers[i + 1:]:
                gap = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
                if gap <= a.radius + b.radius:
                    raise InvalidSceneError(
                        f"scatterers at {a.center} and {b.center} are not disjoint")

    def contrast(self, s: Scatterer) -> float:
        """Contrast factor ``(eps_s - eps_b) / (eps_b * mu_b)`` of one disk."""
        return (s.eps - self.medium.eps_b) / (self.medium.eps_b * self.medium.mu_b)


@dataclass
class MeasurementSet:
    """Scattered-field samples ``data[m-1, n-1] = u_scat(b_n; a_m)``."""

    geometry: ArrayGeometry
    freq: Frequency
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        expected = (self.geometry.num_emitters, self.geometry.num_receivers)
        if self.data.shape != expected:
            raise InvalidInputError(
                f"data shape {self.data.shape} does not match geometry {expected}")
        if not np.all(np.isfinite(self.data)):
            raise InvalidInputError("data must be finite")


def green(r, r2, k: float):
    """Background Green's function ``-(i/4) H_0^(1)(k |r - r2|)``.

    ``r`` and ``r2`` are broadcastable arrays of 2-D points (last axis = 2).
    Symmetric in its two points; coincident points are outside the domain.
    """
    r = np.asarray(r, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    d = np.hypot(*(np.moveaxis(r - r2, -1, 0)))
    if np.any(d == 0.0):
        raise DomainError("green is singular at coincident points")
    return -0.25j * hankel1_0(k * d)


def _check_antennas_outside(scene: Scene, geom: ArrayGeometry) -> None:
    points = [emitter_positions(geom)]
    for m in range(1, geom.num_emitters + 1):
        points.append(receiver_positions(geom, m))
    pts = np.concatenate(points, axis=0)
    for s in scene.scatterers:
        d = np.hypot(pts[:, 0] - s.center[0], pts[:, 1] - s.center[1])
        if np.any(d <= s.radius):
            raise InvalidSceneError(
                f"an antenna lies inside the scatterer at {s.center}")


def born_field(scene: Scene, geom: ArrayGeometry, freq: Frequency) -> MeasurementSet:
    """Point-collapsed Born data.

    ``data[m, n] = sum_s k^2 area(D_s) contrast_s G(b_n, r_s) G(r_s, a_m)``.
    """
    _check_antennas_outside(scene, geom)
    k = wavenumber(freq, scene.medium)
    emitters = emitter_positions(geom)
    data = np.zeros((geom.num_emitters, geom.num_receivers), dtype=complex)
    for m in range(1, geom.num_emitters + 1):
        receivers = receiver_positions(geom, m)
        row = np.zeros(geom.num_receivers, dtype=complex)
        for s in scene.scatterers:
            c = np.asarray(s.center)
            g_recv = green(receivers, c[None, :], k)
            g_emit = green(c, emitters[m - 1], k)
            row += k * k * s.area * scene.contrast(s) * g_recv * g_emit
        data[m - 1] = row
    return MeasurementSet(geometry=geom, freq=freq, data=data)


def _disk_nodes(s: Scatterer, nodes_per_disk: int):
    """Polar tensor rule on one disk: Gauss-Legendre radial x uniform angular.

    Node budget is split as ``n_r = round(sqrt(nodes/4))`` radial times
    ``nodes // n_r`` angular, so 16 nodes give a 2 x 8 rule.
    """
    n_r = max(2, int(round(math.sqrt(nodes_per_disk / 4.0))))
    n_theta = max(4, nodes_per_disk // n_r)
    t, w = leggauss(n_r)
    radii = 0.5 * (t + 1.0) * s.radius
    w_rad = 0.5 * w * s.radius * radii            # includes the r dr Jacobian
    ang = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
    w_ang = 2.0 * math.pi / n_theta
    xy = np.asarray(s.center)[None, None, :] + radii[:, None, None] \
        * np.stack([np.cos(ang), np.sin(ang)], axis=-1)[None, :, :]
    weights = np.broadcast_to(w_rad[:, None] * w_ang, (n_r, n_theta))
    return xy.reshape(-1, 2), weights.reshape(-1)


def quadrature_field(scene: Scene, geom: ArrayGeometry, freq: Frequency,
                     nodes_per_disk: int = 256) -> MeasurementSet:
    """Born data with full 2-D quadrature over each disk (oracle for born_field)."""
    if nodes_per_disk < 16:
        raise InvalidInputError("nodes_per_disk must be >= 16")
    _check_antennas_outside(scene, geom)
    k = wavenumber(freq, scene.medium)
    emitters = emitter_positions(geom)
    data = np.zeros((geom.num_emitters, geom.num_receivers), dtype=complex)
    for s in scene.scatterers:
        nodes, weights = _disk_nodes(s, nodes_per_disk)
        con = scene.contrast(s)
        for m in range(1, geom.num_emitters + 1):
            receivers = receiver_positions(geom, m)
            g_emit = green(nodes, emitters[m - 1][None, :], k)       # (K,)
            g_recv = green(receivers[:, None, :], nodes[None, :, :], k)  # (N, K)
            data[m - 1] += k * k * con * g_recv @ (weights * g_emit)
    return MeasurementSet(geometry=geom, freq=freq, data=data)


def fresnel_two_disk_scene(medium: Medium | None = None,
                           eps_rel: float = 3.0) -> Scene:
    """Two-disk benchmark scene: radius 0.015 m disks of ``eps_rel * eps_b``
    centered at (0.045, 0.010) and (-0.045, 0).  The first center follows the
    corrected location reported for this dataset; pass a custom Scene to use
    (0.045, 0) instead."""
    medium = medium if medium is not None else Medium()
    return Scene(
        scatterers=(
            Scatterer(center=(0.045, 0.010), radius=0.015, eps=eps_rel * medium.eps_b),
            Scatterer(center=(-0.045, 0.0), radius=0.015, eps=eps_rel * medium.eps_b),
        ),
        medium=medium,
    )


def add_noise(ms: MeasurementSet, relative_level: float, seed: int) -> MeasurementSet:
    """Perturb each entry with circular complex Gaussian noise.

    The complex standard deviation (``sqrt(E|n|^2)``) equals
    ``relative_level`` times the RMS modulus of the data.  Deterministic for
    a given ``seed``.
    """
    if relative_level < 0:
        raise InvalidInputError("relative_level must be >= 0")
    if relative_level == 0:
        return MeasurementSet(ms.geometry, ms.freq, ms.data.copy())
    rng = np.random.default_rng(seed)
    sigma = relative_level * math.sqrt(float(np.mean(np.abs(ms.data) ** 2)))
    noise = rng.standard_normal(ms.data.shape) + 1j * rng.standard_normal(ms.data.shape)
    return MeasurementSet(ms.geometry, ms.freq, ms.data + sigma / math.sqrt(2.0) * noise)


def save_measurements_csv(ms: MeasurementSet, path) -> None:
    """Write ``m, n, re, im`` rows with geometry/frequency metadata comments."""
    g = ms.geometry
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# osm2d measurement set\n")
        fh.write(f"# frequency_hz = {ms.freq.f:.17g}\n")
        fh.write(f"# emitter_radius = {g.emitter_radius:.17g}\n")
        fh.write(f"# receiver_radius = {g.receiver_radius:.17g}\n")
        fh.write(f"# num_emitters = {g.num_emitters}\n")
        fh.write(f"# num_receivers = {g.num_receivers}\n")
        fh.write(f"# aperture_start = {g.aperture_start:.17g}\n")
        fh.write(f"# aperture_span = {g.aperture_span:.17g}\n")
        fh.write("# m, n, re_uscat, im_uscat\n")
        for m in range(g.num_emitters):
            for n in range(g.num_receivers):
                z = ms.data[m, n]
                fh.write(f"{m + 1}, {n + 1}, {z.real:.17g}, {z.imag:.17g}\n")


def load_measurements_csv(path) -> MeasurementSet:
    """Read a file written by :func:`save_measurements_csv`."""
    meta = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    key, _, value = line.lstrip("# ").partition("=")
                    meta[key.strip()] = value.strip()
                continue
            parts = [t.strip() for t in line.split(",")]
            if len(parts) != 4:
                raise InvalidInputError(f"expected 4 comma-separated fields, got {line!r}")
            rows.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    try:
        geom = ArrayGeometry(
            emitter_radius=float(meta["emitter_radius"]),
            receiver_radius=float(meta["receiver_radius"]),
            num_emitters=int(meta["num_emitters"]),
            num_receivers=int(meta["num_receivers"]),
            aperture_start=float(meta["aperture_start"]),
            aperture_span=float(meta["aperture_span"]),
        )
        freq = Frequency(float(meta["frequency_hz"]))
    except KeyError as exc:
        raise InvalidInputError(f"missing metadata field {exc} in {path}") from exc
    data = np.zeros((geom.num_emitters, geom.num_receivers), dtype=complex)
    seen = np.zeros(data.shape, dtype=bool)
    for m, n, re, im in rows:
        data[m - 1, n - 1] = re + 1j * im
        seen[m - 1, n - 1] = True
    if not seen.all():
        raise InvalidInputError(f"measurement file {path} has missing entries")
    return MeasurementSet(geometry=geom, freq=freq, data=data)
