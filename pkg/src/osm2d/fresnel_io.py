"""Ingestion of Fresnel-style measurement files.

Files are whitespace-delimited text; any line whose first non-blank
character is not part of a number (digit, sign, or decimal point) is treated
as a comment, so ``#`` headers and alphabetic banners both pass through.
Column meanings are never guessed: a :class:`ColumnMap` names the indices of
the transmitter angle, receiver angle, frequency, and the real/imaginary
parts of the total and incident fields, along with the frequency unit.

``assemble`` turns parsed records into a measurement matrix by subtracting
the incident from the total field and matching record angles to grid angles
within a tolerance (default 0.5 deg, well under the 5 deg receiver spacing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (AmbiguityError, CoverageError, InvalidInputError,
                     ParseError, StructureError)
from .forward import MeasurementSet, green
from .geometry import (ArrayGeometry, Frequency, Medium, emitter_angle,
                       emitter_positions, receiver_angle, receiver_positions,
                       wavenumber)

_FREQ_SCALE = {"Hz": 1.0, "GHz": 1e9}


@dataclass(frozen=True)
class FresnelRecord:
    """One measurement row: angles in degrees [0, 360), frequency in Hz."""

    tx_angle: float
    rx_angle: float
    freq: float
    total_field: complex
    incident_field: complex


@dataclass(frozen=True)
class ColumnMap:
    """Zero-based column indices of the seven required fields."""

    tx_angle: int = 0
    rx_angle: int = 1
    frequency: int = 2
    re_total: int = 3
    im_total: int = 4
    re_incident: int = 5
    im_incident: int = 6
    frequency_unit: str = "Hz"

    def __post_init__(self):
        idx = self.indices()
        if len(set(idx)) != len(idx):
            raise InvalidInputError(f"column indices must be distinct, got {idx}")
        if any(i < 0 for i in idx):
            raise InvalidInputError("column indices must be >= 0")
        if self.frequency_unit not in _FREQ_SCALE:
            raise InvalidInputError(
                f"frequency_unit must be one of {sorted(_FREQ_SCALE)}")

    def indices(self) -> tuple:
        return (self.tx_angle, self.rx_angle, self.frequency,
                self.re_total, self.im_total, self.re_incident, self.im_incident)


#: Column order used by :func:`write_file`.
DEFAULT_COLUMNS = ColumnMap()


def _is_data_line(stripped: str) -> bool:
    head = stripped[0]
    return head.isdigit() or head in "+-."


def parse_file(path, colmap: ColumnMap) -> list:
    """Parse one file into records, streaming line by line.

    Raises :class:`ParseError` for malformed numerics and
    :class:`StructureError` when a row's field count deviates from the first
    data row (or is too short for the column map).
    """
    records = []
    width = None
    needed = max(colmap.indices()) + 1
    scale = _FREQ_SCALE[colmap.frequency_unit]
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or not _is_data_line(stripped):
                continue
            fields = stripped.split()
            if width is None:
                width = len(fields)
                if width < needed:
                    raise StructureError(
                        f"row has {width} fields but the column map needs {needed}",
                        lineno)
            if len(fields) != width:
                raise StructureError(
                    f"row has {len(fields)} fields, expected {width}", lineno)
            values = []
            for col in colmap.indices():
                token = fields[col]
                try:
                    values.append(float(token))
                except ValueError:
                    raise ParseError(f"malformed numeric field {token!r}", lineno) from None
            tx, rx, fq, re_t, im_t, re_i, im_i = values
            if not fq > 0:
                raise ParseError(f"frequency must be > 0, got {fq}", lineno)
            records.append(FresnelRecord(
                tx_angle=tx % 360.0,
                rx_angle=rx % 360.0,
                freq=fq * scale,
                total_field=complex(re_t, im_t),
                incident_field=complex(re_i, im_i),
            ))
    return records


def _angular_distance_deg(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def assemble(records, geom: ArrayGeometry, target_freq: Frequency,
             angle_tol: float = 0.5, conjugate: bool = False) -> MeasurementSet:
    """Build the measurement matrix ``u_scat = total - incident``.

    Records are filtered to ``target_freq`` (relative tolerance 1e-6), then
    matched to the (emitter, receiver) angle grid within ``angle_tol``
    degrees.  Every grid pair must be covered exactly once.  ``conjugate``
    flips the time convention of the assembled data (for measured files whose
    phase convention is opposite).
    """
    tx_grid = [math.degrees(emitter_angle(geom, m)) % 360.0
               for m in range(1, geom.num_emitters + 1)]
    rx_grid = [[math.degrees(receiver_angle(geom, m, n)) % 360.0
                for n in range(1, geom.num_receivers + 1)]
               for m in range(1, geom.num_emitters + 1)]

    data = np.zeros((geom.num_emitters, geom.num_receivers), dtype=complex)
    filled = np.zeros(data.shape, dtype=bool)
    for rec in records:
        if abs(rec.freq - target_freq.f) > 1e-6 * target_freq.f:
            continue
        m_hits = [m for m, ang in enumerate(tx_grid)
                  if _angular_distance_deg(rec.tx_angle, ang) <= angle_tol]
        if not m_hits:
            continue
        if len(m_hits) > 1:
            raise AmbiguityError(
                f"tx angle {rec.tx_angle} deg matches several emitters within "
                f"{angle_tol} deg")
        m = m_hits[0]
        n_hits = [n for n, ang in enumerate(rx_grid[m])
                  if _angular_distance_deg(rec.rx_angle, ang) <= angle_tol]
        if not n_hits:
            continue
        if len(n_hits) > 1:
            raise AmbiguityError(
                f"rx angle {rec.rx_angle} deg matches several receivers within "
                f"{angle_tol} deg")
        n = n_hits[0]
        if filled[m, n]:
            raise AmbiguityError(
                f"duplicate record for emitter {m + 1}, receiver {n + 1}")
        data[m, n] = rec.total_field - rec.incident_field
        filled[m, n] = True

    if not filled.all():
        missing = [(m + 1, n + 1) for m, n in zip(*np.nonzero(~filled))]
        raise CoverageError(missing)
    if conjugate:
        data = data.conj()
    return MeasurementSet(geometry=geom, freq=target_freq, data=data)


def write_file(ms: MeasurementSet, path, medium: Medium | None = None) -> None:
    """Export a measurement set in the :data:`DEFAULT_COLUMNS` record layout.

    The incident field of each record is the background Green's function
    between receiver and emitter, and the total field is scattered plus
    incident, so ``parse_file`` + ``assemble`` recovers ``ms.data``.
    """
    medium = medium if medium is not None else Medium()
    g = ms.geometry
    k = wavenumber(ms.freq, medium)
    emitters = emitter_positions(g)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# Fresnel-style synthetic export\n")
        fh.write("# tx_deg rx_deg freq_hz re_total im_total re_inc im_inc\n")
        for m in range(1, g.num_emitters + 1):
            receivers = receiver_positions(g, m)
            u_inc = green(receivers, emitters[m - 1][None, :], k)
            tx = math.degrees(emitter_angle(g, m)) % 360.0
            for n in range(1, g.num_receivers + 1):
                rx = math.degrees(receiver_angle(g, m, n)) % 360.0
                total = ms.data[m - 1, n - 1] + u_inc[n - 1]
                fh.write(f"{tx:.17g} {rx:.17g} {ms.freq.f:.17g} "
                         f"{total.real:.17g} {total.imag:.17g} "
                         f"{u_inc[n - 1].real:.17g} {u_inc[n - 1].imag:.17g}\n")
