import math
import random

import numpy as np
import pytest

from osm2d import (AmbiguityError, ArrayGeometry, ColumnMap, CoverageError,
                   Frequency, InvalidInputError, MeasurementSet,
                   ParseError, StructureError, assemble, born_field,
                   parse_file, write_file)
from osm2d.fresnel_io import FresnelRecord
from conftest import point_scene


@pytest.fixture(scope="module")
def small_geom():
    return ArrayGeometry(num_emitters=4, num_receivers=7)


@pytest.fixture(scope="module")
def small_ms(small_geom, medium):
    return born_field(point_scene((0.02, 0.01), medium), small_geom,
                      Frequency.from_ghz(3.0))


def records_for(ms, medium=None):
    import tempfile, os
    fd, path = tempfile.mkstemp(suffix=".txt")
    os.close(fd)
    write_file(ms, path, medium)
    recs = parse_file(path, ColumnMap())
    os.remove(path)
    return recs


class TestParseFile:
    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text(
            "# header comment\n"
            "Fresnel-style banner line\n"
            "% another comment\n"
            "\n"
            "0.0 60.0 3e9 1.0 2.0 0.5 -0.5\n"
            "0.0 65.0 3e9 1.5 2.5 0.5 -0.5\n")
        records = parse_file(path, ColumnMap())
        assert len(records) == 2
        assert records[0].rx_angle == 60.0
        assert records[0].total_field == 1.0 + 2.0j

    def test_width_mismatch_names_line(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text(
            "0.0 60.0 3e9 1.0 2.0 0.5 -0.5\n"
            "0.0 65.0 3e9 1.0 2.0 0.5\n")
        with pytest.raises(StructureError) as err:
            parse_file(path, ColumnMap())
        assert err.value.line_number == 2

    def test_row_too_short_for_colmap(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("0.0 60.0 3e9 1.0 2.0 0.5\n")
        with pytest.raises(StructureError) as err:
            parse_file(path, ColumnMap())
        assert err.value.line_number == 1

    def test_malformed_numeric_names_line(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text(
            "# header\n"
            "0.0 60.0 3e9 1.0 2.0 0.5 -0.5\n"
            "0.0 65.0 3e9 1.0 2.0 0.5x -0.5\n")
        with pytest.raises(ParseError) as err:
            parse_file(path, ColumnMap())
        assert err.value.line_number == 3

    def test_ghz_unit_scaling(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("10.0 70.0 3.0 1.0 0.0 0.0 0.0\n")
        rec = parse_file(path, ColumnMap(frequency_unit="GHz"))[0]
        assert rec.freq == pytest.approx(3e9)

    def test_nonpositive_frequency_rejected(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("0.0 60.0 3e9 1.0 0.0 0.0 0.0\n"
                        "0.0 65.0 -1e9 1.0 0.0 0.0 0.0\n")
        with pytest.raises(ParseError) as err:
            parse_file(path, ColumnMap())
        assert err.value.line_number == 2

    def test_angles_normalized_to_circle(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("370.0 -20.0 3e9 1.0 0.0 0.0 0.0\n")
        rec = parse_file(path, ColumnMap())[0]
        assert rec.tx_angle == pytest.approx(10.0)
        assert rec.rx_angle == pytest.approx(340.0)

    def test_custom_column_order(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("9 1.0 0.0 0.5 -0.5 0.0 60.0 3e9\n")
        cm = ColumnMap(tx_angle=5, rx_angle=6, frequency=7, re_total=1,
                       im_total=2, re_incident=3, im_incident=4)
        rec = parse_file(path, cm)[0]
        assert rec.tx_angle == 0.0
        assert rec.incident_field == 0.5 - 0.5j

    def test_colmap_validation(self):
        with pytest.raises(InvalidInputError):
            ColumnMap(tx_angle=0, rx_angle=0)
        with pytest.raises(InvalidInputError):
            ColumnMap(frequency_unit="MHz")


class TestAssemble:
    def test_round_trip_reproduces_matrix(self, small_ms, small_geom, tmp_path):
        path = tmp_path / "export.txt"
        write_file(small_ms, path)
        records = parse_file(path, ColumnMap())
        back = assemble(records, small_geom, small_ms.freq)
        scale = np.abs(small_ms.data).max()
        np.testing.assert_allclose(back.data, small_ms.data, atol=1e-13 * scale)

    def test_record_order_irrelevant(self, small_ms, small_geom, tmp_path):
        path = tmp_path / "export.txt"
        write_file(small_ms, path)
        records = parse_file(path, ColumnMap())
        shuffled = records[:]
        random.Random(3).shuffle(shuffled)
        a = assemble(records, small_geom, small_ms.freq)
        b = assemble(shuffled, small_geom, small_ms.freq)
        np.testing.assert_array_equal(a.data, b.data)

    def test_missing_pair_reported(self, small_ms, small_geom):
        records = records_for(small_ms)
        removed = records[9]
        with pytest.raises(CoverageError) as err:
            assemble(records[:9] + records[10:], small_geom, small_ms.freq)
        missing = err.value.missing_pairs
        assert len(missing) == 1
        m, n = missing[0]
        assert math.isclose((m - 1) * 90.0, removed.tx_angle, abs_tol=1e-9)

    def test_duplicate_pair_rejected(self, small_ms, small_geom):
        records = records_for(small_ms)
        with pytest.raises(AmbiguityError):
            assemble(records + [records[0]], small_geom, small_ms.freq)

    def test_total_equals_incident_gives_zero_matrix(self, small_geom):
        zero_ms = MeasurementSet(
            geometry=small_geom, freq=Frequency.from_ghz(3.0),
            data=np.zeros((4, 7), dtype=complex))
        records = records_for(zero_ms)
        assert all(r.total_field == r.incident_field for r in records)
        out = assemble(records, small_geom, zero_ms.freq)
        assert np.abs(out.data).max() < 1e-18

    def test_other_frequencies_filtered(self, small_ms, small_geom):
        records = records_for(small_ms)
        other = [FresnelRecord(r.tx_angle, r.rx_angle, 5e9, 99.0 + 0j, 0j)
                 for r in records]
        out = assemble(records + other, small_geom, small_ms.freq)
        expected = assemble(records, small_geom, small_ms.freq)
        np.testing.assert_array_equal(out.data, expected.data)

    def test_conjugate_toggle(self, small_ms, small_geom):
        records = records_for(small_ms)
        plain = assemble(records, small_geom, small_ms.freq)
        flipped = assemble(records, small_geom, small_ms.freq, conjugate=True)
        np.testing.assert_array_equal(flipped.data, plain.data.conj())

    def test_angle_tolerance_matching(self, small_ms, small_geom):
        records = records_for(small_ms)
        nudged = [FresnelRecord(r.tx_angle + 0.3, r.rx_angle - 0.3, r.freq,
                                r.total_field, r.incident_field)
                  for r in records]
        out = assemble(nudged, small_geom, small_ms.freq, angle_tol=0.5)
        scale = np.abs(small_ms.data).max()
        np.testing.assert_allclose(out.data, small_ms.data, atol=1e-12 * scale)
        with pytest.raises(CoverageError):
            assemble(nudged, small_geom, small_ms.freq, angle_tol=0.1)
