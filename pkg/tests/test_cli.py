import numpy as np
import pytest

from osm2d import ColumnMap, Frequency, load_measurements_csv, write_file
from osm2d.cli import main, parse_colmap_flag

SMALL_CFG = """
[geometry]
num_emitters = 6
num_receivers = 9

[grid]
nx = 16
ny = 16

[[scene.scatterer]]
center = [0.045, 0.010]
radius = 0.015
eps_rel = 3.0

[[scene.scatterer]]
center = [-0.045, 0.0]
radius = 0.015
eps_rel = 3.0

[run]
frequencies_ghz = [3.0]
kinds = ["osmm", "mosm"]
sources = [1]
seed = 11
"""


@pytest.fixture()
def cfg_path(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(SMALL_CFG)
    return path


def run(*argv):
    return main(list(argv))


class TestSynth:
    def test_writes_expected_matrix_shape(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        assert run("synth", "--config", str(cfg_path), "--out", str(out)) == 0
        ms = load_measurements_csv(out / "meas_3GHz.csv")
        assert ms.data.shape == (6, 9)
        assert ms.freq == Frequency.from_ghz(3.0)

    def test_zero_contrast_writes_zero_matrix(self, tmp_path):
        cfg = tmp_path / "zero.toml"
        cfg.write_text("""
[geometry]
num_emitters = 4
num_receivers = 5
[[scene.scatterer]]
center = [0.02, 0.0]
radius = 0.01
eps_rel = 1.0
[run]
frequencies_ghz = [2.0]
""")
        out = tmp_path / "out"
        assert run("synth", "--config", str(cfg), "--out", str(out)) == 0
        ms = load_measurements_csv(out / "meas_2GHz.csv")
        assert np.all(ms.data == 0)

    def test_reruns_are_byte_identical(self, cfg_path, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run("synth", "--config", str(cfg_path), "--out", str(out),
                       "--noise", "0.05", "--seed", "9") == 0
        assert (out1 / "meas_3GHz.csv").read_bytes() == \
            (out2 / "meas_3GHz.csv").read_bytes()

    def test_noise_changes_with_seed(self, cfg_path, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run("synth", "--config", str(cfg_path), "--out", str(out1),
            "--noise", "0.05", "--seed", "1")
        run("synth", "--config", str(cfg_path), "--out", str(out2),
            "--noise", "0.05", "--seed", "2")
        assert (out1 / "meas_3GHz.csv").read_bytes() != \
            (out2 / "meas_3GHz.csv").read_bytes()


class TestImage:
    def test_missing_data_names_expected_file(self, cfg_path, tmp_path, capsys):
        out = tmp_path / "out"
        assert run("image", "--config", str(cfg_path), "--out", str(out)) == 3
        assert "meas_3GHz.csv" in capsys.readouterr().err

    def test_osm_kind_one_map_per_source(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(SMALL_CFG.replace('kinds = ["osmm", "mosm"]',
                                         'kinds = ["osm"]')
                       .replace("sources = [1]", "sources = [1, 3, 5]")
                       .replace("frequencies_ghz = [3.0]",
                                "frequencies_ghz = [2.0, 3.0]"))
        out = tmp_path / "out"
        assert run("synth", "--config", str(cfg), "--out", str(out)) == 0
        assert run("image", "--config", str(cfg), "--out", str(out)) == 0
        for f in ("2", "3"):
            for m in (1, 3, 5):
                assert (out / f"osm_{f}_m{m}.csv").is_file()
                assert (out / f"osm_{f}_m{m}.pgm").is_file()

    def test_empty_kinds_is_success_without_output(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(SMALL_CFG.replace('kinds = ["osmm", "mosm"]', "kinds = []"))
        out = tmp_path / "out"
        assert run("synth", "--config", str(cfg), "--out", str(out)) == 0
        assert run("image", "--config", str(cfg), "--out", str(out)) == 0
        assert not list(out.glob("*.pgm"))

    def test_deterministic_artifacts(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        run("synth", "--config", str(cfg_path), "--out", str(out))
        run("image", "--config", str(cfg_path), "--out", str(out))
        first = (out / "mosm_3_all.csv").read_bytes()
        run("image", "--config", str(cfg_path), "--out", str(out))
        assert (out / "mosm_3_all.csv").read_bytes() == first

    def test_analytic_kinds_need_no_measurements(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(SMALL_CFG.replace('kinds = ["osmm", "mosm"]',
                                         'kinds = ["analytic-multi"]'))
        out = tmp_path / "out"
        assert run("image", "--config", str(cfg), "--out", str(out)) == 0
        assert (out / "analytic-multi_3_all.csv").is_file()


class TestAnalyze:
    def test_writes_curve_files(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        assert run("analyze", "--config", str(cfg_path), "--out", str(out),
                   "--freq", "2") == 0
        for name in ("bessel1_2.csv", "bessel2_2.csv", "bessel3_2.csv",
                     "d1_2.csv", "d2_2.csv", "bounds_2.csv"):
            assert (out / name).is_file()
        body = (out / "bessel1_2.csv").read_text().splitlines()
        assert body[0] == "x,y,z"
        assert len(body) == 1 + 401

    def test_single_point_profile(self, tmp_path):
        cfg = tmp_path / "one.toml"
        cfg.write_text(SMALL_CFG + "\n[analyze]\npoints = 1\n")
        out = tmp_path / "out"
        assert run("analyze", "--config", str(cfg), "--out", str(out)) == 0
        assert len((out / "d1_3.csv").read_text().splitlines()) == 2

    def test_bounds_mark_inapplicable_region(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        run("analyze", "--config", str(cfg_path), "--out", str(out), "--freq", "2")
        rows = (out / "bounds_2.csv").read_text().splitlines()[1:]
        k2 = 41.916455859903011
        for row in rows:
            x, _, _, bound_e, _, applicable = row.split(",")
            if abs(float(x)) * k2 <= 0.25:
                assert float(applicable) == 0.0 and bound_e == "nan"
            else:
                assert float(applicable) == 1.0 and float(bound_e) > 0


class TestScore:
    def test_summary_and_sweeps(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        run("synth", "--config", str(cfg_path), "--out", str(out))
        run("image", "--config", str(cfg_path), "--out", str(out))
        assert run("score", "--config", str(cfg_path), "--out", str(out)) == 0
        assert (out / "jaccard_mosm_3_all.csv").is_file()
        summary = (out / "summary.csv").read_text().splitlines()
        assert summary[0].startswith("map,freq_ghz,peak_count")
        assert len(summary) == 3

    def test_resolvable_flag_false_at_1ghz(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        run("synth", "--config", str(cfg_path), "--out", str(out), "--freq", "1")
        run("image", "--config", str(cfg_path), "--out", str(out), "--freq", "1")
        run("score", "--config", str(cfg_path), "--out", str(out), "--freq", "1")
        rows = (out / "summary.csv").read_text().splitlines()[1:]
        assert all(row.split(",")[4] == "false" for row in rows)

    def test_missing_map_is_data_error(self, cfg_path, tmp_path, capsys):
        out = tmp_path / "out"
        assert run("score", "--config", str(cfg_path), "--out", str(out)) == 3
        assert "run image first" in capsys.readouterr().err

    def test_grid_mismatch_is_data_error(self, cfg_path, tmp_path, capsys):
        out = tmp_path / "out"
        run("synth", "--config", str(cfg_path), "--out", str(out))
        run("image", "--config", str(cfg_path), "--out", str(out))
        other = tmp_path / "other.toml"
        other.write_text(SMALL_CFG.replace("nx = 16", "nx = 24"))
        assert run("score", "--config", str(other), "--out", str(out)) == 3
        assert "grid mismatch" in capsys.readouterr().err


class TestParse:
    def test_ingests_exported_file(self, cfg_path, tmp_path):
        out = tmp_path / "out"
        run("synth", "--config", str(cfg_path), "--out", str(out))
        ms = load_measurements_csv(out / "meas_3GHz.csv")
        record_file = tmp_path / "records.txt"
        write_file(ms, record_file)
        out2 = tmp_path / "out2"
        assert run("parse", "--config", str(cfg_path), "--out", str(out2),
                   "--file", str(record_file)) == 0
        back = load_measurements_csv(out2 / "meas_3GHz.csv")
        scale = np.abs(ms.data).max()
        np.testing.assert_allclose(back.data, ms.data, atol=1e-12 * scale)

    def test_missing_file_is_data_error(self, cfg_path, tmp_path):
        assert run("parse", "--config", str(cfg_path), "--out",
                   str(tmp_path / "o"), "--file", str(tmp_path / "nope.txt")) == 3

    def test_colmap_flag(self):
        cm = parse_colmap_flag("tx=6,rx=5,freq=4,re_tot=3,im_tot=2,re_inc=1,"
                               "im_inc=0,unit=GHz")
        assert cm == ColumnMap(tx_angle=6, rx_angle=5, frequency=4, re_total=3,
                               im_total=2, re_incident=1, im_incident=0,
                               frequency_unit="GHz")


class TestConfigErrors:
    def test_bad_toml_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[run\nkinds=")
        assert run("synth", "--config", str(cfg)) == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_kind_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text('[run]\nkinds = ["sonar"]\n')
        assert run("image", "--config", str(cfg)) == 2
        assert "run.kinds" in capsys.readouterr().err

    def test_field_path_in_message(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[[scene.scatterer]]\ncenter = [0.0, 0.0]\nradius = -1.0\n")
        assert run("synth", "--config", str(cfg)) == 2
        assert "scene.scatterer[0]" in capsys.readouterr().err

    def test_scatterer_outside_grid_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[[scene.scatterer]]\ncenter = [0.5, 0.0]\nradius = 0.01\n")
        assert run("synth", "--config", str(cfg)) == 2
        assert "outside the imaging grid" in capsys.readouterr().err

    def test_source_out_of_range(self, cfg_path, capsys):
        assert run("image", "--config", str(cfg_path), "--sources", "99") == 2
        assert "run.sources" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert run("synth", "--config", str(tmp_path / "absent.toml")) == 2

    def test_negative_noise_rejected(self, cfg_path):
        assert run("synth", "--config", str(cfg_path), "--noise", "-0.5") == 2
