"""Command-line interface.

Subcommands::

    synth     synthesize Born measurement data and write per-frequency CSVs
    image     compute indicator maps from measurement CSVs (CSV + PGM each)
    analyze   write the Bessel/artifact curves and sidelobe-bound tables
    score     Jaccard sweeps and a summary table against the scene truth
    parse     ingest a Fresnel-style record file into measurement CSVs

Configuration lives in a TOML file (``--config``); the ``--freq``,
``--sources``, ``--out``, ``--seed``, ``--noise`` and ``--colmap`` flags
override the corresponding fields.  Every command is deterministic given the
config.  Exit codes: 0 success, 2 configuration error, 3 data error.

Angles are degrees in config files and on the command line; the library uses
radians internally.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import specfun
from .errors import ConfigError, InvalidInputError, OSM2DError
from .forward import (Scatterer, Scene, add_noise, born_field,
                      fresnel_two_disk_scene, load_measurements_csv,
                      save_measurements_csv)
from .fresnel_io import ColumnMap, assemble, parse_file
from .geometry import ArrayGeometry, Frequency, Medium, wavenumber
from .imaging import (ImagingGrid, analytic_multi_map, analytic_single_map,
                      load_map_csv, mosm_map, normalize, osm_map, osmm_map,
                      save_map_csv, save_map_pgm)
from .metrics import (DEFAULT_PROMINENCE, DEFAULT_THRESHOLDS, find_peaks,
                      jaccard_sweep, localization_error, resolvable,
                      truth_mask)

VALID_KINDS = ("osm", "osmm", "mosm", "analytic-single", "analytic-multi")


@dataclass
class RunConfig:
    scene: Scene
    geometry: ArrayGeometry
    grid: ImagingGrid
    frequencies: list
    kinds: list
    sources: list
    trunc: specfun.SeriesTruncation | None
    noise_level: float
    seed: int
    output_dir: Path
    input_file: str | None = None
    colmap: ColumnMap = field(default_factory=ColumnMap)
    angle_tol: float = 0.5
    conjugate: bool = False
    profile_points: int = 401
    profile_half_width: float = 1.0


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"{path}: {message}")


def _build_medium(section: dict) -> Medium:
    try:
        return Medium(eps_b=float(section.get("eps_b", Medium().eps_b)),
                      mu_b=float(section.get("mu_b", Medium().mu_b)),
                      sigma_b=float(section.get("sigma_b", 0.0)))
    except InvalidInputError as exc:
        raise _fail("medium", str(exc)) from exc


def _build_scene(section: dict, medium: Medium) -> Scene:
    entries = section.get("scatterer", [])
    if not entries:
        return fresnel_two_disk_scene(medium)
    scatterers = []
    for i, entry in enumerate(entries):
        path = f"scene.scatterer[{i}]"
        try:
            center = entry["center"]
            radius = float(entry["radius"])
        except KeyError as exc:
            raise _fail(path, f"missing field {exc}") from exc
        if "eps" in entry:
            eps = float(entry["eps"])
        else:
            eps = float(entry.get("eps_rel", 3.0)) * medium.eps_b
        try:
            scatterers.append(Scatterer(center=tuple(center), radius=radius, eps=eps))
        except InvalidInputError as exc:
            raise _fail(path, str(exc)) from exc
    try:
        return Scene(scatterers=tuple(scatterers), medium=medium)
    except OSM2DError as exc:
        raise _fail("scene", str(exc)) from exc


def _build_geometry(section: dict) -> ArrayGeometry:
    default = ArrayGeometry()
    try:
        return ArrayGeometry(
            emitter_radius=float(section.get("emitter_radius", default.emitter_radius)),
            receiver_radius=float(section.get("receiver_radius", default.receiver_radius)),
            num_emitters=int(section.get("num_emitters", default.num_emitters)),
            num_receivers=int(section.get("num_receivers", default.num_receivers)),
            aperture_start=math.radians(float(section.get("aperture_start_deg", 60.0))),
            aperture_span=math.radians(float(section.get("aperture_span_deg", 240.0))),
        )
    except InvalidInputError as exc:
        raise _fail("geometry", str(exc)) from exc


def _build_grid(section: dict) -> ImagingGrid:
    default = ImagingGrid()
    try:
        return ImagingGrid(
            x_min=float(section.get("x_min", default.x_min)),
            x_max=float(section.get("x_max", default.x_max)),
            y_min=float(section.get("y_min", default.y_min)),
            y_max=float(section.get("y_max", default.y_max)),
            nx=int(section.get("nx", default.nx)),
            ny=int(section.get("ny", default.ny)),
        )
    except InvalidInputError as exc:
        raise _fail("grid", str(exc)) from exc


def _build_colmap(section: dict) -> ColumnMap:
    default = ColumnMap()
    try:
        return ColumnMap(
            tx_angle=int(section.get("tx_angle", default.tx_angle)),
            rx_angle=int(section.get("rx_angle", default.rx_angle)),
            frequency=int(section.get("frequency", default.frequency)),
            re_total=int(section.get("re_total", default.re_total)),
            im_total=int(section.get("im_total", default.im_total)),
            re_incident=int(section.get("re_incident", default.re_incident)),
            im_incident=int(section.get("im_incident", default.im_incident)),
            frequency_unit=str(section.get("frequency_unit", default.frequency_unit)),
        )
    except InvalidInputError as exc:
        raise _fail("input.columns", str(exc)) from exc


def load_config(args) -> RunConfig:
    """Merge the TOML file (if any) with command-line overrides, validating
    every field before any computation starts."""
    raw = {}
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            raise _fail("config", f"file not found: {cfg_path}")
        try:
            raw = tomllib.loads(cfg_path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise _fail("config", f"TOML parse error: {exc}") from exc

    medium = _build_medium(raw.get("medium", {}))
    scene = _build_scene(raw.get("scene", {}), medium)
    geometry = _build_geometry(raw.get("geometry", {}))
    grid = _build_grid(raw.get("grid", {}))
    for i, s in enumerate(scene.scatterers):
        if (s.center[0] - s.radius < grid.x_min
                or s.center[0] + s.radius > grid.x_max
                or s.center[1] - s.radius < grid.y_min
                or s.center[1] + s.radius > grid.y_max):
            raise _fail(f"scene.scatterer[{i}]",
                        f"disk at {s.center} with radius {s.radius} extends "
                        "outside the imaging grid")
    run = raw.get("run", {})

    freqs_ghz = run.get("frequencies_ghz", [4.0])
    if args.freq is not None:
        try:
            freqs_ghz = [float(t) for t in args.freq.split(",") if t.strip()]
        except ValueError as exc:
            raise _fail("--freq", f"expected comma-separated numbers, got {args.freq!r}") from exc
    if not freqs_ghz:
        raise _fail("run.frequencies_ghz", "must not be empty")
    try:
        frequencies = [Frequency.from_ghz(float(f)) for f in freqs_ghz]
    except InvalidInputError as exc:
        raise _fail("run.frequencies_ghz", str(exc)) from exc

    kinds = list(run.get("kinds", ["osmm", "mosm"]))
    for kind in kinds:
        if kind not in VALID_KINDS:
            raise _fail("run.kinds", f"unknown kind {kind!r}; valid: {VALID_KINDS}")

    sources = list(run.get("sources", [1]))
    if args.sources is not None:
        try:
            sources = [int(t) for t in args.sources.split(",") if t.strip()]
        except ValueError as exc:
            raise _fail("--sources", f"expected comma-separated integers, got {args.sources!r}") from exc
    for m in sources:
        if not 1 <= m <= geometry.num_emitters:
            raise _fail("run.sources", f"source {m} out of range [1, {geometry.num_emitters}]")

    noise_level = float(run.get("noise_level", 0.0))
    if args.noise is not None:
        noise_level = args.noise
    if noise_level < 0:
        raise _fail("run.noise_level", "must be >= 0")

    seed = int(run.get("seed", 0))
    if args.seed is not None:
        seed = args.seed

    out = Path(args.out) if args.out else Path(run.get("output_dir", "out"))

    series = raw.get("series", {})
    trunc = None
    if int(series.get("max_order", 0)) > 0:
        try:
            trunc = specfun.SeriesTruncation(
                max_order=int(series["max_order"]),
                tolerance=float(series.get("tolerance", 1e-12)))
        except InvalidInputError as exc:
            raise _fail("series", str(exc)) from exc

    inp = raw.get("input", {})
    colmap = _build_colmap(inp.get("columns", {}))
    if args.colmap is not None:
        colmap = parse_colmap_flag(args.colmap)
    input_file = inp.get("file")
    if getattr(args, "file", None):
        input_file = args.file
    angle_tol = float(inp.get("angle_tol_deg", 0.5))
    if angle_tol <= 0:
        raise _fail("input.angle_tol_deg", "must be > 0")

    analyze = raw.get("analyze", {})
    profile_points = int(analyze.get("points", 401))
    if profile_points < 1:
        raise _fail("analyze.points", "must be >= 1")
    profile_half_width = float(analyze.get("half_width", 1.0))
    if profile_half_width <= 0:
        raise _fail("analyze.half_width", "must be > 0")

    return RunConfig(scene=scene, geometry=geometry, grid=grid,
                     frequencies=frequencies, kinds=kinds, sources=sources,
                     trunc=trunc, noise_level=noise_level, seed=seed,
                     output_dir=out, input_file=input_file, colmap=colmap,
                     angle_tol=angle_tol, conjugate=bool(inp.get("conjugate", False)),
                     profile_points=profile_points,
                     profile_half_width=profile_half_width)


def parse_colmap_flag(text: str) -> ColumnMap:
    """Parse ``tx=0,rx=1,freq=2,re_tot=3,im_tot=4,re_inc=5,im_inc=6,unit=GHz``."""
    names = {"tx": "tx_angle", "rx": "rx_angle", "freq": "frequency",
             "re_tot": "re_total", "im_tot": "im_total",
             "re_inc": "re_incident", "im_inc": "im_incident"}
    kwargs = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        key, sep, value = piece.partition("=")
        if not sep:
            raise _fail("--colmap", f"expected key=value, got {piece!r}")
        key = key.strip()
        if key == "unit":
            kwargs["frequency_unit"] = value.strip()
        elif key in names:
            try:
                kwargs[names[key]] = int(value)
            except ValueError as exc:
                raise _fail("--colmap", f"{key}: expected integer, got {value!r}") from exc
        else:
            raise _fail("--colmap", f"unknown key {key!r}")
    try:
        return ColumnMap(**kwargs)
    except InvalidInputError as exc:
        raise _fail("--colmap", str(exc)) from exc


def _ghz_tag(freq: Frequency) -> str:
    return f"{freq.f / 1e9:g}"


def _meas_path(cfg: RunConfig, freq: Frequency) -> Path:
    return cfg.output_dir / f"meas_{_ghz_tag(freq)}GHz.csv"


def cmd_synth(cfg: RunConfig) -> list:
    """Synthesize Born data (plus optional noise) per frequency."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for freq in cfg.frequencies:
        ms = born_field(cfg.scene, cfg.geometry, freq)
        if cfg.noise_level > 0:
            ms = add_noise(ms, cfg.noise_level, cfg.seed)
        path = _meas_path(cfg, freq)
        save_measurements_csv(ms, path)
        written.append(path)
    return written


def _map_for_kind(cfg: RunConfig, ms, kind: str, freq: Frequency, m: int | None):
    if kind == "osm":
        return osm_map(ms, m, cfg.grid, cfg.scene.medium)
    if kind == "osmm":
        return osmm_map(ms, cfg.grid, cfg.scene.medium)
    if kind == "mosm":
        return mosm_map(ms, cfg.grid, cfg.scene.medium)
    if kind == "analytic-single":
        return analytic_single_map(cfg.scene, cfg.geometry, m, freq, cfg.grid, cfg.trunc)
    return analytic_multi_map(cfg.scene, cfg.geometry, freq, cfg.grid, cfg.trunc)


def _kind_jobs(cfg: RunConfig):
    for kind in cfg.kinds:
        if kind in ("osm", "analytic-single"):
            for m in cfg.sources:
                yield kind, m, f"m{m}"
        else:
            yield kind, None, "all"


def cmd_image(cfg: RunConfig) -> list:
    """Compute the configured indicator maps for every frequency."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for freq in cfg.frequencies:
        ms = None
        if any(k in ("osm", "osmm", "mosm") for k in cfg.kinds):
            path = _meas_path(cfg, freq)
            if not path.is_file():
                raise OSM2DError(
                    f"measurement data not found: expected {path} (run synth or parse first)")
            ms = load_measurements_csv(path)
        for kind, m, tag in _kind_jobs(cfg):
            imap = _map_for_kind(cfg, ms, kind, freq, m)
            stem = f"{kind}_{_ghz_tag(freq)}_{tag}"
            save_map_csv(imap, cfg.output_dir / f"{stem}.csv")
            save_map_pgm(imap, cfg.output_dir / f"{stem}.pgm")
            written.append(cfg.output_dir / f"{stem}.csv")
    return written


def _write_xyz(path: Path, header: str, cols) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def cmd_analyze(cfg: RunConfig) -> list:
    """Write artifact-curve and sidelobe-bound tables per frequency.

    ``bessel1``: x, |J0(kx)|, D1(x); ``bessel2``: x, J0(kx)^2, D2(x);
    ``bessel3``: normalized single/multi source profiles through a point
    scatterer at the origin; ``bounds``: truncated |E|, |M| with their
    harmonic-sum bounds and an applicability marker (k|x| > 1/4).
    """
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    medium = cfg.scene.medium
    xs = np.linspace(-cfg.profile_half_width, cfg.profile_half_width,
                     cfg.profile_points)
    written = []
    for freq in cfg.frequencies:
        k = wavenumber(freq, medium)
        tag = _ghz_tag(freq)
        j0 = specfun.bessel_j(0, k * np.abs(xs))
        d1 = specfun.d1_curve(xs, k, cfg.trunc)
        d2 = specfun.d2_curve(xs, k, cfg.trunc)

        phi_ang = np.where(xs >= 0, 0.0, math.pi)
        e_term = specfun.disturb_factor_E(np.abs(xs), k, 0.0, phi_ang, cfg.trunc)
        m_term = specfun.multi_factor_M(np.abs(xs), k, cfg.trunc)
        single = np.abs(j0 + 3.0 / math.pi * e_term)
        multi = np.abs(j0 ** 2 + 3.0 / math.pi * m_term)
        single = single / single.max()
        multi = multi / multi.max()

        n_terms = cfg.trunc.max_order if cfg.trunc is not None else \
            specfun.default_truncation(k, float(np.abs(xs).max())).max_order
        applicable = k * np.abs(xs) > 0.25
        bound_e = np.array([specfun.sidelobe_bound_E(abs(x), k, n_terms)
                            if ok else math.nan for x, ok in zip(xs, applicable)])
        bound_m = np.array([specfun.sidelobe_bound_M(abs(x), k, n_terms)
                            if ok else math.nan for x, ok in zip(xs, applicable)])

        jobs = [
            (f"bessel1_{tag}.csv", "x,y,z", (xs, np.abs(j0), d1)),
            (f"bessel2_{tag}.csv", "x,y,z", (xs, j0 ** 2, d2)),
            (f"bessel3_{tag}.csv", "x,y,z", (xs, single, multi)),
            (f"d1_{tag}.csv", "x,value", (xs, d1)),
            (f"d2_{tag}.csv", "x,value", (xs, d2)),
            (f"bounds_{tag}.csv", "x,abs_E,abs_M,bound_E,bound_M,applicable",
             (xs, np.abs(e_term), np.abs(m_term), bound_e, bound_m,
              applicable.astype(float))),
        ]
        for name, header, cols in jobs:
            path = cfg.output_dir / name
            _write_xyz(path, header, cols)
            written.append(path)
    return written


def cmd_score(cfg: RunConfig) -> list:
    """Score every configured map against the scene truth."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    truth = truth_mask(cfg.scene, cfg.grid)
    centers = [s.center for s in cfg.scene.scatterers]
    written = []
    summary_rows = []
    for freq in cfg.frequencies:
        lam_half = math.pi / wavenumber(freq, cfg.scene.medium)
        if len(centers) >= 2:
            pairwise = all(
                resolvable(a, b, freq, cfg.scene.medium)
                for i, a in enumerate(centers) for b in centers[i + 1:])
            res_flag = "true" if pairwise else "false"
        else:
            res_flag = "na"
        for kind, m, tag in _kind_jobs(cfg):
            stem = f"{kind}_{_ghz_tag(freq)}_{tag}"
            map_path = cfg.output_dir / f"{stem}.csv"
            if not map_path.is_file():
                raise OSM2DError(
                    f"indicator map not found: expected {map_path} (run image first)")
            imap = load_map_csv(map_path)
            if imap.grid != cfg.grid:
                raise OSM2DError(
                    f"grid mismatch between {map_path} and configured grid")
            norm = normalize(imap)
            sweep = jaccard_sweep(norm, truth, DEFAULT_THRESHOLDS)
            sweep_path = cfg.output_dir / f"jaccard_{stem}.csv"
            _write_xyz(sweep_path, "threshold,jaccard",
                       ([t for t, _ in sweep], [j for _, j in sweep]))
            written.append(sweep_path)

            peaks = find_peaks(norm, min_separation=lam_half,
                               min_prominence=DEFAULT_PROMINENCE)
            try:
                loc_err = f"{localization_error(peaks, cfg.scene):.6g}"
            except OSM2DError:
                loc_err = "nan"
            summary_rows.append((stem, f"{freq.f / 1e9:g}", str(len(peaks)),
                                 loc_err, res_flag,
                                 f"{max(j for _, j in sweep):.6g}"))
    summary = cfg.output_dir / "summary.csv"
    with open(summary, "w", encoding="utf-8") as fh:
        fh.write("map,freq_ghz,peak_count,localization_error_m,resolvable,max_jaccard\n")
        for row in summary_rows:
            fh.write(",".join(row) + "\n")
    written.append(summary)
    return written


def cmd_parse(cfg: RunConfig) -> list:
    """Ingest a Fresnel record file into per-frequency measurement CSVs."""
    if not cfg.input_file:
        raise ConfigError("input.file: required for the parse command")
    path = Path(cfg.input_file)
    if not path.is_file():
        raise OSM2DError(f"input file not found: {path}")
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    records = parse_file(path, cfg.colmap)
    written = []
    for freq in cfg.frequencies:
        ms = assemble(records, cfg.geometry, freq, angle_tol=cfg.angle_tol,
                      conjugate=cfg.conjugate)
        out = _meas_path(cfg, freq)
        save_measurements_csv(ms, out)
        written.append(out)
    return written


_COMMANDS = {
    "synth": cmd_synth,
    "image": cmd_image,
    "analyze": cmd_analyze,
    "score": cmd_score,
    "parse": cmd_parse,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osm2d",
        description="Orthogonality sampling imaging for limited-aperture "
                    "Fresnel-type scattering data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0].lower())
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--freq", help="comma-separated frequencies in GHz (override)")
        p.add_argument("--sources", help="comma-separated 1-based emitter indices")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="noise seed")
        p.add_argument("--noise", type=float, help="relative noise level")
        p.add_argument("--colmap", help="column map, e.g. tx=0,rx=1,freq=2,"
                       "re_tot=3,im_tot=4,re_inc=5,im_inc=6,unit=GHz")
        if name == "parse":
            p.add_argument("--file", help="Fresnel record file to ingest")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        written = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSM2DError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
