"""``wsar`` command-line front end.

Exit codes: 0 success, 2 malformed or unreadable config, 3 stage contract
violation (bad input file, inconsistent geometry, invalid stage chain).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .apodize import complex_dual_apodization, dual_apodization
from .backprojection import backproject, grid_range_span
from .core import ApertureTrack, ComplexImage, SignalCube, theoretical_range_resolution, theoretical_xrange_resolution
from .denoise import DenoiseParams, from_db_magnitude, perona_malik, to_db_magnitude
from .metrics import impulse_response
from .multispectral import composite_rgb, split_subbands
from .parallel import derive_seed, set_threads
from .pointcloud import extract_point_cloud
from .rangecomp import profile_metrics, range_compress
from .simulate import SimulationSpec, simulate
from .subarray import SubarraySpec, default_noise_region, measure_snr_gain, snr_db, subarray_image

EXIT_CONFIG = 2
EXIT_CONTRACT = 3

CORE_STAGES = ("simulate", "compress", "backproject")
OPTIONAL_STAGES = ("apodize", "denoise", "multispectral", "subarray")
ALL_STAGES = CORE_STAGES + OPTIONAL_STAGES + ("export",)


class StageError(ValueError):
    pass


def emit(**metrics) -> None:
    for k, v in metrics.items():
        if isinstance(v, float):
            print(f"{k}={v:.6g}")
        else:
            print(f"{k}={v}")


def sim_spec(cfg: io.Config) -> SimulationSpec:
    params = cfg.params()
    try:
        track = cfg.track()
    except ValueError as e:
        raise io.ConfigError(f"bad track definition: {e}") from None
    seed = cfg.get("seed", 0)
    return SimulationSpec(
        params,
        track,
        cfg.targets,
        cfg.get("noise_sigma", 0.0),
        derive_seed(seed, "noise"),
        cfg.get("antenna_q", 0.0),
    )


def form_image(cube, grid, window="rectangular", pad=4, threads=None) -> ComplexImage:
    prof = range_compress(cube, window, pad, grid_range_span(cube.track, grid), threads)
    return backproject(prof, cube.track, grid, window, threads=threads)


def center_profile(cube, window="rectangular", pad=4, threads=None):
    """Range profile of the middle aperture position, full padded length."""
    mid = cube.n_slow // 2
    one = SignalCube(cube.data[mid : mid + 1], cube.params, ApertureTrack.uniform(cube.track.x[mid], 1.0, 1))
    prof = range_compress(one, window, pad, None, threads)
    return prof.ranges(), prof.data[0], prof


# -- subcommands -------------------------------------------------------------


def cmd_simulate(a) -> int:
    cfg = io.load_config(a.config)
    cube = simulate(sim_spec(cfg))
    io.write_wsar(a.output, cube)
    emit(n_slow=cube.n_slow, n_fast=cube.n_fast)
    return 0


def cmd_compress(a) -> int:
    cube = io.read_wsar(a.input)
    ranges, row, prof = center_profile(cube, a.window, a.pad)
    io.write_profile_csv(a.output, ranges, row)
    m = profile_metrics(row)
    k = m["peak_bin"]
    emit(
        peak_range_m=float(ranges[k]),
        beat_frequency_hz=k * cube.params.f_s / prof.n_padded,
        width_3db_m=m["width_3db_bins"] * prof.range_per_bin,
        psl_db=m["peak_sidelobe_db"],
    )
    return 0


def cmd_backproject(a) -> int:
    cfg = io.load_config(a.config)
    cube = io.read_wsar(a.input)
    img = form_image(cube, cfg.grid(), a.window, a.pad)
    io.write_wimg(a.output, img)
    if a.pgm:
        io.write_pgm(a.pgm, to_db_magnitude(img, a.dynamic_range), a.dynamic_range)
    emit_image_metrics(img)
    return 0


def cmd_apodize(a) -> int:
    rect, ham = io.read_wimg(a.rect), io.read_wimg(a.ham)
    fn = dual_apodization if a.mode == "dual" else complex_dual_apodization
    out = fn(rect, ham)
    io.write_wimg(a.output, out)
    emit_image_metrics(out)
    return 0


def cmd_denoise(a) -> int:
    img = io.read_wimg(a.input)
    p = DenoiseParams(K=a.K, sigma_g=a.sigma_g, dt=a.dt, n_steps=a.steps)
    db = perona_malik(to_db_magnitude(img, a.dynamic_range), p)
    io.write_wimg(a.output, from_db_magnitude(db, img))
    if a.pgm:
        io.write_pgm(a.pgm, db, a.dynamic_range)
    return 0


def multispectral_rgb(cube, grid, pad=4, enhance=False, threads=None) -> np.ndarray:
    imgs = [form_image(c, grid, "rectangular", pad, threads) for c in split_subbands(cube)]
    return composite_rgb(*imgs, enhance=enhance)


def cmd_multispectral(a) -> int:
    cfg = io.load_config(a.config)
    cube = io.read_wsar(a.input)
    io.write_ppm(a.output, multispectral_rgb(cube, cfg.grid(), a.pad, a.enhance))
    return 0


def subarray_from(cfg: io.Config, a) -> SubarraySpec:
    def pick(name, key, default):
        v = getattr(a, name, None)
        return v if v is not None else cfg.get(key, default)

    return SubarraySpec(
        pick("m", "m", 10),
        pick("overlap", "overlap", 9),
        pick("steer", "steer_deg", 0.0),
        pick("focus_range", "focus_range", 2.05),
    )


def cmd_subarray(a) -> int:
    cfg = io.load_config(a.config)
    cube = io.read_wsar(a.input)
    grid = cfg.grid()
    prof = range_compress(cube, "rectangular", a.pad, grid_range_span(cube.track, grid))
    img = subarray_image(prof, cube.track, grid, subarray_from(cfg, a))
    io.write_wimg(a.output, img)
    emit_image_metrics(img)
    return 0


def cmd_snr_gain(a) -> int:
    cfg = io.load_config(a.config)
    sim = sim_spec(cfg)
    gain = measure_snr_gain(sim, subarray_from(cfg, a), cfg.grid(), a.trials, cfg.get("seed", 0), pad_factor=a.pad)
    emit(snr_gain_db=gain, trials=a.trials)
    return 0


def cmd_pointcloud(a) -> int:
    img = io.read_wimg(a.input)
    pts = extract_point_cloud(img, a.threshold, not a.no_intensity)
    io.write_point_cloud(a.output, pts)
    emit(points=len(pts))
    return 0


def emit_image_metrics(img: ComplexImage, prefix: str = "") -> None:
    m = impulse_response(img)
    emit(
        **{
            f"{prefix}peak_x_m": m["peak_x"],
            f"{prefix}peak_y_m": m["peak_y"],
            f"{prefix}range_res_mm": 1e3 * m["range_width"],
            f"{prefix}xrange_res_mm": 1e3 * m["xrange_width"],
            f"{prefix}range_psl_db": m["range_psl_db"],
            f"{prefix}xrange_psl_db": m["xrange_psl_db"],
        }
    )


def parse_stages(text: str) -> list[str]:
    stages = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in stages if s not in ALL_STAGES]
    if unknown:
        raise StageError(f"unknown stage(s): {', '.join(unknown)}")
    if tuple(stages[:3]) != CORE_STAGES:
        raise StageError("pipeline must start with simulate,compress,backproject")
    rest = stages[3:]
    if "export" in rest and rest[-1] != "export":
        raise StageError("export must be the last stage")
    if len(set(rest)) != len(rest):
        raise StageError("stage listed twice")
    return stages


def cmd_pipeline(a) -> int:
    stages = parse_stages(a.stages)
    cfg = io.load_config(a.config)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pad = cfg.get("pad_factor", 4)
    dyn = cfg.get("dynamic_range", 50.0)
    grid = cfg.grid()
    sim = sim_spec(cfg)

    cube = simulate(sim)
    io.write_wsar(out / "cube.wsar", cube)

    ranges, row, prof = center_profile(cube, "rectangular", pad)
    io.write_profile_csv(out / "profile.csv", ranges, row)
    pm = profile_metrics(row)
    emit(
        profile_peak_range_m=float(ranges[pm["peak_bin"]]),
        beat_frequency_hz=pm["peak_bin"] * cube.params.f_s / prof.n_padded,
        profile_psl_db=pm["peak_sidelobe_db"],
    )

    window = cfg.get("window", "rectangular")
    img = form_image(cube, grid, window, pad)
    io.write_wimg(out / "image.wimg", img)
    emit_image_metrics(img)
    emit(
        theory_range_res_mm=1e3 * theoretical_range_resolution(cube.params),
        theory_xrange_res_mm=1e3 * theoretical_xrange_resolution(cube.params, cube.track.length, grid.ys().mean()),
    )
    if sim.noise_sigma > 0 and sim.scene:
        res_y = theoretical_range_resolution(cube.params)
        res_x = theoretical_xrange_resolution(cube.params, cube.track.length, sim.scene[0].y)
        region = default_noise_region(grid, sim.scene, res_x, res_y)
        if region.any():
            emit(image_snr_db=snr_db(img, sim.scene[0], region, res_x, res_y))
    final = img

    if "apodize" in stages:
        rect = img if window == "rectangular" else form_image(cube, grid, "rectangular", pad)
        ham = form_image(cube, grid, "hamming", pad)
        final = complex_dual_apodization(rect, ham)
        io.write_wimg(out / "apodized.wimg", final)
        emit_image_metrics(final, "cda_")
    if "denoise" in stages:
        p = DenoiseParams(
            K=cfg.get("denoise_k", 5.0),
            sigma_g=cfg.get("denoise_sigma", 1.0),
            dt=cfg.get("denoise_dt", 0.2),
            n_steps=cfg.get("denoise_steps", 50),
        )
        db = perona_malik(to_db_magnitude(final, dyn), p)
        final = from_db_magnitude(db, final)
        io.write_wimg(out / "denoised.wimg", final)
    if "multispectral" in stages:
        io.write_ppm(out / "multispectral.ppm", multispectral_rgb(cube, grid, pad))
    if "subarray" in stages:
        sprof = range_compress(cube, "rectangular", pad, grid_range_span(cube.track, grid))
        sub = subarray_image(sprof, cube.track, grid, subarray_from(cfg, argparse.Namespace()))
        io.write_wimg(out / "subarray.wimg", sub)
        emit_image_metrics(sub, "subarray_")
    if "export" in stages:
        io.write_pgm(out / "image.pgm", to_db_magnitude(final, dyn), dyn)
        pts = extract_point_cloud(final, cfg.get("threshold_db", 30.0))
        io.write_point_cloud(out / "pointcloud.csv", pts)
        emit(points=len(pts))
    return 0


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wsar", description="FMCW SAR simulation and imaging")
    ap.add_argument("--threads", type=int, default=None, help="worker threads, 0 = auto (env WSAR_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        return p

    def pad_opt(p):
        p.add_argument("--pad", type=int, default=4, choices=(1, 2, 4, 8), help="zero-padding factor")

    p = add("simulate", cmd_simulate, "synthesize a raw beat-signal cube")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)

    p = add("compress", cmd_compress, "range profile of the centre aperture position as CSV")
    p.add_argument("input")
    p.add_argument("--window", default="rectangular")
    pad_opt(p)
    p.add_argument("-o", "--output", required=True)

    p = add("backproject", cmd_backproject, "form an image by back-projection")
    p.add_argument("input")
    p.add_argument("-c", "--config", required=True, help="config holding the image grid")
    p.add_argument("--window", default="rectangular")
    pad_opt(p)
    p.add_argument("--pgm", help="also write a display image")
    p.add_argument("--dynamic-range", type=float, default=50.0)
    p.add_argument("-o", "--output", required=True)

    p = add("apodize", cmd_apodize, "combine a rectangular and a Hamming look")
    p.add_argument("--mode", choices=("dual", "cda"), default="cda")
    p.add_argument("--rect", required=True)
    p.add_argument("--ham", required=True)
    p.add_argument("-o", "--output", required=True)

    p = add("denoise", cmd_denoise, "anisotropic diffusion on the dB image")
    p.add_argument("input")
    p.add_argument("--K", type=float, default=5.0)
    p.add_argument("--sigma-g", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.2)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--dynamic-range", type=float, default=50.0)
    p.add_argument("--pgm")
    p.add_argument("-o", "--output", required=True)

    p = add("multispectral", cmd_multispectral, "three sub-band false-colour composite")
    p.add_argument("input")
    p.add_argument("-c", "--config", required=True)
    pad_opt(p)
    p.add_argument("--enhance", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = add("subarray", cmd_subarray, "overlapping sub-array image")
    p.add_argument("input")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--steer", type=float)
    p.add_argument("--focus-range", type=float)
    pad_opt(p)
    p.add_argument("-o", "--output", required=True)

    p = add("snr-gain", cmd_snr_gain, "Monte Carlo SNR gain of sub-array over plain imaging")
    p.add_argument("config")
    p.add_argument("--m", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--steer", type=float)
    p.add_argument("--focus-range", type=float)
    p.add_argument("--trials", type=int, default=50)
    pad_opt(p)

    p = add("pointcloud", cmd_pointcloud, "local-maximum point cloud as CSV")
    p.add_argument("input")
    p.add_argument("--threshold", type=float, default=30.0, help="dB below peak")
    p.add_argument("--no-intensity", action="store_true", help="constant intensity column")
    p.add_argument("-o", "--output", required=True)

    p = add("pipeline", cmd_pipeline, "run the full chain from one config")
    p.add_argument("config")
    p.add_argument("--stages", default="simulate,compress,backproject,apodize,export")
    p.add_argument("-o", "--out-dir", required=True)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    if a.threads is not None:
        set_threads(a.threads)
    try:
        return a.func(a)
    except io.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    finally:
        set_threads(None)


if __name__ == "__main__":
    sys.exit(main())
