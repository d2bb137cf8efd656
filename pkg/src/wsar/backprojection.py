"""Pixel-domain back-projection image formation."""

from __future__ import annotations

import numpy as np

from .core import C, ApertureTrack, ComplexImage, ImageGrid, SignalCube
from .parallel import blocks, run_blocks
from .rangecomp import RangeProfileCube, canonical_window, window_vector

REFERENCE_MAX_PIXELS = 64 * 64


def carrier(R, f_c: float) -> np.ndarray:
    """Carrier-phase compensation kernel exp(-j 4 pi f_c R / c)."""
    return np.exp(-1j * ((4.0 * np.pi * f_c / C) * R))


def interp_profile(row: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """Linear interpolation of a profile row at fractional bins; zero outside."""
    if row.size < 2:
        return np.zeros(fb.shape, dtype=complex)
    i0 = np.floor(fb)
    frac = fb - i0
    i0 = i0.astype(np.int64)
    ok = (i0 >= 0) & (i0 < row.size - 1)
    i0 = np.where(ok, i0, 0)
    v = row[i0] * (1.0 - frac) + row[i0 + 1] * frac
    return np.where(ok, v, 0.0)


def look(profiles: RangeProfileCube, eta: int, R: np.ndarray) -> np.ndarray:
    """Range profile of slow-time row ``eta`` evaluated at slant ranges ``R``."""
    fb = R * (1.0 / profiles.range_per_bin) - profiles.bin_start
    return interp_profile(profiles.data[eta], fb)


def check_grid_range(profiles: RangeProfileCube, track: ApertureTrack, grid: ImageGrid) -> None:
    xs, ys = grid.xs(), grid.ys()
    far_x = max(abs(xs[0] - track.x[-1]), abs(xs[-1] - track.x[0]))
    r_far = float(np.hypot(far_x, ys[-1]))
    if r_far > profiles.params.max_unambiguous_range():
        raise ValueError("grid extends beyond the unambiguous range window")


def grid_range_span(track: ApertureTrack, grid: ImageGrid, margin: float = 0.01) -> tuple[float, float]:
    """Slant-range interval seen by any track position over the grid."""
    xs, ys = grid.xs(), grid.ys()
    near_x = 0.0 if (xs[-1] >= track.x[0] and xs[0] <= track.x[-1]) else min(
        abs(xs[0] - track.x[-1]), abs(xs[-1] - track.x[0])
    )
    far_x = max(abs(xs[0] - track.x[-1]), abs(xs[-1] - track.x[0]))
    return max(float(np.hypot(near_x, ys[0])) - margin, 0.0), float(np.hypot(far_x, ys[-1])) + margin


def image_window_label(range_window: str, xrange_window: str) -> str:
    if range_window == xrange_window:
        return range_window
    return f"{range_window}/{xrange_window}"


def backproject(
    profiles: RangeProfileCube,
    track: ApertureTrack,
    grid: ImageGrid,
    xrange_window: str = "rectangular",
    normalize: bool = True,
    threads: int | None = None,
) -> ComplexImage:
    """Coherent sum over the aperture of each look sampled at the pixel range.

    ``image[p] = sum_eta w_eta * P_eta(R_p(eta)) * exp(-j 4 pi f_c R_p(eta) / c)``

    The profile is linearly interpolated at the fractional bin of the pixel's
    beat frequency; pixels whose range falls outside the kept bins get no
    contribution from that look.  With ``normalize`` the result is divided by
    the combined coherent gain of the range and cross-range windows so a unit
    target has the same peak in every look.  Summation runs in slow-time order
    per pixel, independent of the thread count.
    """
    if profiles.n_slow != len(track):
        raise ValueError(f"{profiles.n_slow} profiles but {len(track)} track positions")
    check_grid_range(profiles, track, grid)
    xw = canonical_window(xrange_window)
    w = window_vector(xw, len(track))
    tapered = xw != "rectangular"
    f_c = profiles.params.f_c
    X, Y = grid.mesh()
    px, py = X.ravel(), Y.ravel()
    xs = track.x

    def work(s: slice) -> np.ndarray:
        bx, by = px[s], py[s]
        acc = np.zeros(bx.size, dtype=complex)
        for eta in range(len(track)):
            R = np.hypot(bx - xs[eta], by)
            term = look(profiles, eta, R) * carrier(R, f_c)
            if tapered:
                term *= w[eta]
            acc += term
        return acc

    data = np.concatenate(run_blocks(work, blocks(px.size), threads))
    if normalize:
        data /= profiles.coherent_gain * float(np.mean(w))
    return ComplexImage(data.reshape(grid.shape), grid, image_window_label(profiles.window, xw))


def backproject_reference(cube: SignalCube, grid: ImageGrid) -> ComplexImage:
    """Brute-force time-domain matched filter, no FFT and no interpolation.

    ``image[p] = sum_eta sum_k s(t_k, eta) * conj(exp(j 4 pi (f_c + beta t_k) R_p(eta) / c))``

    Test oracle only: cost grows with pixels x positions x fast-time samples,
    so grids are limited to 64 x 64.
    """
    if grid.n_range * grid.n_xrange > REFERENCE_MAX_PIXELS:
        raise ValueError("reference back-projection is limited to 64x64 grids")
    p = cube.params
    freq = p.f_c + p.beta * p.fast_time()
    X, Y = grid.mesh()
    px, py = X.ravel(), Y.ravel()
    chunk = max(1, 2**21 // p.n_fast)
    out = np.zeros(px.size, dtype=complex)
    for s in range(0, px.size, chunk):
        bx, by = px[s : s + chunk], py[s : s + chunk]
        for eta, x_eta in enumerate(cube.track.x):
            R = np.hypot(bx - x_eta, by)
            kernel = np.exp(-1j * (4.0 * np.pi / C) * np.outer(R, freq))
            out[s : s + chunk] += kernel @ cube.data[eta]
    return ComplexImage(out.reshape(grid.shape), grid, "rectangular")
