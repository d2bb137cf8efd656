"""Impulse-response measurements on formed images."""

from __future__ import annotations

import numpy as np

from .core import ComplexImage
from .rangecomp import profile_metrics


def peak_index(img: ComplexImage) -> tuple[int, int]:
    return tuple(int(v) for v in np.unravel_index(np.argmax(np.abs(img.data)), img.data.shape))


def impulse_response(img: ComplexImage, at: tuple[int, int] | None = None) -> dict:
    """-3 dB widths (m) and peak side-lobes (dB) along cuts through the peak."""
    i, j = peak_index(img) if at is None else at
    rng = profile_metrics(img.data[:, j])
    xr = profile_metrics(img.data[i, :])
    g = img.grid
    return {
        "peak_row": i,
        "peak_col": j,
        "peak_x": float(g.xs()[j]),
        "peak_y": float(g.ys()[i]),
        "range_width": rng["width_3db_bins"] * g.dy,
        "xrange_width": xr["width_3db_bins"] * g.dx,
        "range_psl_db": rng["peak_sidelobe_db"],
        "xrange_psl_db": xr["peak_sidelobe_db"],
        "range_nulls": (rng["null_left"], rng["null_right"]),
        "xrange_nulls": (xr["null_left"], xr["null_right"]),
    }


def mainlobe_mask(img: ComplexImage, at: tuple[int, int] | None = None) -> np.ndarray:
    """Null-to-null rectangle around the peak, from the two axis cuts."""
    m = impulse_response(img, at)
    (r0, r1), (c0, c1) = m["range_nulls"], m["xrange_nulls"]
    mask = np.zeros(img.data.shape, dtype=bool)
    mask[r0 : r1 + 1, c0 : c1 + 1] = True
    return mask


def islr_db(img: ComplexImage, mask: np.ndarray) -> float:
    """Integrated side-lobe ratio: energy outside ``mask`` over energy inside."""
    pw = np.abs(img.data) ** 2
    return float(10.0 * np.log10(pw[~mask].sum() / pw[mask].sum()))
