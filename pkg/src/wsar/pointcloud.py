from __future__ import annotations

import numpy as np
from scipy.ndimage import maximum_filter

from .core import ComplexImage


def extract_point_cloud(img: ComplexImage, threshold_db: float = 30.0, keep_intensity: bool = True):
    """Scatterer list from an image: 3x3 local maxima within ``threshold_db`` of the peak.

    Returns ``(x, y, intensity_db)`` tuples, intensity relative to the image
    peak.  With ``keep_intensity=False`` every point gets intensity 0 dB.
    """
    if not threshold_db > 0:
        raise ValueError("threshold_db must be > 0")
    mag = np.abs(img.data)
    peak = mag.max()
    if not peak > 0:
        raise ValueError("image is all zero")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag / peak)
    local = db == maximum_filter(db, size=3, mode="constant", cval=-np.inf)
    rows, cols = np.nonzero(local & (db > -threshold_db))
    xs, ys = img.grid.xs(), img.grid.ys()
    return [
        (float(xs[j]), float(ys[i]), float(db[i, j]) if keep_intensity else 0.0)
        for i, j in zip(rows, cols)
    ]
