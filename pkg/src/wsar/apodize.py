"""Two-look apodization: a rectangular look combined with a Hamming look.

Both looks are expected in unit-target-peak scaling (``backproject`` divides
by the window coherent gain), so the minimum compares like with like and the
main lobe of the rectangular look survives intact.
"""

from __future__ import annotations

import numpy as np

from .core import ComplexImage


def _check_pair(img_rect: ComplexImage, img_ham: ComplexImage) -> None:
    if img_rect.grid != img_ham.grid:
        raise ValueError("apodization looks must share the same grid")
    if img_rect.window not in (None, "rectangular"):
        raise ValueError(f"first look must be the unwindowed one, got window={img_rect.window!r}")
    if img_ham.window == "rectangular" and img_rect.window == "rectangular" and img_ham is not img_rect:
        raise ValueError("second look must be tapered, got two rectangular looks")


def dual_apodization(img_rect: ComplexImage, img_ham: ComplexImage) -> ComplexImage:
    """Per-pixel minimum magnitude of the two looks, phase of the rectangular look."""
    _check_pair(img_rect, img_ham)
    r, h = img_rect.data, img_ham.data
    ar = np.abs(r)
    mag = np.minimum(ar, np.abs(h))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(ar > 0, r * (mag / ar), 0.0)
    return ComplexImage(out, img_rect.grid, "dual")


def _component_min(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sa = np.sign(a)
    return np.where(sa == np.sign(b), sa * np.minimum(np.abs(a), np.abs(b)), 0.0)


def complex_dual_apodization(img_rect: ComplexImage, img_ham: ComplexImage) -> ComplexImage:
    """Real and imaginary parts handled separately.

    A component is zeroed where the two looks disagree in sign, otherwise it
    takes the smaller magnitude with the shared sign.
    """
    _check_pair(img_rect, img_ham)
    r, h = img_rect.data, img_ham.data
    out = _component_min(r.real, h.real) + 1j * _component_min(r.imag, h.imag)
    return ComplexImage(out, img_rect.grid, "cda")
