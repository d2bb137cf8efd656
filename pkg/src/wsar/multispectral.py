"""Three sub-band false-colour imaging."""

from __future__ import annotations

import numpy as np

from .core import ComplexImage, RadarParams, SignalCube

N_BANDS = 3


def split_subbands(cube: SignalCube) -> list[SignalCube]:
    """Cut every fast-time row into three equal consecutive segments.

    Segment ``k`` sees the sweep from ``f_start + k b/3`` to ``f_start + (k+1) b/3``,
    so it is a cube in its own right with bandwidth ``b/3`` and a carrier equal
    to the transmit frequency at the segment's centre.  Up to two trailing
    samples are dropped.
    """
    p = cube.params
    n = cube.n_fast
    if n < N_BANDS:
        raise ValueError("need at least 3 fast-time samples")
    seg = n // N_BANDS
    t = p.fast_time()
    out = []
    for k in range(N_BANDS):
        lo = k * seg
        # fast-time instant that becomes t = 0 on the segment's centred axis
        t0 = 0.5 * (t[lo] + t[lo + seg - 1])
        sub = RadarParams(f_c=p.f_c + p.beta * t0, b=p.beta * seg / p.f_s, T=seg / p.f_s, f_s=p.f_s)
        out.append(SignalCube(cube.data[:, lo : lo + seg].copy(), sub, cube.track))
    return out


def normalized_channels(images, enhance: bool = False) -> np.ndarray:
    """Stack of per-channel max-normalised magnitudes, shape (rows, cols, 3).

    ``enhance`` applies a 2nd-98th percentile contrast stretch per channel.
    """
    images = list(images)
    if len(images) != N_BANDS:
        raise ValueError("need exactly three sub-band images")
    grid = images[0].grid
    if any(im.grid != grid for im in images[1:]):
        raise ValueError("sub-band images must share the same grid")
    chans = []
    for im in images:
        v = np.abs(im.data)
        top = v.max()
        v = v / top if top > 0 else np.zeros_like(v)
        if enhance:
            lo, hi = np.percentile(v, [2.0, 98.0])
            if hi > lo:
                v = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
        chans.append(v)
    return np.stack(chans, axis=-1)


def composite_rgb(img_r, img_g, img_b, enhance: bool = False) -> np.ndarray:
    """8-bit RGB composite, low band red, mid green, high band blue.

    Displayed as ``1 - v`` so a strong frequency-flat scatterer comes out dark.
    """
    v = normalized_channels([img_r, img_g, img_b], enhance)
    return np.round(255.0 * (1.0 - v)).astype(np.uint8)
