"""Raw FMCW beat-signal synthesis for point-target scenes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import C, ApertureTrack, PointTarget, RadarParams, SignalCube
from .parallel import blocks, run_blocks

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class SimulationSpec:
    params: RadarParams
    track: ApertureTrack
    scene: list[PointTarget] = field(default_factory=list)
    noise_sigma: float = 0.0
    rng_seed: int = 0
    antenna_q: float = 0.0

    def __post_init__(self):
        if not self.noise_sigma >= 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.antenna_q < 0:
            raise ValueError("antenna_q must be >= 0")
        object.__setattr__(self, "scene", list(self.scene))


def _row_rng(seed: int, row: int) -> np.random.Generator:
    # Philox is counter based: each slow-time row owns a disjoint counter range
    counter = np.array([0, 0, 0, row], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64, counter=counter))


def _noise_row(seed: int, row: int, n: int, sigma: float) -> np.ndarray:
    z = _row_rng(seed, row).standard_normal((2, n))
    return (sigma / np.sqrt(2.0)) * (z[0] + 1j * z[1])


def _check_scene(params: RadarParams, track: ApertureTrack, scene) -> None:
    r_max = 0.0
    for tgt in scene:
        if not tgt.y > 0:
            raise ValueError("target must lie in front of the aperture (y > 0)")
        r_max = max(r_max, float(np.max(np.hypot(tgt.x - track.x, tgt.y))))
    if 2.0 * r_max * params.beta / C > 0.5 * params.f_s:
        raise ValueError("range exceeds unambiguous window")


def _signal_rows(spec: SimulationSpec, rows: slice) -> np.ndarray:
    p = spec.params
    t = p.fast_time()
    freq = p.f_c + p.beta * t  # instantaneous transmit frequency per sample
    xs = spec.track.x[rows]
    out = np.zeros((xs.size, t.size), dtype=complex)
    for r, x_eta in enumerate(xs):
        row = out[r]
        for tgt in spec.scene:
            R = np.hypot(tgt.x - x_eta, tgt.y)
            amp = tgt.sigma
            if spec.antenna_q:
                amp = amp * (tgt.y / R) ** spec.antenna_q
            term = np.exp(1j * (4.0 * np.pi * R / C) * freq)
            if tgt.rcs_slope:
                term *= amp * (1.0 + tgt.rcs_slope * (freq - p.f_c))
            else:
                term *= amp
            row += term
    return out


def simulate(spec: SimulationSpec, threads: int | None = None) -> SignalCube:
    """Beat-signal cube for every target in the scene plus receiver noise.

    Each sample is ``sum_l sigma_l * exp(j 4 pi (f_c + beta t) R_l / c)`` with
    ``t`` on the centred fast-time axis.  The envelope is taken as covering the
    whole chirp and the residual video phase is not modelled.
    """
    p, track = spec.params, spec.track
    _check_scene(p, track, spec.scene)
    n_slow = len(track)
    parts = run_blocks(lambda s: _signal_rows(spec, s), blocks(n_slow, 32), threads)
    data = np.concatenate(parts, axis=0) if parts else np.zeros((0, p.n_fast), complex)
    cube = SignalCube(data, p, track)
    if spec.noise_sigma > 0:
        cube = add_noise(cube, spec.noise_sigma, spec.rng_seed, threads=threads)
    return cube


def add_noise(cube: SignalCube, sigma: float, seed: int, threads: int | None = None) -> SignalCube:
    """Add circular complex Gaussian noise with E|n|^2 = sigma^2."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return SignalCube(cube.data.copy(), cube.params, cube.track)
    n = cube.n_fast

    def work(s: slice):
        return np.stack([_noise_row(seed, r, n, sigma) for r in range(s.start, s.stop)])

    noise = np.concatenate(run_blocks(work, blocks(cube.n_slow, 32), threads), axis=0)
    return SignalCube(cube.data + noise, cube.params, cube.track)
