"""Domain types and geometry shared by every processing stage.

Coordinates are 2D: ``x`` is cross-range (along the aperture line) and ``y``
is down-range.  The radar phase centres all sit on ``y = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

C = 299792458.0  # m/s


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RadarParams:
    """FMCW sweep parameters.

    ``f_c`` is the frequency transmitted at the centre of the fast-time axis,
    so the sweep covers ``f_c - b/2 .. f_c + b/2``.
    """

    f_c: float
    b: float
    T: float
    f_s: float
    beta: float = field(init=False)
    c: float = field(init=False, default=C)

    def __post_init__(self):
        for name in ("f_c", "b", "T", "f_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        object.__setattr__(self, "beta", self.b / self.T)
        object.__setattr__(self, "c", C)
        if self.n_fast < 8:
            raise ValueError(f"f_s*T gives {self.n_fast} fast-time samples, need >= 8")

    @property
    def n_fast(self) -> int:
        # tolerance so that T = n/f_s round-trips to exactly n samples
        return int(math.floor(self.f_s * self.T * (1.0 + 1e-12)))

    @property
    def wavelength(self) -> float:
        return C / self.f_c

    @property
    def f_start(self) -> float:
        return self.f_c - 0.5 * self.b

    def fast_time(self) -> np.ndarray:
        """Fast-time sample instants, symmetric about t = 0."""
        n = self.n_fast
        return (np.arange(n) - 0.5 * (n - 1)) / self.f_s

    def beat_frequency(self, r):
        return 2.0 * np.asarray(r) * self.beta / C

    def max_unambiguous_range(self) -> float:
        return 0.5 * self.f_s * C / (2.0 * self.beta)


@dataclass(frozen=True)
class PointTarget:
    sigma: complex
    x: float
    y: float
    rcs_slope: float = 0.0

    def __post_init__(self):
        s = complex(self.sigma)
        if not (math.isfinite(s.real) and math.isfinite(s.imag)):
            raise ValueError("target reflectivity must be finite")
        if not self.y > 0:
            raise ValueError(f"target must lie in front of the aperture (y > 0), got y={self.y}")
        object.__setattr__(self, "sigma", s)


@dataclass(frozen=True, eq=False)
class ApertureTrack:
    """Radar phase-centre positions along ``y = 0``, one per slow-time index."""

    x: np.ndarray
    spacing: float

    def __post_init__(self):
        x = _frozen(self.x)
        object.__setattr__(self, "x", x)
        if x.ndim != 1 or x.size < 1:
            raise ValueError("track needs at least one position")
        if x.size > 1:
            step = np.diff(x)
            if np.any(step <= 0):
                raise ValueError("track positions must be strictly increasing")
            if np.max(np.abs(step - self.spacing)) >= 1e-12:
                raise ValueError("track positions are not uniformly spaced")

    @classmethod
    def uniform(cls, start_x: float, spacing: float, count: int) -> "ApertureTrack":
        if count < 1 or spacing <= 0:
            raise ValueError("need count >= 1 and spacing > 0")
        return cls(start_x + spacing * np.arange(count), spacing)

    @classmethod
    def centered(cls, length: float, spacing: float, center_x: float = 0.0) -> "ApertureTrack":
        count = int(math.floor(length / spacing + 1e-9)) + 1
        start = center_x - 0.5 * spacing * (count - 1)
        return cls.uniform(start, spacing, count)

    def __len__(self) -> int:
        return self.x.size

    @property
    def length(self) -> float:
        return float(self.x[-1] - self.x[0])

    @property
    def center(self) -> float:
        return float(0.5 * (self.x[0] + self.x[-1]))

    def shifted(self, dx: float) -> "ApertureTrack":
        return ApertureTrack(self.x + dx, self.spacing)


@dataclass(frozen=True)
class ImageGrid:
    """Regular pixel grid; pixel ``[i, j]`` sits at ``(x0 + j*dx, y0 + i*dy)``."""

    x0: float
    y0: float
    dx: float
    dy: float
    n_range: int
    n_xrange: int

    def __post_init__(self):
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacing must be positive")
        if self.n_range < 1 or self.n_xrange < 1:
            raise ValueError("grid must have at least one pixel")
        if not self.y0 > 0:
            raise ValueError("grid must lie in front of the aperture (y > 0)")

    @classmethod
    def centered(cls, x_c, y_c, dx, dy, n_range, n_xrange) -> "ImageGrid":
        return cls(x_c - dx * (n_xrange // 2), y_c - dy * (n_range // 2), dx, dy, n_range, n_xrange)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_range, self.n_xrange)

    def xs(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_xrange)

    def ys(self) -> np.ndarray:
        return self.y0 + self.dy * np.arange(self.n_range)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel coordinates, each of shape (n_range, n_xrange)."""
        return np.meshgrid(self.xs(), self.ys())

    def index_of(self, x: float, y: float) -> tuple[int, int]:
        """Nearest pixel (row, col) to a point, clipped to the grid."""
        i = int(round((y - self.y0) / self.dy))
        j = int(round((x - self.x0) / self.dx))
        return min(max(i, 0), self.n_range - 1), min(max(j, 0), self.n_xrange - 1)

    def shifted(self, dx: float) -> "ImageGrid":
        return ImageGrid(self.x0 + dx, self.y0, self.dx, self.dy, self.n_range, self.n_xrange)

    def same_as(self, other: "ImageGrid") -> bool:
        return self == other


@dataclass(frozen=True, eq=False)
class SignalCube:
    """Complex beat samples, shape (n_slow, n_fast)."""

    data: np.ndarray
    params: RadarParams
    track: ApertureTrack

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.shape != (len(self.track), self.params.n_fast):
            raise ValueError(
                f"cube shape {d.shape} does not match "
                f"(n_slow={len(self.track)}, n_fast={self.params.n_fast})"
            )
        object.__setattr__(self, "data", d)

    @property
    def n_slow(self) -> int:
        return self.data.shape[0]

    @property
    def n_fast(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class ComplexImage:
    data: np.ndarray
    grid: ImageGrid
    window: str | None = None

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.shape != self.grid.shape:
            raise ValueError(f"image shape {d.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "data", d)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.data)


def slant_range(track: ApertureTrack, eta: int, p) -> float:
    """Distance from phase centre ``eta`` to the point ``p = (x, y)``."""
    if not 0 <= eta < len(track):
        raise IndexError(f"slow-time index {eta} outside track of length {len(track)}")
    return math.hypot(p[0] - track.x[eta], p[1])


def theoretical_range_resolution(params: RadarParams) -> float:
    return C / (2.0 * params.b)


def theoretical_xrange_resolution(params: RadarParams, L: float, R: float) -> float:
    if L <= 0 or R <= 0:
        raise ValueError("aperture length and range must be positive")
    return params.wavelength * R / (2.0 * L)


# Parameters of the W-band experiments: 78-102 GHz band, 5 ms chirp, 5 MHz ADC.
REFERENCE_PARAMS = dict(f_c=90e9, b=24e9, T=5e-3, f_s=5e6)
APERTURE_LENGTH = 0.4


def reference_params() -> RadarParams:
    return RadarParams(**REFERENCE_PARAMS)


def default_track(params: RadarParams, length: float = APERTURE_LENGTH, center_x: float = 0.0) -> ApertureTrack:
    """Quarter-wavelength sampled aperture (481 positions over 0.4 m at 90 GHz)."""
    return ApertureTrack.centered(length, params.wavelength / 4.0, center_x)
