"""Binary containers (WSAR, WIMG), image export (PGM, PPM), CSV and config files."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ApertureTrack, ComplexImage, ImageGrid, PointTarget, RadarParams, SignalCube

VERSION = 1
_WSAR_HEAD = struct.Struct("<4sIQQdddddd")
_WIMG_HEAD = struct.Struct("<4sIQQdddd")


class FormatError(ValueError):
    pass


def write_wsar(path, cube: SignalCube) -> None:
    p, tr = cube.params, cube.track
    head = _WSAR_HEAD.pack(b"WSAR", VERSION, cube.n_slow, cube.n_fast, p.f_c, p.b, p.T, p.f_s, tr.x[0], tr.spacing)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(cube.data, dtype="<c16").tobytes())


def read_wsar(path) -> SignalCube:
    raw = Path(path).read_bytes()
    if len(raw) < _WSAR_HEAD.size:
        raise FormatError(f"{path}: truncated WSAR header")
    magic, ver, n_slow, n_fast, f_c, b, T, f_s, x0, d = _WSAR_HEAD.unpack_from(raw)
    if magic != b"WSAR":
        raise FormatError(f"{path}: not a WSAR file")
    if ver != VERSION:
        raise FormatError(f"{path}: unsupported WSAR version {ver}")
    body = raw[_WSAR_HEAD.size :]
    if len(body) != 16 * n_slow * n_fast:
        raise FormatError(f"{path}: expected {n_slow}x{n_fast} samples")
    data = np.frombuffer(body, dtype="<c16").reshape(n_slow, n_fast).astype(complex)
    params = RadarParams(f_c=f_c, b=b, T=T, f_s=f_s)
    if params.n_fast != n_fast:
        raise FormatError(f"{path}: header n_fast={n_fast} disagrees with f_s*T")
    return SignalCube(data, params, ApertureTrack.uniform(x0, d, n_slow))


def write_wimg(path, img: ComplexImage) -> None:
    g = img.grid
    head = _WIMG_HEAD.pack(b"WIMG", VERSION, g.n_range, g.n_xrange, g.x0, g.y0, g.dx, g.dy)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(img.data, dtype="<c16").tobytes())


def read_wimg(path) -> ComplexImage:
    raw = Path(path).read_bytes()
    if len(raw) < _WIMG_HEAD.size:
        raise FormatError(f"{path}: truncated WIMG header")
    magic, ver, nr, nx, x0, y0, dx, dy = _WIMG_HEAD.unpack_from(raw)
    if magic != b"WIMG":
        raise FormatError(f"{path}: not a WIMG file")
    if ver != VERSION:
        raise FormatError(f"{path}: unsupported WIMG version {ver}")
    body = raw[_WIMG_HEAD.size :]
    if len(body) != 16 * nr * nx:
        raise FormatError(f"{path}: expected {nr}x{nx} pixels")
    data = np.frombuffer(body, dtype="<c16").reshape(nr, nx).astype(complex)
    return ComplexImage(data, ImageGrid(x0, y0, dx, dy, nr, nx))


# Display files put far range at the top row.


def write_pgm(path, db: np.ndarray, dynamic_range: float = 50.0) -> None:
    """16-bit binary PGM of a dB field clipped to ``[-dynamic_range, 0]``."""
    v = (np.clip(np.asarray(db, float), -dynamic_range, 0.0) + dynamic_range) / dynamic_range
    pix = np.round(v * 65535).astype(">u2")[::-1]
    h, w = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode())
        fh.write(pix.tobytes())


def _read_netpbm(path, magic: bytes, channels: int):
    raw = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        end = pos
        while not raw[end : end + 1].isspace():
            end += 1
        tokens.append(raw[pos:end])
        pos = end
    if tokens[0] != magic:
        raise FormatError(f"{path}: expected {magic.decode()} file")
    w, h, maxval = (int(t) for t in tokens[1:])
    pos += 1
    dtype = ">u2" if maxval > 255 else "u1"
    shape = (h, w, channels) if channels > 1 else (h, w)
    pix = np.frombuffer(raw[pos:], dtype=dtype).reshape(shape)
    return pix[::-1], maxval


def read_pgm(path, dynamic_range: float = 50.0) -> np.ndarray:
    """Inverse of :func:`write_pgm`, returning the (quantised) dB field."""
    pix, maxval = _read_netpbm(path, b"P5", 1)
    return pix.astype(float) / maxval * dynamic_range - dynamic_range


def write_ppm(path, rgb: np.ndarray) -> None:
    rgb = np.asarray(rgb, dtype=np.uint8)[::-1]
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(rgb).tobytes())


def read_ppm(path) -> np.ndarray:
    pix, _ = _read_netpbm(path, b"P6", 3)
    return pix.copy()


def write_point_cloud(path, points) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x_m", "y_m", "intensity_db"])
        for x, y, v in points:
            wr.writerow([f"{x:.9g}", f"{y:.9g}", f"{v:.6f}"])


def read_point_cloud(path) -> list[tuple[float, float, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["x_m", "y_m", "intensity_db"]:
        raise FormatError(f"{path}: missing point-cloud header")
    return [tuple(float(v) for v in r) for r in rows[1:]]


def write_profile_csv(path, ranges, profile) -> None:
    mag = np.abs(np.asarray(profile))
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag / mag.max())
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["range_m", "power_db"])
        for r, v in zip(ranges, db):
            wr.writerow([f"{r:.9g}", f"{max(v, -300.0):.6f}"])


def read_profile_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


# -- configuration ---------------------------------------------------------


class ConfigError(ValueError):
    """Malformed configuration; ``str()`` carries the line diagnostics."""


_FLOAT_KEYS = {
    "f_c", "b", "T", "f_s", "start_x", "spacing", "aperture_length", "noise_sigma",
    "antenna_q", "grid_x0", "grid_y0", "grid_dx", "grid_dy", "grid_center_x",
    "grid_center_y", "focus_range", "steer_deg", "dynamic_range", "threshold_db",
    "denoise_k", "denoise_sigma", "denoise_dt",
}
_INT_KEYS = {"count", "seed", "grid_n_range", "grid_n_xrange", "pad_factor", "m", "overlap", "denoise_steps"}
_STR_KEYS = {"window"}


@dataclass
class Config:
    values: dict = field(default_factory=dict)
    targets: list[PointTarget] = field(default_factory=list)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def params(self) -> RadarParams:
        try:
            return RadarParams(f_c=self.values["f_c"], b=self.values["b"], T=self.values["T"], f_s=self.values["f_s"])
        except KeyError as e:
            raise ConfigError(f"missing required key {e.args[0]!r}") from None
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def track(self) -> ApertureTrack:
        p = self.params()
        v = self.values
        spacing = v.get("spacing", p.wavelength / 4.0)
        if "count" in v:
            start = v.get("start_x", -0.5 * spacing * (v["count"] - 1))
            return ApertureTrack.uniform(start, spacing, v["count"])
        return ApertureTrack.centered(v.get("aperture_length", 0.4), spacing)

    def grid(self) -> ImageGrid:
        v = self.values
        dx, dy = v.get("grid_dx", 2e-3), v.get("grid_dy", 2e-3)
        nr, nx = v.get("grid_n_range", 128), v.get("grid_n_xrange", 128)
        try:
            if "grid_x0" in v or "grid_y0" in v:
                return ImageGrid(v.get("grid_x0", -dx * (nx // 2)), v["grid_y0"], dx, dy, nr, nx)
            yc = v.get("grid_center_y", self.targets[0].y if self.targets else 2.0)
            return ImageGrid.centered(v.get("grid_center_x", 0.0), yc, dx, dy, nr, nx)
        except (KeyError, ValueError) as e:
            raise ConfigError(f"bad grid definition: {e}") from None


def parse_config(text: str, source: str = "<config>") -> Config:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    ``target = x, y, re, im[, slope]`` may repeat, one line per target.
    Every problem is reported as ``source:line: message``; all are collected
    before raising.
    """
    cfg = Config()
    errors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{source}:{lineno}: expected 'key = value'")
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            if key == "target":
                parts = [float(s) for s in val.split(",")]
                if len(parts) not in (4, 5):
                    raise ValueError("target needs x,y,re,im[,slope]")
                x, y, re, im = parts[:4]
                cfg.targets.append(PointTarget(complex(re, im), x, y, parts[4] if len(parts) == 5 else 0.0))
            elif key in _FLOAT_KEYS:
                cfg.values[key] = float(val)
            elif key in _INT_KEYS:
                cfg.values[key] = int(val)
            elif key in _STR_KEYS:
                cfg.values[key] = val
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as e:
            errors.append(f"{source}:{lineno}: {e}")
    if errors:
        raise ConfigError("\n".join(errors))
    return cfg


def load_config(path) -> Config:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config ({e.strerror})") from None
    return parse_config(text, str(path))
