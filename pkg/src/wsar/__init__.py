"""Simulation and imaging toolkit for FMCW synthetic aperture radar."""

from importlib import resources

from .apodize import complex_dual_apodization, dual_apodization
from .backprojection import backproject, backproject_reference
from .core import (
    C,
    ApertureTrack,
    ComplexImage,
    ImageGrid,
    PointTarget,
    RadarParams,
    SignalCube,
    default_track,
    reference_params,
    slant_range,
    theoretical_range_resolution,
    theoretical_xrange_resolution,
)
from .denoise import DenoiseParams, perona_malik, to_db_magnitude
from .multispectral import composite_rgb, split_subbands
from .pointcloud import extract_point_cloud
from .rangecomp import RangeProfileCube, profile_metrics, range_compress
from .simulate import SimulationSpec, add_noise, simulate
from .subarray import SubarrayImager, SubarraySpec, measure_snr_gain, subarray_image

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled configuration file."""
    return resources.files(__name__).joinpath("data", name)
