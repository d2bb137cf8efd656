import numpy as np
import pytest

from wsar.backprojection import backproject, backproject_reference, grid_range_span
from wsar.core import (
    ApertureTrack,
    ImageGrid,
    PointTarget,
    SignalCube,
    default_track,
    theoretical_range_resolution,
    theoretical_xrange_resolution,
)
from wsar.metrics import impulse_response, peak_index
from wsar.rangecomp import range_compress
from wsar.simulate import SimulationSpec, simulate


def image(params, track, scene, grid, window="rectangular", pad=4, xwindow=None, threads=None):
    cube = simulate(SimulationSpec(params, track, scene))
    prof = range_compress(cube, window, pad, grid_range_span(track, grid))
    return backproject(prof, track, grid, xwindow or window, threads=threads), prof


@pytest.fixture(scope="module")
def full_track(short_params):
    return default_track(short_params)


def test_peak_at_node_and_coherent_sum(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 1e-3, 1e-3, 21, 21)
    img, prof = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g)
    assert peak_index(img) == g.index_of(0.0, 2.05)
    per_look = np.abs(prof.data).max(axis=1).sum()
    assert np.abs(img.data).max() == pytest.approx(per_look, rel=0.01)


def test_peak_phase_matches_reflectivity(short_params, full_track):
    sigma = 0.6 * np.exp(1.1j)
    g = ImageGrid.centered(0.0, 2.05, 1e-3, 1e-3, 9, 9)
    img, _ = image(short_params, full_track, [PointTarget(sigma, 0.0, 2.05)], g)
    pk = img.data[g.index_of(0.0, 2.05)]
    assert abs(np.angle(pk / sigma)) < 1e-2


def test_empty_profiles_zero_image(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 2e-3, 2e-3, 8, 8)
    z = SignalCube(np.zeros((len(full_track), short_params.n_fast), complex), short_params, full_track)
    img = backproject(range_compress(z, "rectangular", 4, grid_range_span(full_track, g)), full_track, g)
    assert not np.any(img.data)


def test_image_widths_match_theory(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 0.5e-3, 0.5e-3, 61, 81)
    img, _ = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g)
    m = impulse_response(img)
    # -3 dB width of a sinc is 0.886 of the nominal resolution
    res_r = theoretical_range_resolution(short_params)
    res_x = theoretical_xrange_resolution(short_params, full_track.length, 2.05)
    assert m["range_width"] == pytest.approx(0.886 * res_r, rel=0.05)
    assert m["xrange_width"] == pytest.approx(0.886 * res_x, rel=0.05)


def test_hamming_far_floor(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 2e-3, 2e-3, 64, 64)
    img, _ = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g, "hamming")
    mag = np.abs(img.data)
    X, Y = g.mesh()
    res_r = theoretical_range_resolution(short_params)
    res_x = theoretical_xrange_resolution(short_params, full_track.length, 2.05)
    far = (np.abs(X) > 5 * res_x) | (np.abs(Y - 2.05) > 5 * res_r)
    assert 20 * np.log10(mag[far].max() / mag.max()) <= -35.0


def test_normalised_hamming_peak_matches_rect(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 1e-3, 1e-3, 5, 5)
    rect, _ = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g)
    ham, _ = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g, "hamming")
    assert np.abs(ham.data).max() == pytest.approx(np.abs(rect.data).max(), rel=0.01)
    assert ham.window == "hamming"


def test_translation_equivariance(short_params, full_track):
    scene = [PointTarget(1.0, 0.004, 2.05), PointTarget(0.5j, -0.01, 2.07)]
    g = ImageGrid.centered(0.0, 2.06, 2e-3, 2e-3, 16, 16)
    dx = 0.137
    a, _ = image(short_params, full_track, scene, g)
    moved = [PointTarget(t.sigma, t.x + dx, t.y) for t in scene]
    b, _ = image(short_params, full_track.shifted(dx), moved, g.shifted(dx))
    assert np.max(np.abs(a.data - b.data)) <= 1e-6 * np.max(np.abs(a.data))


def test_scene_linearity(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 2e-3, 2e-3, 12, 12)
    ta, tb = [PointTarget(1.0, 0.0, 2.05)], [PointTarget(-0.3 + 0.2j, 0.006, 2.04)]
    a, _ = image(short_params, full_track, ta, g)
    b, _ = image(short_params, full_track, tb, g)
    ab, _ = image(short_params, full_track, ta + tb, g)
    assert np.allclose(ab.data, a.data + b.data, rtol=0, atol=1e-9 * np.abs(ab.data).max())


def test_thread_invariance(short_params, full_track):
    g = ImageGrid.centered(0.0, 2.05, 1e-3, 1e-3, 72, 72)  # more than one pixel block
    a, _ = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g, threads=1)
    b, _ = image(short_params, full_track, [PointTarget(1.0, 0.0, 2.05)], g, threads=4)
    assert np.array_equal(a.data, b.data)


def test_grid_beyond_unambiguous_range(short_params, full_track):
    far = short_params.max_unambiguous_range() + 1.0
    g = ImageGrid.centered(0.0, far, 2e-3, 2e-3, 4, 4)
    cube = simulate(SimulationSpec(short_params, full_track, []))
    prof = range_compress(cube, "rectangular", 4)
    with pytest.raises(ValueError):
        backproject(prof, full_track, g)


def test_track_length_mismatch(short_params, full_track):
    cube = simulate(SimulationSpec(short_params, full_track, []))
    prof = range_compress(cube, "rectangular", 4)
    other = ApertureTrack.uniform(0.0, 1e-3, 3)
    with pytest.raises(ValueError):
        backproject(prof, other, ImageGrid.centered(0.0, 2.0, 1e-3, 1e-3, 2, 2))


# brute-force oracle ---------------------------------------------------------------

SCENES = [
    [PointTarget(1.0, 0.0, 2.05)],
    [PointTarget(1.0, 0.0, 2.05), PointTarget(0.5j, -0.003, 2.052)],
    [PointTarget(1.0, 0.0, 2.05), PointTarget(0.5j, -0.003, 2.052), PointTarget(0.7, 0.002, 2.048)],
]


@pytest.fixture(scope="module")
def oracle_setup(ref_radar):
    track = ApertureTrack.centered(31 * ref_radar.wavelength / 4, ref_radar.wavelength / 4)
    grid = ImageGrid.centered(0.0, 2.05, 1e-3, 1e-3, 8, 8)
    return ref_radar, track, grid


@pytest.mark.parametrize("scene", SCENES, ids=["1tgt", "2tgt", "3tgt"])
def test_fast_matches_reference(oracle_setup, scene):
    p, track, grid = oracle_setup
    assert len(track) == 32
    cube = simulate(SimulationSpec(p, track, scene))
    ref = backproject_reference(cube, grid)
    fast = backproject(range_compress(cube, "rectangular", 8, grid_range_span(track, grid)), track, grid)
    k = peak_index(ref)
    assert peak_index(fast) == k
    assert abs(fast.data[k] - ref.data[k]) <= 0.02 * abs(ref.data[k])


def test_reference_zero_and_linearity(oracle_setup):
    p, track, grid = oracle_setup
    z = SignalCube(np.zeros((len(track), p.n_fast), complex), p, track)
    assert not np.any(backproject_reference(z, grid).data)
    a = backproject_reference(simulate(SimulationSpec(p, track, SCENES[0])), grid).data
    b = backproject_reference(simulate(SimulationSpec(p, track, SCENES[1][1:])), grid).data
    ab = backproject_reference(simulate(SimulationSpec(p, track, SCENES[1])), grid).data
    assert np.allclose(ab, a + b, rtol=0, atol=1e-9 * np.abs(ab).max())


def test_reference_grid_limit(oracle_setup):
    p, track, _ = oracle_setup
    z = SignalCube(np.zeros((len(track), p.n_fast), complex), p, track)
    with pytest.raises(ValueError):
        backproject_reference(z, ImageGrid.centered(0.0, 2.0, 1e-3, 1e-3, 65, 64))
