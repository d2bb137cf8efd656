import numpy as np
import pytest

from wsar import ApertureTrack, PointTarget, RadarParams, SimulationSpec, default_track, reference_params, simulate


@pytest.fixture(scope="session")
def ref_radar():
    return reference_params()


@pytest.fixture(scope="session")
def short_params():
    # same band, 0.5 ms chirp: 2500 fast-time samples
    return RadarParams(f_c=90e9, b=24e9, T=0.5e-3, f_s=5e6)


@pytest.fixture(scope="session")
def short_track(short_params):
    return ApertureTrack.centered(0.1, short_params.wavelength / 4.0)


@pytest.fixture(scope="session")
def corner_cube(ref_radar):
    """Full-size cube: one unit target at 2.05 m on boresight."""
    return simulate(SimulationSpec(ref_radar, default_track(ref_radar), [PointTarget(1.0, 0.0, 2.05)]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPT_LINES: list[str] = []


@pytest.fixture
def accept_log(capsys):
    """Emit one acceptance line live and keep it for the end-of-run summary."""

    def log(line):
        _ACCEPT_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPT_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
