import numpy as np
import pytest

from wsar import data_path, io
from wsar.cli import main

DEMO = str(data_path("demo_scene.cfg"))
CORNER = str(data_path("corner_reflector.cfg"))
ALL = "simulate,compress,backproject,apodize,denoise,multispectral,subarray,export"
ARTIFACTS = [
    "cube.wsar", "profile.csv", "image.wimg", "apodized.wimg", "denoised.wimg",
    "multispectral.ppm", "subarray.wimg", "image.pgm", "pointcloud.csv",
]


def metrics(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, metrics(out.out), out.err


@pytest.fixture(scope="module")
def demo_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    assert main(["pipeline", DEMO, "--stages", ALL, "-o", str(out)]) == 0
    return out


def test_pipeline_writes_readable_artifacts(demo_run):
    for name in ARTIFACTS:
        assert (demo_run / name).stat().st_size > 0
    cube = io.read_wsar(demo_run / "cube.wsar")
    img = io.read_wimg(demo_run / "image.wimg")
    assert img.data.shape == (64, 64) and cube.n_slow == 161
    for name in ("apodized.wimg", "denoised.wimg", "subarray.wimg"):
        assert io.read_wimg(demo_run / name).grid == img.grid
    assert io.read_pgm(demo_run / "image.pgm").shape == (64, 64)
    assert io.read_ppm(demo_run / "multispectral.ppm").shape == (64, 64, 3)
    pts = io.read_point_cloud(demo_run / "pointcloud.csv")
    assert len(pts) >= 3
    r, db = io.read_profile_csv(demo_run / "profile.csv")
    assert r.size == db.size and db.max() == 0.0


def test_pipeline_deterministic(tmp_path, demo_run):
    assert main(["--threads", "3", "pipeline", DEMO, "--stages", ALL, "-o", str(tmp_path)]) == 0
    for name in ARTIFACTS:
        assert (tmp_path / name).read_bytes() == (demo_run / name).read_bytes(), name


def test_corner_reflector_profile(tmp_path, capsys):
    rc, m, _ = run(capsys, "simulate", CORNER, "-o", str(tmp_path / "c.wsar"))
    assert rc == 0 and m["n_fast"] == "25000"
    rc, m, _ = run(capsys, "compress", str(tmp_path / "c.wsar"), "-o", str(tmp_path / "p.csv"))
    assert rc == 0
    r, db = io.read_profile_csv(tmp_path / "p.csv")
    k = int(np.argmax(db))
    assert abs(r[k] - 2.05) <= r[1] - r[0]
    assert float(m["beat_frequency_hz"]) == pytest.approx(65.6e3, abs=5e6 / 25000)


def test_subcommand_chain(tmp_path, capsys):
    t = tmp_path
    assert main(["simulate", DEMO, "-o", str(t / "c.wsar")]) == 0
    rc, m, _ = run(capsys, "backproject", str(t / "c.wsar"), "-c", DEMO, "-o", str(t / "r.wimg"), "--pgm", str(t / "r.pgm"))
    assert rc == 0 and float(m["peak_y_m"]) == pytest.approx(2.05, abs=2e-3)
    assert main(["backproject", str(t / "c.wsar"), "-c", DEMO, "--window", "hamming", "-o", str(t / "h.wimg")]) == 0
    for mode in ("dual", "cda"):
        rc, m, _ = run(capsys, "apodize", "--mode", mode, "--rect", str(t / "r.wimg"), "--ham", str(t / "h.wimg"), "-o", str(t / f"{mode}.wimg"))
        assert rc == 0
    assert main(["denoise", str(t / "cda.wimg"), "-o", str(t / "d.wimg"), "--pgm", str(t / "d.pgm")]) == 0
    assert main(["multispectral", str(t / "c.wsar"), "-c", DEMO, "--enhance", "-o", str(t / "m.ppm")]) == 0
    assert main(["subarray", str(t / "c.wsar"), "-c", DEMO, "--m", "10", "--overlap", "9", "--steer", "-15", "-o", str(t / "s.wimg")]) == 0
    rc, m, _ = run(capsys, "pointcloud", str(t / "cda.wimg"), "--threshold", "25", "--no-intensity", "-o", str(t / "pc.csv"))
    assert rc == 0 and int(m["points"]) >= 1
    assert {p[2] for p in io.read_point_cloud(t / "pc.csv")} == {0.0}


def test_exit_codes(tmp_path, capsys):
    rc, _, err = run(capsys, "pipeline", str(tmp_path / "nope.cfg"), "-o", str(tmp_path))
    assert rc == 2 and "cannot read" in err
    bad = tmp_path / "bad.cfg"
    bad.write_text("f_c = 90e9\nwhatever\n")
    rc, _, err = run(capsys, "simulate", str(bad), "-o", str(tmp_path / "x.wsar"))
    assert rc == 2 and "bad.cfg:2:" in err
    rc, _, err = run(capsys, "pipeline", DEMO, "--stages", "simulate,backproject", "-o", str(tmp_path))
    assert rc == 3
    rc, _, _ = run(capsys, "pipeline", DEMO, "--stages", "simulate,compress,backproject,export,apodize", "-o", str(tmp_path))
    assert rc == 3
    (tmp_path / "junk.wimg").write_bytes(b"garbage")
    rc, _, _ = run(capsys, "pointcloud", str(tmp_path / "junk.wimg"), "-o", str(tmp_path / "pc.csv"))
    assert rc == 3


def test_threads_env_fallback(tmp_path, monkeypatch, demo_run):
    monkeypatch.setenv("WSAR_THREADS", "2")
    assert main(["pipeline", DEMO, "--stages", ALL, "-o", str(tmp_path)]) == 0
    assert (tmp_path / "image.wimg").read_bytes() == (demo_run / "image.wimg").read_bytes()
