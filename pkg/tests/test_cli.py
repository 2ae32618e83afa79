import io
import math
import subprocess
import sys

import numpy as np
import pytest

from csar import cli
from csar import io as csio


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    lines = text.strip().splitlines()
    assert lines[0] == "quantity,value,unit"
    return {name: value for name, value, _ in (line.split(",") for line in lines[1:])}


@pytest.fixture(scope="module")
def capture(tmp_path_factory):
    path = tmp_path_factory.mktemp("cap") / "one.bin"
    code, out, _ = run("simulate", "--scene", "one-target", "--out", str(path))
    assert code == 0
    assert rows(out) == {"n_samples": "128", "n_angles": "900", "targets": "1"}
    return path


SMALL_GRID = "1.9,2.1,20,44,46,20"


def test_design_report():
    code, out, _ = run("design", "--config", "one-target")
    assert code == 0
    got = rows(out)
    assert got["delta_r"] == "0.0429502"
    assert float(got["delta_theta_max_deg"]) == pytest.approx(37.86, abs=0.005)
    assert float(got["angular_resolution"]) == pytest.approx(8.36e-3, abs=1e-5)
    assert float(got["rcm_extent"]) == pytest.approx(0.0490, abs=1e-4)
    assert got["monostatic_ok"] == "true"


def test_reconstruct_then_psf(capture, tmp_path):
    img = tmp_path / "img.csv"
    code, out, _ = run("reconstruct", "--in", str(capture), "--grid", SMALL_GRID,
                       "--out", str(img), "--format", "csv", "--floor-db", "-60")
    assert code == 0 and rows(out)["cells"] == "400"
    grid, db = csio.read_image_csv(img)
    peak = np.unravel_index(np.argmax(db), db.shape)
    r, t = grid.center(*peak)
    assert abs(r - 2.0) <= grid.dr and abs(t - math.radians(45.0)) <= grid.dtheta
    code, out, _ = run("psf", "--in", str(img), "--truth", "2.0,45.0")
    assert code == 0
    got = rows(out)
    assert abs(float(got["range_error"])) <= grid.dr
    assert float(got["pslr_db"]) <= 0.0
    assert 0.02 < float(got["mainlobe_width_range"]) < 0.06


def test_outputs_deterministic(capture, tmp_path):
    outs = []
    for i, workers in enumerate(("1", "3", "1")):
        path = tmp_path / f"img{i}.pgm"
        assert run("reconstruct", "--in", str(capture), "--grid", SMALL_GRID, "--out",
                   str(path), "--format", "pgm", "--workers", workers)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    again = tmp_path / "again.bin"
    run("simulate", "--scene", "one-target", "--out", str(again))
    assert again.read_bytes() == capture.read_bytes()


def test_figures_written(capture, tmp_path):
    png = tmp_path / "img.png"
    code, out, _ = run("reconstruct", "--in", str(capture), "--grid", SMALL_GRID, "--out",
                       str(tmp_path / "img.csv"), "--figure", str(png))
    assert code == 0 and rows(out)["figure"] == str(png)
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    for argv in (("design", "--config", "paper-exp-1"),
                 ("psf", "--in", str(tmp_path / "img.csv"), "--truth", "2,45")):
        fig = tmp_path / f"{argv[0]}.png"
        assert run(*argv, "--figure", str(fig))[0] == 0
        assert fig.stat().st_size > 1000


def test_bench(tmp_path):
    code, out, _ = run("bench", "--scene", "one-target", "--grid", "1.9,2.1,8,44,46,8",
                       "--repeat", "3", "--workers", "1")
    assert code == 0
    got = rows(out)
    assert got["workers"] == "1" and got["cells"] == "64"
    assert float(got["samples_per_s"]) > 0
    assert 0 <= float(got["relative_spread"])


@pytest.mark.parametrize("argv, code", [
    (("reconstruct", "--in", "x", "--grid", "3,1,10,0,90,10", "--out", "y"), 4),
    (("reconstruct", "--in", "x", "--grid", "1,2,ten,0,90,10", "--out", "y"), 2),
    (("reconstruct", "--in", "x", "--grid", "1,2,10", "--out", "y"), 2),
    (("reconstruct", "--in", "/nonexistent/cap.bin", "--grid", "1,2,10,0,90,10", "--out", "y"), 3),
    (("design",), 2),
    (("frobnicate",), 2),
    (("design", "--config", "/nonexistent/scene.yaml"), 3),
    (("bench", "--scene", "one-target", "--grid", "1,2,2,0,90,2", "--repeat", "0"), 4),
])
def test_exit_codes(argv, code):
    got, out, err = run(*argv)
    assert got == code
    assert err.startswith("csar: ")


def test_bad_capture_is_format_error(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XSAR" + bytes(100))
    code, _, err = run("reconstruct", "--in", str(bad), "--grid", "1,2,2,0,90,2", "--out",
                       str(tmp_path / "o.csv"))
    assert code == 3 and "format" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "csar", "design", "--config", "one-target"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "delta_r,0.0429502,m" in proc.stdout
