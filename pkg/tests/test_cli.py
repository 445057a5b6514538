import math

import numpy as np
import pytest

from backdiff.cli import main
from backdiff.evolution import max_step
from backdiff.imageio import read_image, write_image
from backdiff.imaging import ColourImage, GreyImage
from backdiff.penaliser import Penaliser
from backdiff.weights import build_global_histogram_weights


@pytest.fixture()
def grey_path(tmp_path):
    rng = np.random.default_rng(30)
    path = tmp_path / "in.pgm"
    write_image(path, GreyImage(rng.integers(0, 256, (16, 20), dtype=np.uint8)))
    return path


@pytest.fixture()
def colour_path(tmp_path):
    rng = np.random.default_rng(31)
    path = tmp_path / "in.ppm"
    write_image(path, ColourImage(rng.integers(0, 256, (12, 14, 3), dtype=np.uint8)))
    return path


def test_grey_global_run(tmp_path, grey_path):
    out = tmp_path / "out.pgm"
    code = main(["grey-global", "--input", str(grey_path), "--output", str(out), "--t", "1e-4"])
    assert code == 0
    img = read_image(out)
    assert (img.width, img.height) == (20, 16)


def test_deterministic_outputs(tmp_path, grey_path, colour_path):
    runs = {
        "grey-global": ["--input", str(grey_path), "--t", "2e-4"],
        "grey-local": ["--input", str(grey_path), "--t", "2e-4", "--rho", "2.5"],
        "colour-global": ["--input", str(colour_path), "--t", "2e-4", "--lambda", "0.5"],
        "colour-local": ["--input", str(colour_path), "--t", "2e-4", "--rho", "2.5"],
    }
    for command, args in runs.items():
        ext = ".pgm" if command.startswith("grey") else ".ppm"
        first = tmp_path / f"{command}-1{ext}"
        second = tmp_path / f"{command}-2{ext}"
        assert main([command, *args, "--output", str(first)]) == 0
        assert main([command, *args, "--output", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()


def test_steady_state_equals_infinite_time(tmp_path, grey_path):
    a = tmp_path / "a.pgm"
    b = tmp_path / "b.pgm"
    assert main(["steady-state", "--input", str(grey_path), "--output", str(a)]) == 0
    assert main(["grey-global", "--input", str(grey_path), "--output", str(b), "--t", "inf"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_png_output(tmp_path, colour_path):
    out = tmp_path / "out.png"
    code = main(
        ["colour-global", "--input", str(colour_path), "--output", str(out), "--t", "inf"]
    )
    assert code == 0
    img = read_image(out)
    assert isinstance(img, ColourImage)


def test_trace_export(tmp_path, grey_path):
    out = tmp_path / "out.pgm"
    trace = tmp_path / "trace.csv"
    code = main(
        ["grey-global", "--input", str(grey_path), "--output", str(out),
         "--t", "3e-4", "--trace", str(trace)]
    )
    assert code == 0
    lines = trace.read_text().strip().split("\n")
    assert lines[0] == "iteration,time,energy"
    assert len(lines) >= 3
    for line in lines[1:]:
        it, t, e = line.split(",")
        int(it), float(t), float(e)


def test_single_iteration_when_tau_equals_t(tmp_path, grey_path):
    # choosing tau = t = 2e-6 reaches the target time in one step
    img = read_image(grey_path)
    levels, counts = np.unique(img.samples, return_counts=True)
    w = build_global_histogram_weights((levels + 0.5) / 256.0, counts)
    assert 2e-6 < max_step(w, Penaliser(1, 1))
    out = tmp_path / "out.pgm"
    trace = tmp_path / "trace.csv"
    code = main(
        ["grey-global", "--input", str(grey_path), "--output", str(out),
         "--t", "2e-6", "--tau", "2e-6", "--trace", str(trace)]
    )
    assert code == 0
    lines = trace.read_text().strip().split("\n")
    assert len(lines) == 3  # header, initial record, exactly one iteration


def test_rejected_tau_prints_bound(tmp_path, grey_path, capsys):
    out = tmp_path / "out.pgm"
    code = main(
        ["grey-global", "--input", str(grey_path), "--output", str(out),
         "--t", "1e-4", "--tau", "0.5"]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "max_step" in err
    img = read_image(grey_path)
    bound = 1.0 / (2.0 * img.samples.size)
    assert repr(bound) in err
    assert not out.exists()


def test_error_exits(tmp_path, grey_path, colour_path, capsys):
    out = tmp_path / "out.pgm"

    # missing input file
    assert main(["grey-global", "--input", str(tmp_path / "nope.pgm"),
                 "--output", str(out), "--t", "1e-4"]) == 1
    assert "cannot read" in capsys.readouterr().err

    # corrupt image
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\nshort")
    assert main(["grey-global", "--input", str(bad), "--output", str(out), "--t", "1e-4"]) == 1
    capsys.readouterr()

    # wrong image type for the pipeline
    assert main(["grey-global", "--input", str(colour_path),
                 "--output", str(out), "--t", "1e-4"]) == 1
    assert "greyscale" in capsys.readouterr().err

    # no closed form for local steady state
    assert main(["grey-local", "--input", str(grey_path),
                 "--output", str(out), "--t", "inf"]) == 1
    assert "closed-form" in capsys.readouterr().err

    # unknown output extension
    assert main(["grey-global", "--input", str(grey_path),
                 "--output", str(tmp_path / "out.jpg"), "--t", "1e-4"]) == 1
    assert "format" in capsys.readouterr().err

    # grey pipeline cannot write a colour container
    assert main(["grey-global", "--input", str(grey_path),
                 "--output", str(tmp_path / "out.ppm"), "--t", "1e-4"]) == 1
    assert "PPM" in capsys.readouterr().err


def test_remote_server_matches_in_process(tmp_path, grey_path):
    import socket
    import subprocess
    import sys
    import time

    import httpx

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "backdiff.cli", "serve", "--host", "127.0.0.1",
         "--port", str(port)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    base = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if httpx.get(f"{base}/health", timeout=1.0).status_code == 200:
                    break
            except httpx.HTTPError:
                time.sleep(0.1)
        else:
            pytest.skip("service did not come up in time")
        remote = tmp_path / "remote.pgm"
        local = tmp_path / "local.pgm"
        assert main(["grey-global", "--input", str(grey_path), "--output", str(remote),
                     "--t", "1e-4", "--server", base]) == 0
        assert main(["grey-global", "--input", str(grey_path), "--output", str(local),
                     "--t", "1e-4"]) == 0
        assert remote.read_bytes() == local.read_bytes()
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_unreachable_server_fails_cleanly(tmp_path, grey_path, capsys):
    out = tmp_path / "out.pgm"
    code = main(["grey-global", "--input", str(grey_path), "--output", str(out),
                 "--t", "1e-4", "--server", "http://127.0.0.1:9"])
    assert code == 1
    assert "cannot reach service" in capsys.readouterr().err


def test_validation_error_is_readable(tmp_path, grey_path, capsys):
    out = tmp_path / "out.pgm"
    code = main(["grey-global", "--input", str(grey_path), "--output", str(out),
                 "--t", "-1.0"])
    assert code == 1
    err = capsys.readouterr().err
    assert "t" in err and "error" in err


def test_time_argument_parsing():
    from backdiff.cli import _parse_time

    assert _parse_time("inf") == math.inf
    assert _parse_time("Infinity") == math.inf
    assert _parse_time("2e-6") == 2e-6
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        _parse_time("soon")
