"""Smoke test for the warplab Python extension.

Builds nothing itself: run `cargo build -p warplab-py --features extension-module`
first (or install with maturin), then `python3 python/smoke_test.py`.
"""

import importlib.util
import json
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import warplab_py

        return warplab_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libwarplab_py.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            target = tmp / "warplab_py.so"
            shutil.copy(lib, target)
            spec = importlib.util.spec_from_file_location("warplab_py", target)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("warplab_py not found; build it with `cargo build -p warplab-py --features extension-module`")


def main():
    w = load()

    warp = w.Warp.catalog("two-plus-cos")
    assert warp.eval(0.0) == (3.0, 0.0, -1.0)
    lhs, rhs, product = w.theorem1_sides(warp, 2)
    assert abs(lhs - 8 * math.pi**2) < 1e-6 * lhs and abs(rhs - lhs) < 1e-8 * lhs and not product

    flat = w.Warp.expression("3")
    assert w.theorem1_sides(flat, 3)[2]

    assert abs(w.intersection_angle(warp, math.pi / 2) - math.pi / 4) < 1e-8
    assert w.slice_spectrum(warp, math.pi / 2, 2) == [0.25, 0.25]
    assert abs(w.circle_eigenvalues(2.0, 256, 1)[0] - 0.25) < 1e-4

    l, r = w.reilly_disc(64, 2)
    assert abs(l + 8 * math.pi) < 0.02 * 8 * math.pi and abs(r + 8 * math.pi) < 0.02 * 8 * math.pi
    bound, margin = w.eigen_lower_bound_disc(64, 1, 1.0)
    assert abs(bound - 1.0) < 0.01

    text = (ROOT / "crates" / "core" / "scenarios" / "two-plus-cos-q2.json").read_text()
    report = w.run_scenario(text, seed=5)
    assert report.passed
    assert json.loads(report.to_json())["provenance"]["seed"] == 5
    assert report.to_json() == w.run_scenario(text, seed=5).to_json()

    try:
        w.Warp.expression("2 + cos(")
    except ValueError as e:
        assert "column" in str(e)
    else:
        raise AssertionError("parse error not raised")

    print("smoke test passed:", len(report.checks()), "checks")


if __name__ == "__main__":
    main()
