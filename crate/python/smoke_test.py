"""Smoke test for the Python extension.

Build and run from the repository root:

    cargo build -p halfspace-berry-py --features extension-module --release
    python3 python/smoke_test.py

The script looks for the compiled library in target/release (or the path in
HALFSPACE_BERRY_LIB) and loads it as the `halfspace_berry` module.
"""

import importlib.machinery
import importlib.util
import math
import os
import pathlib
import sys


def load():
    root = pathlib.Path(__file__).resolve().parent.parent
    default = root / "target" / "release" / "libhalfspace_berry_py.so"
    path = pathlib.Path(os.environ.get("HALFSPACE_BERRY_LIB", default))
    if not path.exists():
        sys.exit(f"extension not found at {path}; build it first")
    loader = importlib.machinery.ExtensionFileLoader("halfspace_berry", str(path))
    spec = importlib.util.spec_from_file_location("halfspace_berry", str(path), loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    hb = load()

    medium = hb.LorentzMedium(0.5, 1e-2)
    lo, hi = medium.band_edges()
    assert lo == 1.0 and abs(hi - 1.1180339887) < 1e-9
    assert abs(medium.permittivity(1.0) - complex(1.0, 25.0)) < 1e-9
    assert medium.in_band_gap(1.05)

    atom = hb.AtomSurfaceConfig(1.0, 0.05, medium)
    assert abs(atom.decay_rate() - 0.4807) < 1e-4
    assert abs(atom.line_shift() - 3.0043) < 1e-4
    varpi, shift = atom.markov_kernel()
    assert abs(varpi - 0.2404) < 1e-4

    r1, r2, degenerate = hb.roots_free(1.0, 1.0)
    assert degenerate and abs(r1 + 0.5) < 1e-12

    s = 1 / math.sqrt(2)
    times = [0.1 * i for i in range(101)]
    closed = hb.evolve(times, s, s, 1.0)
    oracle = hb.evolve(times, s, s, 1.0, solver="oracle")
    worst = max(max(abs(a[1] - b[1]), abs(a[2] - b[2])) for a, b in zip(closed, oracle))
    assert worst < 1e-8, worst

    trace = hb.phase_trace(times, 1.0, 0.0, 1.0)
    assert max(abs(y) for y in trace["y"]) < 1e-12
    assert hb.total_phase(-1.0, 0.0, "atan2") == math.pi
    assert hb.total_phase(0.0, 0.0) is None

    csv = hb.run_sweep('preset = "fig3"\n')
    rows = [l for l in csv.splitlines() if not l.startswith("#")]
    assert len(rows) == 202, len(rows)

    try:
        hb.run_sweep("[atom]\nzA = -1\n")
    except ValueError as e:
        assert "zA" in str(e)
    else:
        raise AssertionError("negative zA accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
