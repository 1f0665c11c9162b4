"""Acceptance check for the plot pipeline against real simulation output.

Runs the `simulate` command as a subprocess so the plotting side touches
the simulation side only through its published files (results.csv and
summary.json), renders all four figure kinds, and verifies the plotted
means against the JSON summary.
"""

import json
import shutil
import subprocess

from irsplot import render, spec_for_figure

SMALL_DIMS = {"n_t": 8, "n_r": 4, "m": 16, "n_t_rf": 2, "n_r_rf": 2, "n_s": 2}
MID_DIMS = {"n_t": 16, "n_r": 8, "m": 32, "n_t_rf": 2, "n_r_rf": 2, "n_s": 2}

ALL_METHODS = [
    "proposed_hybrid", "proposed_fully_digital", "sota_asymptotic",
    "random_reflection_fully_digital", "upper_bound",
]


def _simulate(tmp_path, name, config):
    exe = shutil.which("simulate")
    assert exe is not None, "simulate command not on PATH"
    config_path = tmp_path / f"{name}.json"
    config_path.write_text(json.dumps(config, indent=2))
    out_dir = tmp_path / name
    proc = subprocess.run(
        [exe, "--config", str(config_path), "--out", str(out_dir)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_dir


def test_plot_pipeline_matches_summary(tmp_path):
    """All four figures render from 200-trial sweeps and every plotted
    mean agrees with the JSON summary within 1e-9."""
    base = {"scenario": {"n_path": 4}, "trials": 200, "master_seed": 11,
            "noise_dbm": -91.0}
    configs = {
        "ptx": {**base, "dims": SMALL_DIMS, "methods": ALL_METHODS,
                "sweep": {"kind": "ptx_dbm", "values": [30.0, 40.0]}},
        "ptx-large": {**base, "dims": MID_DIMS,
                      "methods": ["proposed_hybrid", "upper_bound"],
                      "sweep": {"kind": "ptx_dbm", "values": [30.0, 40.0]}},
        "npath": {**base, "dims": SMALL_DIMS, "methods": ["proposed_hybrid"],
                  "sweep": {"kind": "n_path", "values": [2, 4]}},
        "nmse": {**base, "dims": SMALL_DIMS, "methods": ["proposed_hybrid"],
                 "sweep": {"kind": "nmse_db", "values": [-10.0, None]}},
    }

    worst = 0.0
    compared = 0
    for kind, config in configs.items():
        out_dir = _simulate(tmp_path, kind, config)
        image = tmp_path / f"{kind}.png"
        data = render(spec_for_figure(kind, out_dir / "results.csv", image))
        assert image.exists() and image.stat().st_size > 0
        if kind == "ptx":
            assert len(data["series"]) == len(ALL_METHODS)

        summary = json.loads((out_dir / "summary.json").read_text())
        for entry in summary["summary"]:
            if entry["mean"] is None:
                continue
            method = entry["method"]
            value = entry["sweep_value"]
            if value is None:
                plotted = data["reference"][method]["mean"]
            else:
                points = data["series"][method]
                plotted = points["mean"][points["x"].index(float(value))]
            worst = max(worst, abs(plotted - entry["mean"]))
            compared += 1

    ok = worst <= 1e-9 and compared >= 16
    verdict = "PASS" if ok else "FAIL"
    print(f"\n[acceptance] plot pipeline vs summary: {verdict} "
          f"(4 figures rendered, {compared} means compared, "
          f"worst abs diff {worst:.3e} <= 1e-9)", flush=True)
    assert compared >= 16
    assert worst <= 1e-9
