"""Damped-driven pendulum pipeline: simulate, estimate the release
spectrum, and compare against the closed-form curve.

Usage: python3 scripts/pendulum_experiment.py [workdir]
"""

import json
import os
import sys

import numpy as np

from lasernoise.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))


def run(workdir: str) -> int:
    scen = os.path.join(HERE, "scenarios", "pendulum.json")
    out = os.path.join(workdir, "pendulum")
    params = json.load(open(scen))["params"]

    rc = main(["simulate", scen, "--out", out, "--jobs", "2"])
    if rc:
        return rc
    rc = main(["analyze", os.path.join(out, "run_*.events"),
               "--spectrum", "16", "--out", out])
    if rc:
        return rc

    periods = params["periods"]
    omegas = 2.0 * np.pi * np.arange(1, 17) / periods
    rc = main(["analytic", "pendulum",
               "--omega-min", repr(float(omegas[0])),
               "--omega-max", repr(float(omegas[-1])),
               "--points", "16", "--out", os.path.join(out, "theory.csv"),
               "--w", repr(params["w"]), "--delta", repr(params["delta"]),
               "--p", repr(params["p"])])
    if rc:
        return rc
    return main(["compare", os.path.join(out, "spectrum.csv"),
                 os.path.join(out, "theory.csv"),
                 "--band", f"{omegas[0]}:{omegas[-1]}",
                 "--out", os.path.join(out, "report.json")])


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "out"))
