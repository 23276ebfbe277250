"""Sweep the pump thermalization rate and report how the sub-shot crossing
frequency degrades as the pump becomes less regular.

Usage: python3 scripts/degradation_sweep.py [--runs N]
"""

import argparse
import sys

from lasernoise.montecarlo import DiodeConfig, run_diode
from lasernoise.pointproc import periodogram

from diode_experiment import crossing_mhz


def run(runs: int) -> int:
    print("p_therm[1/ns]  crossing[MHz]")
    last = None
    ok = True
    for p_therm, seed in ((25000.0, 1), (1000.0, 2), (250.0, 3)):
        res = run_diode(DiodeConfig(p_therm=p_therm, runs=runs, seed=seed))
        spec = periodogram(res.detection, n_max=200)
        c = crossing_mhz(spec)
        print(f"{p_therm:12.0f}  {c:12.1f}")
        if last is not None and c >= last:
            ok = False
        last = c
    print("strictly decreasing:", ok)
    return 0 if ok else 2


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=5)
    sys.exit(run(ap.parse_args().runs))
