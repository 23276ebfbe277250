"""Closed two-level-atoms-plus-field cavity: verify that the stationary
photon-count statistics match the exact combinatorial distribution.

Usage: python3 scripts/cavity_statistics.py
"""

import sys

import numpy as np

from lasernoise.montecarlo import CavityConfig, run_isolated_cavity
from lasernoise.statmech import isolated_cavity_pmf


def run() -> int:
    cfg = CavityConfig(N=100, duration=150.0, transient=10.0, runs=4,
                       seed=3, sample_dt=0.25)
    res = run_isolated_cavity(cfg)
    ratio = float(res.m_var.mean() / res.m_mean.mean())
    print(f"N={cfg.N}: var(m)/<m> = {ratio:.4f} (exact 0.5 as N -> inf)")

    pmf = isolated_cavity_pmf(cfg.N)
    hist = res.extras["m_hist"].sum(axis=0)
    emp = hist / hist.sum()
    sel = pmf > 1e-6
    worst = float(np.max(np.abs(emp[sel] - pmf[sel])))
    print(f"max |empirical - exact| pmf deviation: {worst:.4f}")
    return 0 if abs(ratio - 0.5) < 0.03 and worst < 0.01 else 2


if __name__ == "__main__":
    sys.exit(run())
