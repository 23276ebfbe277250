"""Scenario-driven command line: run seeded simulations, estimate spectra,
evaluate closed-form curves and compare the two with z-score reports.

Commands: simulate, analyze, analytic, compare, linewidth.
Exit codes: 0 pass, 2 comparison fail, 1 any error.
Units: time ns, rates 1/ns, angular frequency rad/ns.
"""

from __future__ import annotations

import argparse
import glob as globmod
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from . import __version__, analytic, circuits, montecarlo, pointproc

UNITS = {"time": "ns", "rate": "1/ns", "omega": "rad/ns"}


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


class UnknownModel(ValueError):
    pass


class DisjointGrids(ValueError):
    pass


_MODEL_CONFIGS = {
    "pendulum": (montecarlo.PendulumConfig, montecarlo.run_pendulum),
    "cavity": (montecarlo.CavityConfig, montecarlo.run_isolated_cavity),
    "diode": (montecarlo.DiodeConfig, montecarlo.run_diode),
    "fourlevel": (montecarlo.FourLevelConfig, montecarlo.run_four_level),
}

_ANALYSIS_KEYS = {"n_max", "tau_max", "bins", "window"}


@dataclass(frozen=True)
class Scenario:
    model: str
    params: dict
    analysis: dict
    output: str
    seed: int
    runs: int


@dataclass(frozen=True)
class ComparisonReport:
    omegas: np.ndarray
    mc_value: np.ndarray
    mc_stderr: np.ndarray
    analytic_value: np.ndarray
    z_score: np.ndarray
    band: tuple
    max_abs_z: float
    band_pass_fraction: float
    passed: bool

    def summary(self) -> dict:
        return {"band": list(self.band), "max_abs_z": self.max_abs_z,
                "band_pass_fraction": self.band_pass_fraction,
                "passed": self.passed}


def _field_path(cfg_cls, message: str) -> str:
    words = message.replace(",", " ").replace("(", " ").replace(")", " ").split()
    for f in dc_fields(cfg_cls):
        if f.name in words:
            return f"params.{f.name}"
    return "params"


def _build_config(model: str, params: dict, seed: int, runs: int):
    cfg_cls, _ = _MODEL_CONFIGS[model]
    names = {f.name for f in dc_fields(cfg_cls)}
    for key in params:
        if key not in names:
            raise ValidationError(f"params.{key}: unknown field for model "
                                  f"'{model}' (expected one of {sorted(names)})")
    merged = dict(params)
    merged["seed"] = seed
    merged["runs"] = runs
    try:
        return cfg_cls(**merged)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"{_field_path(cfg_cls, str(exc))}: {exc}") from exc


def parse_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed scenario: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: scenario must be a mapping")
    model = raw.get("model")
    if model not in _MODEL_CONFIGS:
        raise ValidationError(
            f"model: unknown model {model!r}; valid models are "
            f"{sorted(_MODEL_CONFIGS)}")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params: must be a mapping")
    analysis = raw.get("analysis", {})
    for key in analysis:
        if key not in _ANALYSIS_KEYS:
            raise ValidationError(f"analysis.{key}: unknown analysis key")
    seed = int(raw.get("seed", 1))
    runs = int(raw.get("runs", 20))
    if runs < 1:
        raise ValidationError("runs: must be >= 1")
    scenario = Scenario(model, params, analysis, raw.get("output", "."),
                        seed, runs)
    # validate model params eagerly so errors surface before any run
    _build_config(model, params, seed, runs)
    return scenario


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _simulate_one(model: str, params: dict, child_seed: int):
    """Single-run worker; picklable for process pools. The per-run child seed
    makes output independent of how runs are distributed over workers."""
    cfg = _build_config(model, params, child_seed, 1)
    _, runner = _MODEL_CONFIGS[model]
    res = runner(cfg)
    if res.detection:
        s = res.detection[0]
        times, marks, duration = s.times, s.marks, s.duration
    else:
        times, marks, duration = None, None, None
    counts = {ch: int(v[0]) for ch, v in res.event_counts.items()}
    return times, marks, duration, counts, float(res.m_mean[0]), float(res.m_var[0])


def cmd_simulate(scenario: Scenario, jobs: int = 1) -> list:
    """Run the scenario and write run_<k>.events, tallies.csv, mstats.csv and
    manifest.json into the output directory. Returns the file list."""
    os.makedirs(scenario.output, exist_ok=True)
    children = [int(s) for s in
                np.random.SeedSequence(scenario.seed).generate_state(scenario.runs)]
    args = [(scenario.model, scenario.params, c) for c in children]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_simulate_one, *zip(*args)))
    else:
        results = [_simulate_one(*a) for a in args]
    files = []
    tally_lines = ["# run,channel,count\n"]
    mstat_lines = ["# run,m_mean,m_var\n"]
    for k, (times, marks, duration, counts, m_mean, m_var) in enumerate(results):
        if times is not None:
            name = f"run_{k}.events"
            pointproc.EventSeries(times, duration, marks).save(
                os.path.join(scenario.output, name))
            files.append(name)
        for ch, c in counts.items():
            tally_lines.append(f"{k},{ch},{c}\n")
        if not math.isnan(m_mean):
            mstat_lines.append(f"{k},{m_mean!r},{m_var!r}\n")
    _atomic_write(os.path.join(scenario.output, "tallies.csv"),
                  "".join(tally_lines))
    files.append("tallies.csv")
    if len(mstat_lines) > 1:
        _atomic_write(os.path.join(scenario.output, "mstats.csv"),
                      "".join(mstat_lines))
        files.append("mstats.csv")
    manifest = {
        "model": scenario.model,
        "params": scenario.params,
        "analysis": scenario.analysis,
        "seed": scenario.seed,
        "runs": scenario.runs,
        "run_seeds": children,
        "version": __version__,
        "units": UNITS,
        "files": files,
    }
    _atomic_write(os.path.join(scenario.output, "manifest.json"),
                  json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return files + ["manifest.json"]


def cmd_analyze(events_glob: str, out_dir: str = ".", n_max: int = 200,
                tau_max: float | None = None, bins: int = 50,
                window: float | None = None) -> dict:
    """Estimate the spectrum (always) and optionally g(tau) and V(T) from all
    event files matching the glob; returns {name: path} of written CSVs."""
    paths = sorted(globmod.glob(events_glob))
    if not paths:
        raise pointproc.EmptySeriesSet(f"no event files match {events_glob!r}")
    series = [pointproc.EventSeries.load(p) for p in paths]
    os.makedirs(out_dir, exist_ok=True)
    written = {}
    spec = pointproc.periodogram(series, n_max)
    spath = os.path.join(out_dir, "spectrum.csv")
    spec.save_csv(spath, units=UNITS["omega"])
    written["spectrum"] = spath
    if tau_max is not None:
        corr = pointproc.correlation_estimate(series, tau_max, bins)
        lines = [f"# tau[{UNITS['time']}],g\n"]
        lines += [f"{float(t)!r},{float(g)!r}\n" for t, g in zip(corr.taus, corr.g)]
        gpath = os.path.join(out_dir, "gtau.csv")
        _atomic_write(gpath, "".join(lines))
        written["gtau"] = gpath
    if window is not None:
        v = pointproc.count_variance(series, window)
        vpath = os.path.join(out_dir, "countvar.csv")
        _atomic_write(vpath, f"# window[{UNITS['time']}],V\n{float(window)!r},{float(v)!r}\n")
        written["countvar"] = vpath
    return written


def _curve_pendulum(p, omegas):
    params = analytic.PendulumParams(p["w"], p["delta"], p["p"])
    return analytic.pendulum_spectrum(params, omegas), "S[energy^2/time]"


def _curve_diode(p, omegas):
    jn = analytic.diode_relative_noise(omegas, p["J"], p["tau_p"],
                                       p["eps_over_T"])
    return p["J"] * (1.0 + jn), f"S[{UNITS['rate']}]"


def _curve_highpower(p, omegas):
    n = analytic.highpower_relative_noise(omegas, p["tau_p"], p["D"])
    return p["D"] ** 2 * n + p["D"], f"S[{UNITS['rate']}]"


def _curve_rateeq(p, omegas):
    params = analytic.RateEqParams(N=p["N"], tau_p=p["tau_p"], m=p["m"])
    qn = analytic.rateeq_relative_noise(omegas, params)
    return params.J * (1.0 + qn), f"S[{UNITS['rate']}]"


def _curve_darkroom(p, omegas):
    return 1.0 + analytic.darkroom_noise(omegas, p["tau_r"]), "S/D"


def _curve_single_electron(p, omegas):
    val = analytic.single_electron_noise(p["a"])
    return np.full_like(np.asarray(omegas, float), val), "S/D"


_ANALYTIC_MODELS = {
    "pendulum": _curve_pendulum,
    "diode": _curve_diode,
    "highpower": _curve_highpower,
    "rateeq": _curve_rateeq,
    "darkroom": _curve_darkroom,
    "single-electron": _curve_single_electron,
}


def cmd_analytic(model: str, params: dict, omegas, out_path: str) -> str:
    if model not in _ANALYTIC_MODELS:
        raise UnknownModel(f"unknown analytic model {model!r}; valid: "
                           f"{sorted(_ANALYTIC_MODELS)}")
    try:
        values, unit = _ANALYTIC_MODELS[model](params, np.asarray(omegas, float))
    except KeyError as exc:
        raise ValidationError(f"missing parameter --{exc.args[0]}") from exc
    lines = [f"# omega[{UNITS['omega']}],{unit}\n"]
    lines += [f"{float(w)!r},{float(v)!r}\n" for w, v in zip(omegas, values)]
    _atomic_write(out_path, "".join(lines))
    return out_path


def _linewidth_st(p):
    n_p = p.get("n_p", 1.0)
    dw = circuits.st_linewidth(p["Q"], p["tau_p"], n_p)
    return dw, {"delta_omega*Q*tau_p^2/n_p": dw * p["Q"] * p["tau_p"] ** 2 / n_p}


def _linewidth_general(p):
    inputs = circuits.LinewidthInputs(
        G_n=p["G_n"], B_n=p["B_n"], G_w=p["G_w"], B_w=p["B_w"],
        S_C=p["S_C"], S_C_prime=p.get("S_C_prime"),
        S_C_second=p.get("S_C_second"))
    h = circuits.dispersion_factor(inputs)
    return circuits.general_linewidth(inputs), {"h": h, "K": 1.0 + h * h}


def _linewidth_combined(p):
    alpha, h = p["alpha"], p["h"]
    dw = circuits.combined_alpha_K(p["delta0"], alpha, h)
    alpha_a = (alpha + h) / (1.0 - alpha * h)
    return dw, {"alpha_A": alpha_a, "K": 1.0 + h * h}


def _linewidth_inhom(p):
    return circuits.inhomogeneous_linewidth_rinf(p["n"], p["D"], p["tau_p"]), {}


_LINEWIDTH_MODELS = {
    "st": _linewidth_st,
    "general": _linewidth_general,
    "combined": _linewidth_combined,
    "inhom": _linewidth_inhom,
}


def cmd_linewidth(model: str, params: dict) -> dict:
    if model not in _LINEWIDTH_MODELS:
        raise UnknownModel(f"unknown linewidth model {model!r}; valid: "
                           f"{sorted(_LINEWIDTH_MODELS)}")
    try:
        dw, checks = _LINEWIDTH_MODELS[model](params)
    except KeyError as exc:
        raise ValidationError(f"missing parameter --{exc.args[0]}") from exc
    return {"model": model, "params": params, "delta_omega": dw,
            "product_checks": checks}


def _read_curve(path: str):
    omegas, cols = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            omegas.append(float(parts[0]))
            cols.append([float(x) for x in parts[1:]])
    if not omegas:
        raise ParseError(f"{path}: no data rows")
    return np.array(omegas), np.array(cols)


def cmd_compare(mc_path: str, theory_path: str,
                band: tuple | None = None) -> ComparisonReport:
    """z-score comparison of an MC spectrum (omega,value,stderr) against an
    analytic curve (omega,value) interpolated onto the MC grid.

    Pass iff >= 95% of in-band points have |z| <= 3. The default band runs
    from the lowest MC frequency to twice the analytic peak (full overlap if
    the curve has no interior peak)."""
    mc_w, mc_cols = _read_curve(mc_path)
    if mc_cols.shape[1] < 2:
        raise ParseError(f"{mc_path}: expected omega,value,stderr columns")
    th_w, th_cols = _read_curve(theory_path)
    lo_ov = max(mc_w.min(), th_w.min())
    hi_ov = min(mc_w.max(), th_w.max())
    if hi_ov <= lo_ov:
        raise DisjointGrids("MC and analytic grids do not overlap")
    keep = (mc_w >= lo_ov) & (mc_w <= hi_ov) & (mc_cols[:, 1] > 0)
    w = mc_w[keep]
    mc_v = mc_cols[keep, 0]
    mc_e = mc_cols[keep, 1]
    th_v = np.interp(w, th_w, th_cols[:, 0])
    z = (mc_v - th_v) / mc_e
    if band is None:
        kpk = int(np.argmax(th_cols[:, 0]))
        if 0 < kpk < len(th_w) - 1:
            band = (float(w.min()), 2.0 * float(th_w[kpk]))
        else:
            band = (float(w.min()), float(w.max()))
    in_band = (w >= band[0]) & (w <= band[1])
    if not np.any(in_band):
        raise DisjointGrids("comparison band contains no grid points")
    frac = float(np.mean(np.abs(z[in_band]) <= 3.0))
    return ComparisonReport(w, mc_v, mc_e, th_v, z, band,
                            float(np.max(np.abs(z[in_band]))), frac,
                            frac >= 0.95)


# ---------------------------------------------------------------------------
# argument handling

class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        # no prefix matching: model parameters like --p must never be
        # swallowed by abbreviations of built-in flags such as --points
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):  # exit 1 on usage errors (2 means comparison fail)
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def _kv_params(rest) -> dict:
    out = {}
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--") or i + 1 >= len(rest):
            raise ValidationError(f"expected --name value pairs, got {tok!r}")
        val = rest[i + 1]
        try:
            num = float(val)
            out[tok[2:]] = int(num) if num.is_integer() and "." not in val \
                and "e" not in val.lower() else num
        except ValueError:
            out[tok[2:]] = val
        i += 2
    return out


def _build_parser() -> _Parser:
    p = _Parser(prog="lasernoise", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run a scenario file")
    ps.add_argument("scenario")
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--runs", type=int, default=None)
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--out", default=None)

    pa = sub.add_parser("analyze", help="estimate spectra from event files")
    pa.add_argument("events_glob")
    pa.add_argument("--spectrum", type=int, default=200, metavar="N_MAX")
    pa.add_argument("--gtau", type=float, default=None, metavar="TAU_MAX")
    pa.add_argument("--bins", type=int, default=50)
    pa.add_argument("--count-var", type=float, default=None, metavar="WINDOW")
    pa.add_argument("--out", default=".")

    pn = sub.add_parser("analytic", help="evaluate a closed-form curve")
    pn.add_argument("model")
    pn.add_argument("--omega-min", type=float, default=None)
    pn.add_argument("--omega-max", type=float, default=None)
    pn.add_argument("--points", type=int, default=200)
    pn.add_argument("--out", default="theory.csv")

    pc = sub.add_parser("compare", help="z-score MC spectrum against theory")
    pc.add_argument("mc_csv")
    pc.add_argument("theory_csv")
    pc.add_argument("--band", default=None, metavar="LO:HI")
    pc.add_argument("--out", default=None)

    pl = sub.add_parser("linewidth", help="evaluate a linewidth formula")
    pl.add_argument("model")
    pl.add_argument("--out", default=None)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args, rest = parser.parse_known_args(argv)
    try:
        if args.command == "simulate":
            sc = parse_scenario(args.scenario)
            if rest:
                raise ValidationError(f"unexpected arguments: {rest}")
            if args.seed is not None:
                sc = Scenario(sc.model, sc.params, sc.analysis, sc.output,
                              args.seed, sc.runs)
            if args.runs is not None:
                sc = Scenario(sc.model, sc.params, sc.analysis, sc.output,
                              sc.seed, args.runs)
            if args.out is not None:
                sc = Scenario(sc.model, sc.params, sc.analysis, args.out,
                              sc.seed, sc.runs)
            _build_config(sc.model, sc.params, sc.seed, sc.runs)
            files = cmd_simulate(sc, jobs=args.jobs)
            print("\n".join(files))
            return 0
        if args.command == "analyze":
            if rest:
                raise ValidationError(f"unexpected arguments: {rest}")
            written = cmd_analyze(args.events_glob, out_dir=args.out,
                                  n_max=args.spectrum, tau_max=args.gtau,
                                  bins=args.bins, window=args.count_var)
            print("\n".join(written.values()))
            return 0
        if args.command == "analytic":
            params = _kv_params(rest)
            if args.omega_min is None or args.omega_max is None:
                raise ValidationError("--omega-min and --omega-max are required")
            omegas = np.linspace(args.omega_min, args.omega_max, args.points)
            path = cmd_analytic(args.model, params, omegas, args.out)
            print(path)
            return 0
        if args.command == "compare":
            if rest:
                raise ValidationError(f"unexpected arguments: {rest}")
            band = None
            if args.band is not None:
                lo, _, hi = args.band.partition(":")
                band = (float(lo), float(hi))
            report = cmd_compare(args.mc_csv, args.theory_csv, band)
            text = json.dumps(report.summary(), indent=2) + "\n"
            if args.out:
                _atomic_write(args.out, text)
            sys.stdout.write(text)
            return 0 if report.passed else 2
        if args.command == "linewidth":
            params = _kv_params(rest)
            record = cmd_linewidth(args.model, params)
            text = json.dumps(record, indent=2, default=float) + "\n"
            if args.out:
                _atomic_write(args.out, text)
            sys.stdout.write(text)
            return 0
        raise ValidationError(f"unknown command {args.command!r}")
    except (ParseError, ValidationError, UnknownModel, DisjointGrids,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
