"""Estimators and exact transforms for stationary point processes.

Spectra are estimated on the grid Omega_n = 2 pi n / T, n >= 1 (no DC bin).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class EmptySeriesSet(ValueError):
    pass


class MismatchedDurations(ValueError):
    pass


class ZeroRate(ValueError):
    pass


class WindowTooLarge(ValueError):
    pass


class InvalidProbability(ValueError):
    pass


class ImproperWaitingTime(ValueError):
    pass


class NegativeDensity(ValueError):
    pass


@dataclass(frozen=True)
class EventSeries:
    """Ordered event times on [0, duration), optionally marked."""

    times: np.ndarray
    duration: float
    marks: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        if len(t) and (t[0] < 0.0 or t[-1] >= self.duration):
            raise ValueError("event times must lie in [0, duration)")
        if len(t) > 1 and np.any(np.diff(t) < 0.0):
            raise ValueError("event times must be non-decreasing")
        if self.marks is not None:
            m = np.asarray(self.marks, dtype=float)
            if len(m) != len(t):
                raise ValueError("marks length must match times")
            if np.any(m < 0.0):
                raise ValueError("marks must be nonnegative")
            object.__setattr__(self, "marks", m)

    @property
    def rate(self) -> float:
        """Mean event rate (energy rate when marked)."""
        total = self.marks.sum() if self.marks is not None else float(len(self.times))
        return total / self.duration

    def save(self, path: str):
        marked = 1 if self.marks is not None else 0
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(f"# duration={float(self.duration)!r} marked={marked}\n")
            if marked:
                for t, m in zip(self.times, self.marks):
                    fh.write(f"{float(t)!r},{float(m)!r}\n")
            else:
                for t in self.times:
                    fh.write(f"{float(t)!r}\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str) -> "EventSeries":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("# duration="):
                raise ValueError(f"{path}: missing EventSeries header")
            fields = dict(kv.split("=") for kv in header[2:].split())
            duration = float(fields["duration"])
            marked = int(fields.get("marked", "0"))
            times, marks = [], []
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if marked:
                    t, m = line.split(",")
                    times.append(float(t))
                    marks.append(float(m))
                else:
                    times.append(float(line))
        return cls(np.array(times), duration, np.array(marks) if marked else None)


@dataclass(frozen=True)
class SpectrumEstimate:
    omegas: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    rate: float
    n_runs: int

    def save_csv(self, path: str, units: str = "rad/time"):
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(f"# omega[{units}],value,stderr\n")
            for w, v, e in zip(self.omegas, self.values, self.stderr):
                fh.write(f"{float(w)!r},{float(v)!r},{float(e)!r}\n")
        os.replace(tmp, path)


@dataclass(frozen=True)
class CorrelationEstimate:
    taus: np.ndarray
    g: np.ndarray
    rate: float


@dataclass(frozen=True)
class RationalLaplace:
    """Rational function of p, coefficients in ascending order."""

    numerator: np.ndarray
    denominator: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "numerator", np.asarray(self.numerator, float))
        object.__setattr__(self, "denominator", np.asarray(self.denominator, float))

    def __call__(self, p):
        num = np.polynomial.polynomial.polyval(p, self.numerator)
        den = np.polynomial.polynomial.polyval(p, self.denominator)
        return num / den


def _common_duration(series):
    if not series:
        raise EmptySeriesSet("need at least one EventSeries")
    T = series[0].duration
    for s in series:
        if abs(s.duration - T) > 1e-9 * max(1.0, T):
            raise MismatchedDurations("all series must share one duration")
    return T


def periodogram(series, n_max: int, n_min: int = 1) -> SpectrumEstimate:
    """values[n] = <|sum_k m_k exp(j Omega_n t_k)|^2> / T, averaged over runs;
    m_k = 1 for unmarked series."""
    T = _common_duration(series)
    if n_max < n_min or n_min < 1:
        raise ValueError("need 1 <= n_min <= n_max")
    for s in series:
        if len(s.times) == 0:
            raise EmptySeriesSet("periodogram of an empty series")
    ns = np.arange(n_min, n_max + 1)
    omegas = 2.0 * np.pi * ns / T
    per_run = np.empty((len(series), len(ns)))
    for i, s in enumerate(series):
        phase = np.exp(1j * np.outer(omegas, s.times))
        amp = phase @ s.marks if s.marks is not None else phase.sum(axis=1)
        per_run[i] = (amp.real**2 + amp.imag**2) / T
    values = per_run.mean(axis=0)
    if len(series) > 1:
        stderr = per_run.std(axis=0, ddof=1) / np.sqrt(len(series))
    else:
        stderr = np.full(len(ns), np.nan)
    rate = float(np.mean([s.rate for s in series]))
    return SpectrumEstimate(omegas, values, stderr, rate, len(series))


def relative_noise(spec: SpectrumEstimate) -> np.ndarray:
    """N(Omega) = S/D^2 - 1/D; zero for Poisson processes."""
    if spec.rate <= 0.0:
        raise ZeroRate("relative noise needs a positive mean rate")
    return spec.values / spec.rate**2 - 1.0 / spec.rate


def correlation_estimate(series, tau_max: float, bins: int) -> CorrelationEstimate:
    """Normalized pair correlation g(tau) from ordered-pair separations.

    First events restricted to [0, T - tau_max] so every pair window is fully
    observed; normalization makes a Poisson process give 1."""
    T = _common_duration(series)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not (0 < tau_max < T / 2):
        raise ValueError("need 0 < tau_max < duration/2")
    counts = np.zeros(bins)
    norm = 0.0
    for s in series:
        t = s.times
        if len(t) == 0:
            continue
        n_first = int(np.searchsorted(t, T - tau_max, "right"))
        rate = len(t) / T
        diffs = []
        for i in range(n_first):
            hi = int(np.searchsorted(t, t[i] + tau_max, "right"))
            if hi > i + 1:
                diffs.append(t[i + 1:hi] - t[i])
        if diffs:
            counts += np.histogram(np.concatenate(diffs), bins=bins,
                                   range=(0.0, tau_max))[0]
        norm += n_first * rate * (tau_max / bins)
    if norm == 0.0:
        raise EmptySeriesSet("no eligible pairs")
    taus = (np.arange(bins) + 0.5) * tau_max / bins
    rate = float(np.mean([s.rate for s in series]))
    return CorrelationEstimate(taus, counts / norm, rate)


def count_variance(series, window: float) -> float:
    """V(T) = var(count)/mean(count) - 1 over disjoint windows of length T."""
    T = _common_duration(series)
    if window > T / 4:
        raise WindowTooLarge("window must be <= duration/4")
    all_counts = []
    k = int(T / window)
    edges = np.arange(k + 1) * window
    for s in series:
        idx = np.searchsorted(s.times, edges)
        all_counts.append(np.diff(idx))
    c = np.concatenate(all_counts)
    mean = c.mean()
    if mean == 0.0:
        raise EmptySeriesSet("no events in any window")
    return float(c.var(ddof=1) / mean - 1.0)


def thin(series: EventSeries, keep_prob: float, seed: int) -> EventSeries:
    """Independent random deletion; preserves the relative noise."""
    if not (0.0 < keep_prob <= 1.0):
        raise InvalidProbability("keep_prob must be in (0, 1]")
    rng = np.random.default_rng(seed)
    keep = rng.random(len(series.times)) < keep_prob
    marks = series.marks[keep] if series.marks is not None else None
    return EventSeries(series.times[keep], series.duration, marks)


def superpose(series_list) -> EventSeries:
    T = _common_duration(series_list)
    times = np.concatenate([s.times for s in series_list])
    order = np.argsort(times, kind="stable")
    marked = [s.marks is not None for s in series_list]
    marks = None
    if any(marked):
        if not all(marked):
            raise ValueError("cannot merge marked with unmarked series")
        marks = np.concatenate([s.marks for s in series_list])[order]
    return EventSeries(times[order], T, marks)


def _deflate_constant(coeffs, scale):
    """Drop an (identically zero) constant term: c0 + p*rest -> rest."""
    if abs(coeffs[0]) > 1e-9 * scale:
        raise ImproperWaitingTime("DC pole removal left a nonzero constant")
    return coeffs[1:]


def renewal_spectrum(w: RationalLaplace, rate: float, omegas) -> np.ndarray:
    """Two-sided spectrum of a renewal process, normalized to the rate:
    S(Omega)/R = 1 + H(j Omega) + H(-j Omega), where H = w/(1-w) - R/p with
    the DC pole removed by exact polynomial deflation."""
    num = w.numerator
    den = w.denominator
    if len(num) > len(den):
        raise ImproperWaitingTime("numerator degree exceeds denominator")
    scale = float(max(np.max(np.abs(num)), np.max(np.abs(den))))
    if abs(num[0] - den[0]) > 1e-9 * scale:
        raise ImproperWaitingTime("waiting-time transform must have w(0)=1")
    diff = np.zeros(len(den))
    diff[: len(den)] = den
    diff[: len(num)] -= num
    e = _deflate_constant(diff, scale)  # (den-num)/p
    mean = e[0] / den[0]
    if mean <= 0:
        raise ImproperWaitingTime("nonpositive mean waiting time")
    r_exact = 1.0 / mean
    if rate > 0 and abs(rate - r_exact) > 1e-6 * r_exact:
        raise ImproperWaitingTime(
            f"stated rate {rate} inconsistent with 1/mean = {r_exact}")
    c = np.zeros(max(len(num), len(e)))
    c[: len(num)] += num
    c[: len(e)] -= r_exact * e
    h = _deflate_constant(c, scale)  # (num - R e)/p
    omegas = np.asarray(omegas, dtype=float)
    jw = 1j * omegas
    pv = np.polynomial.polynomial.polyval
    h_of_jw = (pv(jw, h) if len(h) else np.zeros_like(jw)) / pv(jw, e)
    out = 1.0 + 2.0 * h_of_jw.real
    return out


def inhom_poisson_waiting(t_grid, lam) -> np.ndarray:
    """w(t) = lambda(t) exp(-int_0^t lambda) on the given grid."""
    t_grid = np.asarray(t_grid, float)
    lam = np.asarray(lam, float)
    if np.any(lam < 0):
        raise NegativeDensity("rate density must be nonnegative")
    cum = np.concatenate(([0.0], np.cumsum(np.diff(t_grid) * 0.5 * (lam[1:] + lam[:-1]))))
    return lam * np.exp(-cum)


def rate_from_waiting(t_grid, w) -> np.ndarray:
    """Inverse map: lambda(t) = w(t) / (1 - int_0^t w)."""
    t_grid = np.asarray(t_grid, float)
    w = np.asarray(w, float)
    if np.any(w < 0):
        raise NegativeDensity("waiting density must be nonnegative")
    cum = np.concatenate(([0.0], np.cumsum(np.diff(t_grid) * 0.5 * (w[1:] + w[:-1]))))
    return w / (1.0 - cum)
