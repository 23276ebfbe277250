"""Ball-exchange heat engines, oscillator energies, cavity photon statistics
and partition-based Fermi occupancies. Units: k_B = 1, level spacing = 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad


class DegenerateOccupancy(ValueError):
    pass


class InvalidTemperatureOrder(ValueError):
    pass


class InfeasibleEnergy(ValueError):
    pass


@dataclass(frozen=True)
class Reservoir:
    """N locations at altitude E holding n unit weights; n < N/2 keeps the
    temperature positive."""

    N: int
    n: int
    E: float

    def __post_init__(self):
        if not (0 <= self.n < self.N / 2):
            raise ValueError("need 0 <= n < N/2")

    @property
    def force(self) -> float:
        return self.n / self.N


@dataclass(frozen=True)
class CycleStats:
    mean_work: float
    var_work: float
    efficiency: float
    mean_dS: float
    var_dS: float


@dataclass(frozen=True)
class LevelSystem:
    B: int
    N_e: int
    epsilon: float
    T: float

    def __post_init__(self):
        if not (0 <= self.N_e <= self.B):
            raise ValueError("need 0 <= N_e <= B")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def reservoir_entropy(res: Reservoir) -> float:
    """S = ln binom(N, n); exact integer arithmetic for modest N."""
    if res.N <= 2000:
        return math.log(math.comb(res.N, res.n))
    return (math.lgamma(res.N + 1) - math.lgamma(res.n + 1)
            - math.lgamma(res.N - res.n + 1))


def reservoir_temperature(res: Reservoir) -> float:
    if res.n == 0:
        raise DegenerateOccupancy("temperature undefined at n = 0")
    return res.E / math.log(res.N / res.n - 1.0)


def _log_rho(h: float, l: float) -> float:
    return math.log((h * (1.0 - l)) / (l * (1.0 - h)))


def cycle_step_stats(low: Reservoir, high: Reservoir) -> CycleStats:
    """Exact per-cycle statistics of a single random two-location exchange.

    Outcomes: ball drops (prob h(1-l)), ball lifts (prob l(1-h)), nothing
    otherwise; work +/-(E_h - E_l), entropy increment -/+ ln rho."""
    if high.E <= low.E:
        raise ValueError("high reservoir must sit above the low one")
    h, l = high.force, low.force
    dE = high.E - low.E
    spread = h * (1.0 - h) + l * (1.0 - l)
    mean_work = dE * (h - l)
    var_work = dE * dE * spread
    if h == l or l == 0.0 or h == 0.0:
        mean_dS, var_dS = 0.0, 0.0
    else:
        lr = _log_rho(h, l)
        mean_dS = (h - l) * lr
        var_dS = spread * lr * lr
    return CycleStats(mean_work, var_work, 1.0 - low.E / high.E, mean_dS, var_dS)


def simulate_exchange(low: Reservoir, high: Reservoir, cycles: int,
                      seed: int) -> CycleStats:
    """Monte Carlo over independent exchange cycles (reservoirs reset each
    cycle); sample moments converge to cycle_step_stats."""
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    h, l = high.force, low.force
    dE = high.E - low.E
    lr = _log_rho(h, l) if (h > 0 and l > 0 and h != l) else 0.0
    rng = np.random.default_rng(seed)
    ball_high = rng.random(cycles) < h
    ball_low = rng.random(cycles) < l
    drop = ball_high & ~ball_low
    lift = ball_low & ~ball_high
    work = dE * (drop.astype(float) - lift.astype(float))
    ds = lr * (drop.astype(float) - lift.astype(float))
    return CycleStats(float(work.mean()), float(work.var(ddof=1)),
                      1.0 - low.E / high.E,
                      float(ds.mean()), float(ds.var(ddof=1)))


def entropy_per_weight(f: float) -> float:
    """s-density ln((1-f)/f) of a large reservoir at filling f."""
    return math.log((1.0 - f) / f)


def carnot_cycle(f, beta_l: float, beta_h: float, L: float, H: float,
                 m: int) -> dict:
    """Discrete-sum heat exchange of a two-temperature engine cycling a
    weight-carrying agent between dimensionless altitudes L and H across m
    geometrically spaced sub-reservoirs per side.

    Returns Q_l, Q_h, W = Q_l + Q_h and eta = W/Q_h; as m grows eta tends to
    1 - T_l/T_h and W to (T_h - T_l)(s(H) - s(L)) with s(x) = x f(x) - int f.
    """
    if not (beta_l > beta_h > 0.0):
        raise InvalidTemperatureOrder("need beta_l > beta_h > 0")
    if not (H > L > 0.0) or m < 2:
        raise ValueError("need H > L > 0 and m >= 2")
    i = np.arange(m)
    up = L * (H / L) ** (i / (m - 1.0))    # low-side grid, L ... H
    down = H * (L / H) ** (i / (m - 1.0))  # high-side grid, H ... L
    fl = np.array([f(x) for x in up])
    fh = np.array([f(x) for x in down])
    bql = up[0] * fh[-1] + float(np.sum(fl[:-1] * np.diff(up))) - up[-1] * fl[-1]
    bqh = down[0] * fl[-1] + float(np.sum(fh[:-1] * np.diff(down))) - down[-1] * fh[-1]
    q_l = bql / beta_l
    q_h = bqh / beta_h
    w = q_l + q_h
    return {"Q_l": q_l, "Q_h": q_h, "W": w, "eta": w / q_h}


def agent_entropy(f, x: float, x_ref: float = 0.0) -> float:
    """s(x) = x f(x) - int_{x_ref}^x f dx', defined up to a constant."""
    integral, _ = quad(f, x_ref, x, limit=200)
    return x * f(x) - integral


def adiabatic_transform(U1: float, omega1: float, omega2: float) -> float:
    """Slow frequency change preserves the action U/omega."""
    if omega1 <= 0 or omega2 <= 0:
        raise ValueError("frequencies must be positive")
    return U1 * omega2 / omega1


def planck_energy(omega: float, T: float) -> float:
    """Mean oscillator energy (omega/2) coth(omega/2T), zero-point included."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if T == 0.0:
        return 0.5 * omega
    x = omega / T
    return 0.5 * omega * (math.exp(x) + 1.0) / (math.exp(x) - 1.0)


def isolated_cavity_pmf(N: int) -> np.ndarray:
    """Stationary quantum-count pmf of N atoms sharing their excitation with
    a lossless resonator: p(m) = binom(N, m)/2^N; mean N/2, variance N/4."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N <= 64:
        vals = [Fraction(math.comb(N, m), 2**N) for m in range(N + 1)]
        return np.array([float(v) for v in vals])
    logs = np.array([math.lgamma(N + 1) - math.lgamma(m + 1)
                     - math.lgamma(N - m + 1) - N * math.log(2.0)
                     for m in range(N + 1)])
    return np.exp(logs)


def added_energy_pmf(N: int, u: int) -> tuple[np.ndarray, float]:
    """Pmf of the energy m left in a resonator after N cold atoms absorbed
    all but m of u initial quanta: p(m) proportional to binom(N, u-m); also
    returns the temperature of the matching Boltzmann law."""
    if not (0 <= u <= N):
        raise ValueError("need 0 <= u <= N")
    weights = np.array([math.comb(N, u - m) for m in range(u + 1)], dtype=object)
    total = sum(weights)
    pmf = np.array([float(Fraction(int(w), int(total))) for w in weights])
    m_mean = float(np.dot(np.arange(u + 1), pmf))
    n_mean = u - m_mean
    temperature = 1.0 / math.log((N - n_mean) / n_mean) if n_mean > 0 else 0.0
    return pmf, temperature


def geometric_resonator_pmf(T: float, m_max: int) -> np.ndarray:
    """Boltzmann law of a resonator at temperature T: (1-q) q^m, q=e^{-1/T}."""
    if T <= 0:
        raise ValueError("T must be positive")
    q = math.exp(-1.0 / T)
    return (1.0 - q) * q ** np.arange(m_max + 1)


def _partitions_at_most(r: int, max_parts: int, max_val: int | None = None):
    """Yield partitions of r (non-increasing tuples) into at most max_parts."""
    if max_val is None:
        max_val = r
    if r == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(r, max_val), 0, -1):
        for rest in _partitions_at_most(r - first, max_parts - 1, first):
            yield (first,) + rest


def micro_canonical_occupancy(N_e: int, r: int) -> dict:
    """Average level occupancies of N_e single-spin electrons on a ladder of
    unit-spaced levels at total excitation r, uniform over microstates.

    Microstates are partitions of r into at most N_e parts; the j-th electron
    from the top moves up by the j-th part. Keys are level offsets k relative
    to the top filled level at r=0 (k = 1 - N_e ... r); values are exact
    fractions occupancy = (# microstates with the level filled)/W(r)."""
    if r < 0 or N_e < 1:
        raise InfeasibleEnergy("need r >= 0 and N_e >= 1")
    counts: dict[int, int] = {k: 0 for k in range(1 - N_e, r + 1)}
    n_states = 0
    for lam in _partitions_at_most(r, N_e):
        n_states += 1
        parts = list(lam) + [0] * (N_e - len(lam))
        for j, step in enumerate(parts, start=1):
            level = N_e + 1 - j + step  # absolute level, ground stack = 1..N_e
            counts[level - N_e] += 1
    return {k: Fraction(c, n_states) for k, c in counts.items()}


def fermi_dirac(k: float, mu: float, T: float) -> float:
    """Occupancy 1/(q^(mu-k) + 1) with q = e^(-1/T), unit level spacing."""
    if T <= 0:
        raise ValueError("T must be positive")
    return 1.0 / (math.exp(-(mu - k) / T) + 1.0)
