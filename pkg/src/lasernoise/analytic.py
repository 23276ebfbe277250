"""Closed-form noise spectra and rates for the solvable models: pendulum
clock, dark room, linearized laser rate equations, evenly-spaced-level diode,
waiting-time statistics, single-electron laser and square-well constants.

Conventions: relative noise N(Omega) = S/D^2 - 1/D; the "normalized" curves
returned here are D*N (written QN or JN), equal to S/D - 1, so that -1 means
full squeezing and 0 the shot-noise level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .pointproc import RationalLaplace


class InconsistentSteadyState(ValueError):
    pass


class InvalidLifetime(ValueError):
    pass


@dataclass(frozen=True)
class PendulumParams:
    """Escapement-driven pendulum: weight fraction w picked up with
    probability p per period, drive energy delta per period."""

    w: float
    delta: float
    p: float

    def __post_init__(self):
        if not (0 < self.p < 1) or self.w <= 0 or self.delta <= 0:
            raise ValueError("need 0 < p < 1 and positive w, delta")

    @property
    def mean_energy(self) -> float:
        return self.delta / (self.p * self.w)


@dataclass(frozen=True)
class RateEqParams:
    """Linearized single-mode laser rate equations with a quiet pump.

    Derived fields (filled when omitted): steady-state drive J = m/tau_p,
    upper population n from 2n - N = 1/tau_p, differential gain g = 2 n tau_p,
    inversion factor n_p = n tau_p, drive strength b = g m / n."""

    N: float
    tau_p: float
    m: float
    J: float | None = None
    b: float | None = None
    n_p: float | None = None
    g: float | None = None

    def __post_init__(self):
        if self.N <= 0 or self.tau_p <= 0 or self.m <= 0:
            raise ValueError("N, tau_p, m must be positive")
        n_up = 0.5 * (self.N + 1.0 / self.tau_p)
        j = self.m / self.tau_p
        if self.J is not None and abs(self.J - j) > 1e-9 * j:
            raise InconsistentSteadyState("J must equal m/tau_p")
        object.__setattr__(self, "J", j)
        if self.g is None:
            object.__setattr__(self, "g", 2.0 * n_up * self.tau_p)
        if self.n_p is None:
            object.__setattr__(self, "n_p", n_up * self.tau_p)
        if self.b is None:
            object.__setattr__(self, "b", self.g * self.m / n_up)


@dataclass(frozen=True)
class WaitParams:
    """Two-level emitter in a damped cavity: decay gamma, Rabi frequency
    Omega_R, derived a = 2 gamma^2 / Omega_R^2."""

    gamma: float
    Omega_R: float

    def __post_init__(self):
        if self.gamma <= 0 or self.Omega_R <= 0:
            raise ValueError("gamma and Omega_R must be positive")

    @property
    def a(self) -> float:
        return 2.0 * self.gamma**2 / self.Omega_R**2


def pendulum_spectrum(params: PendulumParams, omega):
    """Spectral density of the dissipated power,
    S(Omega) = (delta^2/p) / (1 + (p w / Omega)^2); vanishes at DC."""
    omega = np.asarray(omega, dtype=float)
    corner = params.p * params.w
    out = (params.delta**2 / params.p) / (1.0 + (corner / omega) ** 2)
    return float(out) if out.ndim == 0 else out


def darkroom_g(tau, tau_r: float):
    """Pair correlation of unit-rate arrivals delayed uniformly over tau_r."""
    tau = np.asarray(tau, dtype=float)
    out = np.where(tau < tau_r, 1.0 - (tau_r - tau) / tau_r**2, 1.0)
    return float(out) if out.ndim == 0 else out


def darkroom_noise(omega, tau_r: float):
    """Relative noise N(Omega) = 2 (cos(Omega tau_r) - 1)/(Omega tau_r)^2
    (unit mean rate); N -> -1 at DC, i.e. S(0) = 0."""
    x = np.asarray(omega, dtype=float) * tau_r
    out = 2.0 * (np.cos(x) - 1.0) / x**2
    return float(out) if out.ndim == 0 else out


def darkroom_count_variance(T, tau_r: float):
    """V(T) = -T/tau_r + T^2/(3 tau_r^2) for T < tau_r, else -1 + tau_r/(3T)."""
    T = np.asarray(T, dtype=float)
    out = np.where(T < tau_r,
                   -T / tau_r + T**2 / (3.0 * tau_r**2),
                   -1.0 + tau_r / (3.0 * T))
    return float(out) if out.ndim == 0 else out


def highpower_relative_noise(omega, tau_p: float, D: float):
    """Large-power limit: N(Omega) = -1/[D (1 + (Omega tau_p)^2)]."""
    omega = np.asarray(omega, dtype=float)
    out = -1.0 / (D * (1.0 + (omega * tau_p) ** 2))
    return float(out) if out.ndim == 0 else out


def rateeq_relative_noise(omega, params: RateEqParams):
    """Quiet-pump laser detection noise, normalized form Q*N(Omega):
    QN = [((N tau_p + 1)/(4 m^2)) W^2 - 1] /
         [(W tau_p)^2 + (1 - W^2 tau_p/(2m))^2]."""
    w = np.asarray(omega, dtype=float)
    num = (params.N * params.tau_p + 1.0) / (4.0 * params.m**2) * w**2 - 1.0
    den = (w * params.tau_p) ** 2 + (1.0 - w**2 * params.tau_p / (2.0 * params.m)) ** 2
    out = num / den
    return float(out) if out.ndim == 0 else out


def general_gain_relative_noise(omega_norm, b: float, n_p: float):
    """Quiet-pump laser with a general gain law, normalized Q*N against the
    dimensionless frequency W' = Omega tau_p:
    QN = (2 n_p W'^2 / b^2 - 1) / (W'^2 + (1 - W'^2/b)^2).

    Reduces to -1/(1 + W'^2) as b -> infinity and to the rate-equation
    spectrum under b = 2 tau_p m, n_p = n tau_p."""
    if b <= 0 or n_p < 0.5:
        raise ValueError("need b > 0 and n_p >= 1/2")
    x = np.asarray(omega_norm, dtype=float)
    out = (2.0 * n_p * x**2 / b**2 - 1.0) / (x**2 + (1.0 - x**2 / b) ** 2)
    return float(out) if out.ndim == 0 else out


def intracavity_variance(N: float, tau_p: float, m: float) -> float:
    """Fano factor of the intracavity quantum count for the quiet-pump laser:
    var(m)/m = (N + 1/tau_p)/(4m) + 1/2."""
    if N <= 0 or tau_p <= 0 or m <= 0:
        raise ValueError("inputs must be positive")
    return (N + 1.0 / tau_p) / (4.0 * m) + 0.5


def diode_relative_noise(omega, J: float, tau_p: float, eps_over_T: float):
    """Low-power level-ladder diode laser, normalized J*N(Omega).

    This is general_gain_relative_noise specialized to quasi-Fermi-Dirac
    bands at threshold: f_c = (1 + 1/tau_p)/2 = 1 - f_v, so that
    b = (tau_p^2 - 1) script-J / 2 and n_p = (tau_p + 1)^2 / (4 tau_p),
    with script-J = J eps/T. Equivalently, with
    Omega_r^2 = (tau_p^2 - 1) script-J / (2 tau_p^2) and F = (Omega/Omega_r)^2:
    JN = [((tau_p+1)/(tau_p (tau_p-1))) F / script-J - 1] /
         [((tau_p^2-1)/2) script-J F + (1 - F)^2].

    tau_p is in units of the inverse stimulated-transition rate and must
    exceed 1."""
    if tau_p <= 1.0:
        raise InvalidLifetime("formula requires tau_p > 1 (normalized units)")
    if J <= 0 or eps_over_T <= 0:
        raise ValueError("J and eps_over_T must be positive")
    jj = J * eps_over_T
    b = (tau_p**2 - 1.0) * jj / 2.0
    n_p = (tau_p + 1.0) ** 2 / (4.0 * tau_p)
    return general_gain_relative_noise(np.asarray(omega, float) * tau_p, b, n_p)


def diode_relaxation_frequency(J: float, tau_p: float, eps_over_T: float) -> float:
    jj = J * eps_over_T
    return math.sqrt((tau_p**2 - 1.0) * jj / (2.0 * tau_p**2))


def _exp_coshm1_over_a2(g: float, a2: float, t):
    """e^{-g t} (cosh(alpha t) - 1)/alpha^2, continued through alpha^2 <= 0
    and evaluated with merged exponents so large t cannot overflow
    (alpha < g whenever alpha^2 = g^2 - Omega_R^2 > 0)."""
    t = np.asarray(t, dtype=float)
    z = a2 * t * t
    small = np.abs(z) < 1e-8
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        if a2 > 0:
            al = np.sqrt(a2)
            exact = (np.exp((al - g) * t) + np.exp(-(al + g) * t)
                     - 2.0 * np.exp(-g * t)) / (2.0 * a2)
        elif a2 < 0:
            exact = np.exp(-g * t) * (1.0 - np.cos(np.sqrt(-a2) * t)) / (-a2)
        else:
            exact = np.zeros_like(t)
    series = np.exp(-g * t) * 0.5 * t * t * (1.0 + z / 12.0 + z * z / 360.0)
    return np.where(small, series, exact)


def waiting_time_density(t, params: WaitParams):
    """First-emission waiting time w(t) = gamma Omega_R^2 e^{-gamma t}
    (cosh(alpha t) - 1)/alpha^2, alpha^2 = gamma^2 - Omega_R^2; the
    oscillatory branch (Omega_R > gamma) uses the cosine form."""
    t = np.asarray(t, dtype=float)
    g, orr = params.gamma, params.Omega_R
    a2 = g * g - orr * orr
    out = g * orr * orr * _exp_coshm1_over_a2(g, a2, t)
    return float(out) if out.ndim == 0 else out


def waiting_time_laplace(params: WaitParams) -> RationalLaplace:
    """w(p) = gamma Omega_R^2 / (p^3 + 3 gamma p^2 + (2 gamma^2 + Omega_R^2) p
    + gamma Omega_R^2)."""
    g, orr = params.gamma, params.Omega_R
    k = g * orr * orr
    return RationalLaplace([k], [k, 2.0 * g * g + orr * orr, 3.0 * g, 1.0])


def waiting_time_mean(params: WaitParams) -> float:
    return (1.0 + params.a) / params.gamma


def jump_rate_spectrum(omega, params: WaitParams):
    """Spectrum of the emission jump rate, normalized to the mean rate:
    S_r/R = 1 - 3a/[(1+a)^2 + a(5a/4 - 1)(Omega/gamma)^2
    + (a^2/4)(Omega/gamma)^4]."""
    a = params.a
    u2 = (np.asarray(omega, dtype=float) / params.gamma) ** 2
    den = (1.0 + a) ** 2 + a * (1.25 * a - 1.0) * u2 + 0.25 * a * a * u2 * u2
    out = 1.0 - 3.0 * a / den
    return float(out) if out.ndim == 0 else out


def single_electron_noise(a: float):
    """Detector noise of the one-electron laser relative to shot noise:
    S/D = 2a^2 - a + 1; minimum 7/8 at a = 1/4."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("a must be nonnegative")
    out = 2.0 * a * a - a + 1.0
    return float(out) if out.ndim == 0 else out


def single_electron_steady_state(J: float, tau_p: float) -> dict:
    """Steady state of the one-electron laser: mean count mu = J tau_p, and
    the emitter must satisfy gamma/(1+a) = J."""
    if J <= 0 or tau_p <= 0:
        raise ValueError("J and tau_p must be positive")
    return {"mu": J * tau_p, "gamma_over_one_plus_a": J}


def well_constants(d: float) -> dict:
    """Square-well two-level constants for well width d (SI units):
    E_n = pi^2 hbar^2 n^2 / (2 m_e d^2), transition omega_o = (E2-E1)/hbar,
    dipole x12 = 16 d / (9 pi^2), oscillator strength f = 256/(27 pi^2),
    and the Rabi rate per volt of drive amplitude,
    Omega_R = (16/(9 pi^2)) e sqrt(2) V / hbar."""
    if d <= 0:
        raise ValueError("d must be positive")
    hbar = constants.hbar
    m_e = constants.m_e
    e1 = math.pi**2 * hbar**2 / (2.0 * m_e * d * d)
    e2 = 4.0 * e1
    x12 = 16.0 * d / (9.0 * math.pi**2)
    return {
        "E_1": e1,
        "E_2": e2,
        "omega_o": (e2 - e1) / hbar,
        "x12": x12,
        "f": 256.0 / (27.0 * math.pi**2),
        "rabi_per_volt": 16.0 / (9.0 * math.pi**2) * math.sqrt(2.0) * constants.e / hbar,
    }
