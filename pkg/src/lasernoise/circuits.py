"""Deterministic noise calculus: tuned circuits, attenuator/amplifier/beam
splitting noise propagation, feedback amplifiers with gain compression, and
the linewidth formula catalog.

Beam quadrature noise is normalized so that X = Y = 1 is the C-state (Poisson
detection statistics at any carrier phase). Circuit phasors use the
exp(-i omega t) convention: Y_C = -j C omega, Z_L = -j L omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad


class InvalidGain(ValueError):
    pass


class SingularDenominator(ValueError):
    pass


class ResonantDenominator(ValueError):
    pass


class QuadratureFailure(ValueError):
    pass


@dataclass(frozen=True)
class BeamNoise:
    X: float
    Y: float
    rate: float

    def __post_init__(self):
        if self.X < 0 or self.Y < 0 or self.rate <= 0:
            raise ValueError("need X, Y >= 0 and rate > 0")

    @property
    def relative_noise(self) -> float:
        """N = (X - 1)/rate, the attenuation invariant."""
        return (self.X - 1.0) / self.rate


@dataclass(frozen=True)
class TunedCircuit:
    L: float
    C: float
    G: float

    def __post_init__(self):
        if min(self.L, self.C, self.G) <= 0:
            raise ValueError("L, C, G must be positive")

    @property
    def omega0(self) -> float:
        return 1.0 / math.sqrt(self.L * self.C)

    @property
    def tau_p(self) -> float:
        return self.C / self.G


@dataclass(frozen=True)
class LinewidthInputs:
    """Partials of the circuit admittance Y = G + iB with respect to the
    active-medium population n and the frequency omega, plus the noise-source
    spectral density S_C (per quadrature; separate values optional)."""

    G_n: float
    B_n: float
    G_w: float
    B_w: float
    S_C: float
    S_C_prime: float | None = None
    S_C_second: float | None = None

    def sources(self) -> tuple[float, float]:
        sp = self.S_C if self.S_C_prime is None else self.S_C_prime
        ss = self.S_C if self.S_C_second is None else self.S_C_second
        return sp, ss


@dataclass(frozen=True)
class GainElement:
    J: float
    alpha: float
    n_p: float

    def __post_init__(self):
        if self.J <= 0 or self.n_p < 1:
            raise ValueError("need J > 0 and n_p >= 1")


# ---------------------------------------------------------------------------
# circuit elements (for the dispersion identity and oracle checks)

@dataclass(frozen=True)
class Capacitor:
    C: float

    def admittance(self, w: float) -> complex:
        return -1j * self.C * w


@dataclass(frozen=True)
class Inductor:
    L: float

    def admittance(self, w: float) -> complex:
        return 1.0 / (-1j * self.L * w)


@dataclass(frozen=True)
class Conductor:
    G: float

    def admittance(self, w: float) -> complex:
        return complex(self.G)


@dataclass(frozen=True)
class Series:
    parts: tuple

    def admittance(self, w: float) -> complex:
        return 1.0 / sum(1.0 / p.admittance(w) for p in self.parts)


@dataclass(frozen=True)
class Parallel:
    parts: tuple

    def admittance(self, w: float) -> complex:
        return sum(p.admittance(w) for p in self.parts)


def _energy_terms(net, w: float, v: complex):
    """Sum of C_k V_k^2 - L_k I_k^2 over primitive elements (complex squares),
    with v the voltage phasor across `net`."""
    if isinstance(net, Capacitor):
        return net.C * v * v
    if isinstance(net, Inductor):
        i = v * net.admittance(w)
        return -net.L * i * i
    if isinstance(net, Conductor):
        return 0.0 + 0.0j
    if isinstance(net, Parallel):
        return sum(_energy_terms(p, w, v) for p in net.parts)
    if isinstance(net, Series):
        i = v * net.admittance(w)
        return sum(_energy_terms(p, w, i / p.admittance(w)) for p in net.parts)
    raise TypeError(f"unknown element {net!r}")


def admittance_derivative_check(network, omega: float, V: complex = 1.0 + 0j,
                                h: float = 1e-6) -> float:
    """Residual of the dispersion identity
    i V^2 dY/domega = sum_k (C_k V_k^2 - L_k I_k^2),
    with dY/domega from central differences."""
    dw = h * max(1.0, abs(omega))
    dy = (network.admittance(omega + dw) - network.admittance(omega - dw)) / (2 * dw)
    lhs = 1j * V * V * dy
    rhs = _energy_terms(network, omega, V)
    return abs(lhs - rhs)


def tuned_circuit_fwhp(tc: TunedCircuit) -> dict:
    """Resonance frequency, full width at half dissipated power and lifetime
    of the parallel G-L-C circuit: delta_omega = G/C = 1/tau_p."""
    return {"omega0": tc.omega0, "delta_omega": tc.G / tc.C, "tau_p": tc.tau_p}


# ---------------------------------------------------------------------------
# beam-noise propagation

def attenuator_propagate(beam: BeamNoise, gain: float) -> BeamNoise:
    """Cold attenuator: X_out = G X_in + 1 - G; preserves the C-state and the
    relative noise."""
    if not (0.0 < gain <= 1.0):
        raise InvalidGain("attenuator gain must be in (0, 1]")
    return BeamNoise(gain * beam.X + 1.0 - gain,
                     gain * beam.Y + 1.0 - gain,
                     gain * beam.rate)


def amplifier_propagate(beam: BeamNoise, gain: float) -> BeamNoise:
    """Ideal linear amplifier: X_out = G X_in + G - 1."""
    if gain < 1.0:
        raise InvalidGain("amplifier gain must be >= 1")
    return BeamNoise(gain * beam.X + gain - 1.0,
                     gain * beam.Y + gain - 1.0,
                     gain * beam.rate)


def split_beam(N_rel: float, D_list) -> np.ndarray:
    """Cross-spectral matrix of detection rates after a lossless split:
    S_kl = delta_kl D_k + D_k D_l N."""
    d = np.asarray(D_list, dtype=float)
    if np.any(d <= 0):
        raise ValueError("rates must be positive")
    return np.diag(d) + np.outer(d, d) * N_rel


def modulated_source_noise(S_mod: float, D: float) -> dict:
    """Noise added by modulating the drive current: S_mod is the spectral
    density of the relative modulation dI'/I; the detected beam acquires
    N = 4 S_mod >= 0 (always at or above shot) and
    S_dD = 4 D^2 S_mod + D."""
    if S_mod < 0:
        raise ValueError("S_mod must be nonnegative")
    return {"relative_noise": 4.0 * S_mod,
            "detection_spectrum": 4.0 * D * D * S_mod + D}


def feedback_stage(beam: BeamNoise, gain: float, f: float) -> BeamNoise:
    """Amplifier with quadrature feedback of strength f:
    Y_out = G X_in + G - 1,
    X_out = (G Y_in + f^2 (G-1)) / (G + f (G-1))^2;
    the minimum over f sits at f = Y_in where 1/X_out = G/Y_in + G - 1."""
    if gain <= 1.0:
        raise InvalidGain("feedback stage needs gain > 1")
    y_out = gain * beam.X + gain - 1.0
    x_out = (gain * beam.Y + f * f * (gain - 1.0)) / (gain + f * (gain - 1.0)) ** 2
    return BeamNoise(x_out, y_out, gain * beam.rate)


def c_amplifier(beam: BeamNoise, gain1: float) -> BeamNoise:
    """Two-stage amplifier (second-stage gain 2 - 1/G1, total G = 2 G1 - 1)
    that maps the C-state to the C-state:
    X_out = (X_in + mu)/(mu X_in + 1), mu = (G-1)/(G+1)."""
    if gain1 < 1.0:
        raise InvalidGain("first-stage gain must be >= 1")
    g = 2.0 * gain1 - 1.0
    mu = (g - 1.0) / (g + 1.0)
    return BeamNoise((beam.X + mu) / (mu * beam.X + 1.0),
                     (beam.Y + mu) / (mu * beam.Y + 1.0),
                     g * beam.rate)


def feedback_with_compression(beam: BeamNoise, gain: float, kappa: float,
                              f: float) -> BeamNoise:
    """Feedback stage with gain compression kappa:
    X_out = ((g + kappa)^2 Y_in + f^2 (G-1)) / (f (G-1) + G + kappa g)^2,
    g = sqrt(G). The optimum over f, f* = (g+kappa) Y_in / g, gives
    1/X_out = G/Y_in + G - 1 for every kappa."""
    if gain <= 1.0:
        raise InvalidGain("feedback stage needs gain > 1")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    g = math.sqrt(gain)
    y_out = gain * beam.X + gain - 1.0
    x_out = (((g + kappa) ** 2 * beam.Y + f * f * (gain - 1.0))
             / (f * (gain - 1.0) + gain + kappa * g) ** 2)
    return BeamNoise(x_out, y_out, gain * beam.rate)


def compression_optimal_f(beam: BeamNoise, gain: float, kappa: float) -> float:
    g = math.sqrt(gain)
    return (g + kappa) * beam.Y / g


# ---------------------------------------------------------------------------
# linewidths

def st_linewidth(Q: float, tau_p: float, n_p: float = 1.0) -> float:
    """Lorentzian full width of an oscillator emitting Q quanta per second
    from a resonator of lifetime tau_p: delta_omega = n_p/(Q tau_p^2)."""
    if Q <= 0 or tau_p <= 0 or n_p < 1:
        raise ValueError("need Q, tau_p > 0 and n_p >= 1")
    return n_p / (Q * tau_p**2)


def general_linewidth(inputs: LinewidthInputs) -> float:
    """delta_omega = (B_n^2 S_C' + G_n^2 S_C'') / (B_n G_w - G_n B_w)^2."""
    den = inputs.B_n * inputs.G_w - inputs.G_n * inputs.B_w
    scale = max(abs(inputs.B_n * inputs.G_w), abs(inputs.G_n * inputs.B_w), 1e-300)
    if abs(den) < 1e-12 * scale:
        raise SingularDenominator("B_n G_w - G_n B_w vanishes")
    sp, ss = inputs.sources()
    return (inputs.B_n**2 * sp + inputs.G_n**2 * ss) / den**2


def dispersion_factor(inputs: LinewidthInputs) -> float:
    """h = G_w / B_w; the linewidth enhancement is K = 1 + h^2."""
    if inputs.B_w == 0:
        raise SingularDenominator("B_w vanishes")
    return inputs.G_w / inputs.B_w


def combined_alpha_K(delta_omega_linear: float, alpha: float, h: float) -> float:
    """delta_omega = delta_omega_linear (1 + alpha_A^2)/2 * K with
    alpha_A = (alpha + h)/(1 - alpha h) and K = 1 + h^2."""
    if abs(1.0 - alpha * h) < 1e-14 * max(1.0, abs(alpha * h)):
        raise ResonantDenominator("alpha h = 1")
    alpha_a = (alpha + h) / (1.0 - alpha * h)
    return delta_omega_linear * 0.5 * (1.0 + alpha_a**2) * (1.0 + h * h)


def multi_element_linewidth(elements, h: float, tau_p: float, D: float,
                            reading: str = "product") -> float:
    """Linewidth of an oscillator with several gain elements, drive-weighted:
    delta_omega * D = (1/tau_p^2) <n_p (1 + alpha^2)> / (1 - <alpha> h)^2,
    averages weighted by J_k. reading="ratio" selects the alternative
    <n_p/(1+alpha^2)> numerator."""
    if not elements:
        raise ValueError("need at least one element")
    j = np.array([e.J for e in elements])
    alpha = np.array([e.alpha for e in elements])
    n_p = np.array([e.n_p for e in elements])
    wsum = j.sum()
    mean_alpha = float((j * alpha).sum() / wsum)
    if reading == "product":
        num = float((j * n_p * (1.0 + alpha**2)).sum() / wsum)
    elif reading == "ratio":
        num = float((j * n_p / (1.0 + alpha**2)).sum() / wsum)
    else:
        raise ValueError("reading must be 'product' or 'ratio'")
    if abs(1.0 - mean_alpha * h) < 1e-14 * max(1.0, abs(mean_alpha * h)):
        raise ResonantDenominator("<alpha> h = 1")
    return num / (tau_p**2 * (1.0 - mean_alpha * h) ** 2) / D


def inhomogeneous_linewidth_rinf(n: float, D: float, tau_p: float) -> float:
    """Strongly inhomogeneous limit:
    delta_omega * D * tau_p^2 = (1/n^2 + 10 + 5 n^2)/32; equals 1/2 at n=1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (1.0 / n**2 + 10.0 + 5.0 * n**2) / (32.0 * D * tau_p**2)


def ring_linewidth(ell, alpha, Gamma: float, tau: float, D: float) -> float:
    """Ring laser with gain distributed along the loop, gamma the local
    accumulated gain in [1, Gamma]:
    delta_omega * D * tau^2 = (1/2) int dgamma/ell * int dgamma (1+alpha^2)
    ell / gamma^2."""
    if Gamma <= 1.0:
        raise ValueError("Gamma must exceed 1")
    try:
        i1, e1 = quad(lambda g: 1.0 / ell(g), 1.0, Gamma, limit=200)
        i2, e2 = quad(lambda g: (1.0 + alpha(g) ** 2) * ell(g) / g**2,
                      1.0, Gamma, limit=200)
    except Exception as exc:  # pragma: no cover
        raise QuadratureFailure(str(exc)) from exc
    if max(e1, e2) > 1e-9 * max(1.0, abs(i1), abs(i2)):
        raise QuadratureFailure("quadrature did not converge to 1e-9")
    return 0.5 * i1 * i2 / (D * tau**2)


def lorentzian_conductance(omega, l: float, c: float, r: float):
    """g(omega) = r/(r^2 + (l omega - 1/(c omega))^2); peak 1/r at
    l c omega^2 = 1."""
    if min(l, c, r) <= 0:
        raise ValueError("l, c, r must be positive")
    omega = np.asarray(omega, dtype=float)
    x = l * omega - 1.0 / (c * omega)
    out = r / (r * r + x * x)
    return float(out) if out.ndim == 0 else out
