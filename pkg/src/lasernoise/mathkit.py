"""Numeric utilities: bicomplex algebra, polynomial roots, rational inverse
Laplace transforms, integer partitions and the I_mn integral table."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class SingularBicomplex(ValueError):
    pass


class DegenerateLeadingCoefficient(ValueError):
    pass


class RepeatedRoots(ValueError):
    pass


class UnsupportedIndexPair(ValueError):
    pass


@dataclass(frozen=True)
class Bicomplex:
    """a + b i1 + c i2 + d i1 i2 with commuting units i1^2 = i2^2 = -1."""

    a: float
    b: float
    c: float
    d: float

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def norm_a(self) -> float:
        return self.a**2 + self.b**2 + self.c**2 + self.d**2

    @property
    def norm_b(self) -> float:
        return 2.0 * (self.a * self.d - self.b * self.c)


BICOMPLEX_ONE = Bicomplex(1.0, 0.0, 0.0, 0.0)


def bicomplex_mul(x: Bicomplex, y: Bicomplex) -> Bicomplex:
    return Bicomplex(
        x.a * y.a - x.b * y.b - x.c * y.c + x.d * y.d,
        x.a * y.b + x.b * y.a - x.c * y.d - x.d * y.c,
        x.a * y.c + x.c * y.a - x.b * y.d - x.d * y.b,
        x.a * y.d + x.d * y.a + x.b * y.c + x.c * y.b,
    )


def _split(x: Bicomplex) -> tuple[complex, complex]:
    # idempotent components along (1 +/- i1 i2)/2
    return complex(x.a + x.d, x.b - x.c), complex(x.a - x.d, x.b + x.c)


def _unsplit(z1: complex, z2: complex) -> Bicomplex:
    return Bicomplex(
        0.5 * (z1.real + z2.real),
        0.5 * (z1.imag + z2.imag),
        0.5 * (z2.imag - z1.imag),
        0.5 * (z1.real - z2.real),
    )


def bicomplex_invert(x: Bicomplex, tol: float = 1e-12) -> Bicomplex:
    """Multiplicative inverse; singular iff A = +/-B with A = a^2+b^2+c^2+d^2,
    B = 2(ad-bc), equivalently one idempotent component vanishes."""
    z1, z2 = _split(x)
    a_norm = x.norm_a
    if a_norm == 0.0 or abs(a_norm - abs(x.norm_b)) < tol * a_norm:
        raise SingularBicomplex(f"non-invertible element {x}")
    return _unsplit(1.0 / z1, 1.0 / z2)


@dataclass(frozen=True)
class PolyRoots:
    roots: tuple
    multiplicity: tuple

    def all_roots(self):
        out = []
        for r, m in zip(self.roots, self.multiplicity):
            out.extend([r] * m)
        return out


def _cluster_roots(roots, tol):
    roots = sorted(roots, key=lambda z: (z.real, z.imag))
    groups: list[list[complex]] = []
    for r in roots:
        if groups and abs(r - groups[-1][0]) <= tol:
            groups[-1].append(r)
        else:
            groups.append([r])
    reps = tuple(sum(g) / len(g) for g in groups)
    mult = tuple(len(g) for g in groups)
    return PolyRoots(reps, mult)


def solve_quadratic(a: float, b: float, c: float) -> PolyRoots:
    """Roots of a p^2 + b p + c, complex when the discriminant is negative."""
    if a == 0:
        raise DegenerateLeadingCoefficient("leading coefficient is zero")
    disc = complex(b * b - 4.0 * a * c)
    sq = np.sqrt(disc)
    r1 = (-b + sq) / (2.0 * a)
    r2 = (-b - sq) / (2.0 * a)
    scale = max(1.0, abs(a), abs(b), abs(c))
    return _cluster_roots([complex(r1), complex(r2)], 1e-9 * scale)


def solve_cubic(a2: float, a1: float, a0: float) -> PolyRoots:
    """Roots of the monic cubic p^3 + a2 p^2 + a1 p + a0.

    Cardano resolvent with principal branches as the fast path; residuals are
    checked and a companion-matrix eigen solve is the fallback."""
    q = a1 / 3.0 - a2 * a2 / 9.0
    r = (a1 * a2 - 3.0 * a0) / 6.0 - a2**3 / 27.0
    s = np.sqrt(complex(q**3 + r * r))
    s1 = complex(r + s) ** (1.0 / 3.0)
    s2 = -q / s1 if abs(s1) > 0 else 0.0 + 0.0j
    z1 = s1 + s2 - a2 / 3.0
    w = 0.5j * math.sqrt(3.0) * (s1 - s2)
    z2 = -0.5 * (s1 + s2) - a2 / 3.0 + w
    z3 = -0.5 * (s1 + s2) - a2 / 3.0 - w
    roots = [z1, z2, z3]
    coeffs = np.array([1.0, a2, a1, a0])
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    if max(abs(np.polyval(coeffs, z)) for z in roots) > 1e-8 * scale:
        roots = list(np.roots(coeffs))
    cleaned = []
    for z in roots:
        z = complex(z)
        if abs(z.imag) < 1e-10 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        cleaned.append(z)
    return _cluster_roots(cleaned, 1e-6 * scale)


def heaviside_inverse_laplace(coeffs, t):
    """Inverse Laplace transform of 1/f(p) for a real polynomial f with
    distinct roots: sum_k exp(p_k t)/f'(p_k).

    coeffs are in descending order (numpy convention)."""
    coeffs = np.asarray(coeffs, dtype=float)
    roots = np.roots(coeffs)
    scale = max(1.0, float(np.max(np.abs(roots))) if len(roots) else 1.0)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < 1e-8 * scale:
                raise RepeatedRoots("polynomial has (nearly) repeated roots")
    dcoeffs = np.polyder(coeffs)
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape, dtype=complex)
    for p in roots:
        total += np.exp(p * t) / np.polyval(dcoeffs, p)
    if np.any(np.abs(total.imag) > 1e-9 * (1.0 + np.abs(total.real))):
        raise ArithmeticError("imaginary residue above tolerance")
    out = total.real
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PartitionTable:
    r_max: int
    values: tuple  # exact ints, p(0..r_max)

    def __getitem__(self, r: int) -> int:
        return self.values[r]


def partitions(r_max: int) -> PartitionTable:
    """Exact partition counts p(0..r_max) by the Euler pentagonal recurrence."""
    if r_max < 0:
        raise ValueError("r_max must be nonnegative")
    p = [0] * (r_max + 1)
    p[0] = 1
    for r in range(1, r_max + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > r and g2 > r:
                break
            sign = 1 if k % 2 == 1 else -1
            if g1 <= r:
                total += sign * p[r - g1]
            if g2 <= r:
                total += sign * p[r - g2]
            k += 1
        p[r] = total
    return PartitionTable(r_max, tuple(p))


def bounded_partition_counts(a: int, b: int) -> list:
    """Coefficients of the Gaussian binomial [a+b, a]_x: number of partitions
    of r into at most a parts, each part at most b, for r = 0..a*b."""
    if a < 0 or b < 0:
        raise ValueError("a, b must be nonnegative")
    # multiply (1-x^(a+i)), then divide by (1-x^i), all exact integer ops
    poly = [1]
    for i in range(1, b + 1):
        k = a + i
        new = poly + [0] * k
        for j, cj in enumerate(poly):
            new[j + k] -= cj
        poly = new
        quot = [0] * (len(poly) - i)
        rem = list(poly)
        for j in range(len(quot)):
            quot[j] = rem[j]
            rem[j + i] += rem[j]  # dividing by (1 - x^i)
        poly = quot
    want = a * b + 1
    poly = poly[:want] + [0] * (want - len(poly))
    return poly


def bounded_partitions(a: int, b: int, r: int) -> int:
    if r < 0:
        return 0
    if r > a * b:
        return 0
    return bounded_partition_counts(a, b)[r]


_IMN_SET = {(1, 0), (1, 2), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2), (3, 3), (3, 4)}


def imn_integral(m: int, n: int, g: float, y: float) -> float:
    """Closed forms of the I_mn moment integrals used by inhomogeneous gain
    models; only the tabulated (m, n) pairs are supported."""
    if (m, n) not in _IMN_SET:
        raise UnsupportedIndexPair(f"(m,n)=({m},{n}) not tabulated")
    if g <= 1.0:
        raise ValueError("requires g > 1")
    y2 = y * y
    y4 = y2 * y2
    if (m, n) == (1, 0):
        return 8.0 * g
    if (m, n) == (1, 2):
        return 8.0 * y2 + 8.0 * g * (g - 1.0)
    if (m, n) == (2, 0):
        return 4.0 * y2 * (g - 1.0) + 4.0 * g * g * (g + 1.0)
    if (m, n) == (2, 1):
        return 8.0 * g * y
    if (m, n) == (3, 0):
        return (3.0 * (g - 1.0) * y4 + 6.0 * g * (g * g - 1.0) * y2
                + g**3 * (3.0 * g * g + 3.0 * g + 2.0))
    if (m, n) == (3, 1):
        return 2.0 * y * (y2 * (g - 1.0) + g * g * (g + 3.0))
    if (m, n) == (3, 2):
        return ((g - 1.0) * y4 + 2.0 * g * (g * g + 3.0) * y2
                + g**3 * (g - 1.0) * (g + 2.0))
    if (m, n) == (3, 3):
        return 2.0 * y * ((3.0 * g + 1.0) * y2 + 3.0 * g * g * (g - 1.0))
    # (3, 4)
    return ((3.0 * g + 5.0) * y4 + 6.0 * g * (g * g - 1.0) * y2
            + g**3 * (3.0 * g - 2.0) * (g - 1.0))


def imn_weight(x: float, g: float) -> float:
    """Lorentzian weight of unit area entering the I_mn integrals."""
    return ((g - 1.0) / math.pi) / ((g - 1.0) ** 2 + x * x)
