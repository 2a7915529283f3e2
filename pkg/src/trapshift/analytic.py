"""Closed-form infinite-volume reference quantities for the contact potential.

Scattering off V(x) = V0*delta(x) in 1D is exactly solvable:

    cot delta(E) = -sqrt(2 m E) / (m V0)
    f(E) = -m V0 / (sqrt(2 m E) + i m V0)
    T(E) = 1 + i f(E) = cos(delta) e^{i delta}
    eps_B = -m V0^2 / 2          (single bound state, V0 < 0 only)

and the infinite-volume limit of the integrated-correlator difference
C(t) - C0(t) has the closed form

    (1/2) erfc(m V0 sqrt(i t / 2m)) exp((m V0)^2 i t / 2m) - 1/2

valid for both signs of V0 (for V0 < 0 the bound-state term is already
contained via erfc(-z) = 2 - erfc(z)). Euclidean time means t = -i tau,
so the erfc argument becomes real.

The complementary error function is implemented once for complex
argument (Maclaurin series / continued fraction) and reused everywhere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScatteringParams",
    "complex_erfc",
    "phase_shift_cot",
    "phase_shift_angle",
    "Amplitudes",
    "amplitudes",
    "bound_state_energy",
    "icf_infinite_limit",
    "free_resolvent",
]

_SQRT_PI = math.sqrt(math.pi)

# Maclaurin/continued-fraction switchover. The series loses about
# exp(2*Re(z)^2)*eps_machine of relative accuracy to cancellation, so it
# is restricted to Re(z) <= 2.5 (worst case ~6e-11); the Lentz continued
# fraction converges for Re(z) > 0 and is used beyond.
_SERIES_RE_MAX = 2.5


@dataclass(frozen=True)
class ScatteringParams:
    """Mass and contact-coupling strength; the sign of the coupling
    selects repulsive (>0) or attractive (<0)."""

    mass: float
    coupling: float

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.coupling == 0:
            raise ValueError("coupling must be nonzero")


def _erfc_series(z: complex) -> complex:
    # erfc(z) = 1 - (2/sqrt(pi)) sum_n (-1)^n z^(2n+1) / (n! (2n+1))
    term = z
    total = z
    zz = z * z
    for n in range(1, 4000):
        term *= -zz / n
        inc = term / (2 * n + 1)
        total += inc
        if abs(inc) <= 1e-18 * abs(total):
            break
    return 1.0 - (2.0 / _SQRT_PI) * total


def _erfc_continued_fraction(z: complex) -> complex:
    # sqrt(pi) e^{z^2} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    # evaluated with the modified Lentz algorithm; valid for Re(z) > 0.
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0 + 0.0j
    a = 1.0
    for i in range(1, 20000):
        d = z + a * d
        if d == 0:
            d = tiny
        c = z + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        a = i / 2.0
    return cmath.exp(-z * z) / _SQRT_PI * f


def complex_erfc(z: complex) -> complex:
    """erfc(z) for complex z.

    Relative accuracy is 1e-10 or better wherever the result is
    representable in double precision; outside that range the value
    under/overflows gracefully.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite argument {z!r}")
    if z.real < 0:
        return 2.0 - complex_erfc(-z)
    if z.real <= _SERIES_RE_MAX:
        return _erfc_series(z)
    return _erfc_continued_fraction(z)


def phase_shift_cot(energy: float, p: ScatteringParams) -> float:
    """cot delta(E) = -sqrt(2 m E)/(m V0) for E > 0."""
    if np.real(energy) <= 0 and np.imag(energy) == 0:
        raise ValueError(f"energy must be positive, got {energy}")
    s = np.sqrt(2.0 * p.mass * energy + 0j)
    out = -s / (p.mass * p.coupling)
    return out.real if np.imag(energy) == 0 else out


def phase_shift_angle(energy: float, p: ScatteringParams) -> float:
    """delta(E) in (-pi/2, pi/2].

    Convention-bearing accessor: the branch places repulsive couplings in
    (-pi/2, 0) and attractive ones in (0, pi/2), continuous in E. All
    quantitative comparisons in this package are done at the cot level.
    """
    c = phase_shift_cot(energy, p)
    angle = math.atan2(1.0, c)
    if angle > math.pi / 2:
        angle -= math.pi
    return angle


@dataclass(frozen=True)
class Amplitudes:
    scattering: complex          # f(E)
    transmission: complex        # T(E) = 1 + i f(E)
    dlog_transmission: complex   # d ln T / dE


def amplitudes(energy: complex, p: ScatteringParams) -> Amplitudes:
    """f, T and d(ln T)/dE at real E > 0 or complex E with Im E > 0.

    d ln T/dE is evaluated in closed form from
    ln T = (1/2) ln(2mE) - ln(sqrt(2mE) + i m V0).
    """
    e = complex(energy)
    if e == 0:
        raise ValueError("E = 0 is the branch point")
    if e.imag == 0 and e.real <= 0:
        raise ValueError(f"need E > 0 on the real axis, got {energy}")
    m, v0 = p.mass, p.coupling
    s = cmath.sqrt(2.0 * m * e)
    f = -m * v0 / (s + 1j * m * v0)
    t = 1.0 + 1j * f
    dlog = 1.0 / (2.0 * e) - (m / s) / (s + 1j * m * v0)
    return Amplitudes(f, t, dlog)


def bound_state_energy(p: ScatteringParams) -> float | None:
    """-m V0^2 / 2 for attractive coupling; None otherwise."""
    if p.coupling >= 0:
        return None
    return -0.5 * p.mass * p.coupling**2


def icf_infinite_limit(t: float, p: ScatteringParams, kind: str = "real") -> complex:
    """Infinite-volume limit of C(t) - C0(t).

    kind="real": t > 0 is real time and sqrt(it) is taken on the
    principal branch (sqrt(t) e^{i pi/4}). kind="euclidean": t is the
    Euclidean time tau > 0 (t = -i tau), the argument is real and so is
    the result. t = 0 returns exactly 0. The combined erfc form holds for
    both signs of the coupling; attractive couplings grow like
    exp(-eps_B tau) in Euclidean time through erfc(-z) = 2 - erfc(z).
    """
    if t == 0:
        return 0.0 + 0.0j
    if kind == "real":
        it = 1j * t
    elif kind == "euclidean":
        if t < 0:
            raise ValueError(f"Euclidean time must be non-negative, got {t}")
        it = complex(t)
    else:
        raise ValueError(f"unknown time kind {kind!r}")
    m, v0 = p.mass, p.coupling
    z = m * v0 * cmath.sqrt(it / (2.0 * m))
    return 0.5 * complex_erfc(z) * cmath.exp((m * v0) ** 2 * it / (2.0 * m)) - 0.5


def free_resolvent(energy: complex, box_size: float, mode: str, mass: float) -> complex:
    """Volume-normalized free resolvent trace (1/L) * sum_n 1/(E - eps_n).

    mode="box":      m cot(sqrt(2mE) L/2) / sqrt(2mE)   (poles at the box levels)
    mode="infinite": -i m / sqrt(2mE)                   (branch cut only)
    mode="il":       -i m coth(sqrt(2mE) L/2) / sqrt(2mE)

    The iL form approaches the infinite-volume one exponentially fast
    in L; the box form requires E off the real level positions.
    """
    e = complex(energy)
    m = mass
    s = cmath.sqrt(2.0 * m * e)
    if mode == "box":
        if e.imag == 0:
            # reject evaluation too close to a free box level
            n_near = round(float(s.real) * box_size / (2.0 * math.pi))
            eps_near = (2.0 * math.pi * n_near / box_size) ** 2 / (2.0 * m)
            if abs(e.real - eps_near) < 1e-12:
                raise ValueError(
                    f"E={energy} within 1e-12 of free level eps_{n_near}={eps_near}"
                )
        return m / cmath.tan(s * box_size / 2.0) / s
    if mode == "infinite":
        if e.real <= 0 and e.imag == 0:
            raise ValueError(f"need Re E > 0, got {energy}")
        return -1j * m / s
    if mode == "il":
        if e.real <= 0 and e.imag == 0:
            raise ValueError(f"need Re E > 0, got {energy}")
        return -1j * m / cmath.tanh(s * box_size / 2.0) / s
    raise ValueError(f"unknown resolvent mode {mode!r}")
