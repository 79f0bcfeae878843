"""Complex-argument special functions for spherical-wave expansions.

Conventions used throughout the package:

* Spherical harmonics Y_lm are orthonormal and carry the Condon-Shortley
  phase.  For directions with complex polar angle (evanescent beams) both
  cos(theta) and sin(theta) are passed explicitly, so no square-root branch
  is ever taken inside the recurrences.
* ``Ybar_lm = (-1)^m Y_{l,-m}`` is the analytic continuation of the complex
  conjugate; it coincides with conj(Y_lm) for real angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, SingularArgumentError

# Default and hard cap for the multipole cutoff used by the physics modules.
LMAX_DEFAULT = 7
LMAX_CAP = 14


@dataclass(frozen=True)
class AngularIndex:
    """Orbital/azimuthal index pair (l, m) with |m| <= l."""

    l: int
    m: int

    def __post_init__(self):
        if self.l < 0:
            raise InvalidArgumentError(f"l must be >= 0, got {self.l}")
        if abs(self.m) > self.l:
            raise InvalidArgumentError(f"|m| <= l violated: l={self.l}, m={self.m}")


def sph_bessel(lmax: int, z: complex) -> np.ndarray:
    """Spherical Bessel functions j_0..j_lmax at complex argument z.

    Upward recurrence where it is stable (|z| > lmax), downward Miller
    recurrence otherwise, normalized against the closed-form j_0.
    """
    if lmax < 0:
        raise InvalidArgumentError(f"lmax must be >= 0, got {lmax}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidArgumentError(f"non-finite argument {z!r}")
    out = np.zeros(lmax + 1, dtype=complex)
    if z == 0:
        out[0] = 1.0
        return out
    if abs(z) > lmax + 1:
        # upward recurrence is stable here
        out[0] = np.sin(z) / z
        if lmax >= 1:
            out[1] = np.sin(z) / z**2 - np.cos(z) / z
        for l in range(2, lmax + 1):
            out[l] = (2 * l - 1) / z * out[l - 1] - out[l - 2]
        return out
    # Miller's downward recurrence from a padded start order
    nstart = lmax + int(abs(z)) + 20
    jp = 0.0 + 0.0j
    jc = 1e-30 + 0.0j
    tmp = np.zeros(lmax + 1, dtype=complex)
    for l in range(nstart, -1, -1):
        jm = (2 * l + 3) / z * jc - jp
        jp, jc = jc, jm
        if l <= lmax:
            tmp[l] = jc
        # rescale to avoid overflow of the unnormalized solution
        if abs(jc) > 1e250:
            jp /= 1e250
            jc /= 1e250
            tmp *= 1e-250
    j0 = np.sin(z) / z
    scale = j0 / tmp[0]
    return tmp * scale


def sph_hankel1(lmax: int, z: complex) -> np.ndarray:
    """Outgoing spherical Hankel functions h^(1)_0..h^(1)_lmax.

    Seeds h_0, h_1 are closed forms free of cancellation; upward recurrence
    is stable because |h_l| grows with l.
    """
    if lmax < 0:
        raise InvalidArgumentError(f"lmax must be >= 0, got {lmax}")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidArgumentError(f"non-finite argument {z!r}")
    if z == 0:
        raise SingularArgumentError("h^(1)_l is singular at z = 0")
    out = np.zeros(lmax + 1, dtype=complex)
    eiz = np.exp(1j * z)
    out[0] = -1j * eiz / z
    if lmax >= 1:
        out[1] = -eiz * (z + 1j) / z**2
    for l in range(2, lmax + 1):
        out[l] = (2 * l - 1) / z * out[l - 1] - out[l - 2]
    return out


def sph_neumann(lmax: int, z: complex) -> np.ndarray:
    """Spherical Neumann functions y_0..y_lmax via y_l = (h_l - j_l)/i."""
    return (sph_hankel1(lmax, z) - sph_bessel(lmax, z)) / 1j


def zl_derivative(zl: np.ndarray, z: complex) -> np.ndarray:
    """Derivative of any spherical Bessel family from its value table.

    Uses f_l' = f_{l-1} - (l+1)/z f_l (f_0' = -f_1).
    """
    lmax = len(zl) - 1
    out = np.zeros_like(zl)
    if lmax >= 1:
        out[0] = -zl[1]
    ls = np.arange(1, lmax + 1)
    out[1:] = zl[:-1] - (ls + 1) / z * zl[1:]
    return out


def assoc_legendre(lmax: int, x: float) -> np.ndarray:
    """Unnormalized associated Legendre table P_l^m(x), 0 <= m <= l <= lmax.

    Condon-Shortley phase included.  Entries with m > l are zero.
    """
    if lmax < 0:
        raise InvalidArgumentError(f"lmax must be >= 0, got {lmax}")
    x = float(x)
    if not math.isfinite(x) or abs(x) > 1.0:
        raise InvalidArgumentError(f"|x| <= 1 required, got {x!r}")
    p = np.zeros((lmax + 1, lmax + 1))
    s = math.sqrt(max(0.0, 1.0 - x * x))
    p[0, 0] = 1.0
    for m in range(1, lmax + 1):
        p[m, m] = -(2 * m - 1) * s * p[m - 1, m - 1]
    for m in range(lmax):
        p[m + 1, m] = (2 * m + 1) * x * p[m, m]
    for m in range(lmax + 1):
        for l in range(m + 2, lmax + 1):
            p[l, m] = ((2 * l - 1) * x * p[l - 1, m] - (l + m - 1) * p[l - 2, m]) / (l - m)
    return p


def legendre_normalized(lmax: int, ct: complex, st: complex) -> np.ndarray:
    """Spherical-harmonic-normalized Legendre table for possibly complex angles.

    Returns Ptilde[l, m] = sqrt((2l+1)(l-m)!/(4 pi (l+m)!)) P_l^m(ct) for
    0 <= m <= l, evaluated from (ct, st) without taking any square root of
    1 - ct^2; the caller chooses the branch by supplying st.
    """
    p = np.zeros((lmax + 1, lmax + 1), dtype=complex)
    p[0, 0] = math.sqrt(1.0 / (4.0 * math.pi))
    for m in range(1, lmax + 1):
        p[m, m] = -math.sqrt((2 * m + 1) / (2.0 * m)) * st * p[m - 1, m - 1]
    for m in range(lmax):
        p[m + 1, m] = math.sqrt(2 * m + 3) * ct * p[m, m]
    for m in range(lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            p[l, m] = a * (ct * p[l - 1, m] - b * p[l - 2, m])
    return p


def ylm_table(lmax: int, ct: complex, st: complex, phi: float | complex) -> np.ndarray:
    """Full Y_lm table, indexed [l, m] with m in -l..l stored at [l, m % cols].

    Returned as a dense (lmax+1, 2*lmax+1) array with column index m + lmax.
    """
    pt = legendre_normalized(lmax, ct, st)
    out = np.zeros((lmax + 1, 2 * lmax + 1), dtype=complex)
    for m in range(lmax + 1):
        eimp = np.exp(1j * m * phi)
        for l in range(m, lmax + 1):
            out[l, m + lmax] = pt[l, m] * eimp
            if m > 0:
                out[l, -m + lmax] = (-1) ** m * pt[l, m] / eimp
    return out


def ylm(l: int, m: int, ct: complex, st: complex, phi: float | complex) -> complex:
    """Single spherical harmonic Y_lm for possibly complex angles."""
    if abs(m) > l:
        return 0.0
    pt = legendre_normalized(l, ct, st)
    if m >= 0:
        return pt[l, m] * np.exp(1j * m * phi)
    return (-1) ** m * pt[l, -m] * np.exp(1j * m * phi)


@lru_cache(maxsize=200000)
def _wigner3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Exact Wigner 3j symbol via the Racah formula in rational arithmetic."""
    if m1 + m2 + m3 != 0:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    f = math.factorial
    delta = Fraction(
        f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3), f(j1 + j2 + j3 + 1)
    )
    norm = delta * (
        f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3)
    )
    kmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    kmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            f(k)
            * f(j1 + j2 - j3 - k)
            * f(j1 - m1 - k)
            * f(j2 + m2 - k)
            * f(j3 - j2 + m1 + k)
            * f(j3 - j1 - m2 + k)
        )
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    sign = (-1) ** (j1 - j2 - m3)
    return sign * float(total) * math.sqrt(float(norm))


def wigner3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    return _wigner3j(j1, j2, j3, m1, m2, m3)


@lru_cache(maxsize=200000)
def clebsch_gordan(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    """<j1 m1; j2 m2 | J M> from the exact 3j symbol."""
    if m1 + m2 != M:
        return 0.0
    return (-1) ** (j1 - j2 + M) * math.sqrt(2 * J + 1) * _wigner3j(j1, j2, J, m1, m2, -M)


def gaunt(a1: AngularIndex, a2: AngularIndex, a3: AngularIndex) -> float:
    """Gaunt integral int Y_{a1} Y_{a2} conj(Y_{a3}) dOmega.

    Exact zero under any selection-rule violation (total function).
    """
    l1, m1 = a1.l, a1.m
    l2, m2 = a2.l, a2.m
    l3, m3 = a3.l, a3.m
    if m3 != m1 + m2:
        return 0.0
    if l3 < abs(l1 - l2) or l3 > l1 + l2:
        return 0.0
    if (l1 + l2 + l3) % 2 != 0:
        return 0.0
    pref = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1) / (4.0 * math.pi))
    return (
        (-1) ** m3
        * pref
        * _wigner3j(l1, l2, l3, 0, 0, 0)
        * _wigner3j(l1, l2, l3, m1, m2, -m3)
    )


def gaunt_lmm(l1: int, m1: int, l2: int, m2: int, l3: int, m3: int) -> float:
    """Gaunt integral by bare indices (internal fast path, same definition)."""
    if m3 != m1 + m2 or l3 < abs(l1 - l2) or l3 > l1 + l2 or (l1 + l2 + l3) % 2:
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(m3) > l3:
        return 0.0
    pref = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1) / (4.0 * math.pi))
    return (
        (-1) ** m3
        * pref
        * _wigner3j(l1, l2, l3, 0, 0, 0)
        * _wigner3j(l1, l2, l3, m1, m2, -m3)
    )
