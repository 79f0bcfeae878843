"""Independent reference implementations used only by the test suite.

Everything here deliberately avoids the package's own special-function and
summation code: radial functions come from mpmath (half-integer Bessel),
spherical harmonics from scipy.special, and the Mie channels from a direct
boundary-condition solve instead of the ratio formulas.
"""

from __future__ import annotations

import cmath
import math

import mpmath as mp
import numpy as np
from scipy.special import roots_legendre

try:
    from scipy.special import sph_harm_y as _sph_harm_y

    def _ylm(m, l, phi, theta):
        return _sph_harm_y(l, m, theta, phi)

except ImportError:  # older scipy
    from scipy.special import sph_harm as _sph_harm

    def _ylm(m, l, phi, theta):
        return _sph_harm(m, l, phi, theta)


mp.mp.dps = 30


def mp_sph_jn(l: int, z: complex) -> complex:
    if z == 0:
        return 1.0 + 0.0j if l == 0 else 0.0j
    z = mp.mpc(z)
    return complex(mp.sqrt(mp.pi / (2 * z)) * mp.besselj(l + mp.mpf(1) / 2, z))


def mp_sph_yn(l: int, z: complex) -> complex:
    z = mp.mpc(z)
    return complex(mp.sqrt(mp.pi / (2 * z)) * mp.bessely(l + mp.mpf(1) / 2, z))


def mp_sph_h1(l: int, z: complex) -> complex:
    return mp_sph_jn(l, z) + 1j * mp_sph_yn(l, z)


def _ricatti(kind, l, z):
    """Ricatti-Bessel value and derivative at full mpmath precision."""
    half = mp.mpf(1) / 2

    def g(w):
        cyl = mp.besselj(l + half, w)
        if kind == "h":
            cyl = cyl + 1j * mp.bessely(l + half, w)
        return w * mp.sqrt(mp.pi / (2 * w)) * cyl

    zz = mp.mpc(z)
    return complex(g(zz)), complex(mp.diff(g, zz))


def mie_oracle(radius: float, eps_in: complex, eps_host: complex, omega: float, lmax: int):
    """(t_e, t_m) from the textbook Mie coefficients a_l, b_l.

    Evaluated entirely with mpmath half-integer Bessel functions and
    numerical Ricatti derivatives (no recurrences shared with the package):
    t_e = -a_l, t_m = -b_l.
    """
    k_h = cmath.sqrt(eps_host) * omega
    if k_h.imag < 0:
        k_h = -k_h
    k_i = cmath.sqrt(eps_in) * omega
    if k_i.imag < 0:
        k_i = -k_i
    x, y = k_h * radius, k_i * radius
    m = k_i / k_h
    t_e = np.zeros(lmax, dtype=complex)
    t_m = np.zeros(lmax, dtype=complex)
    for l in range(1, lmax + 1):
        psi_x, dpsi_x = _ricatti("j", l, x)
        psi_y, dpsi_y = _ricatti("j", l, y)
        xi_x, dxi_x = _ricatti("h", l, x)
        a = (m * psi_y * dpsi_x - psi_x * dpsi_y) / (m * psi_y * dxi_x - xi_x * dpsi_y)
        b = (psi_y * dpsi_x - m * psi_x * dpsi_y) / (psi_y * dxi_x - m * xi_x * dpsi_y)
        t_e[l - 1] = -a
        t_m[l - 1] = -b
    return t_e, t_m


def mie_efficiencies(radius: float, eps_in: complex, eps_host: float, omega: float):
    """(q_ext, q_sca) from the oracle channels, lossless host only."""
    x = math.sqrt(eps_host) * omega * radius
    lmax = max(4, int(math.ceil(x + 4.05 * x ** (1 / 3) + 2)))
    t_e, t_m = mie_oracle(radius, eps_in, eps_host, omega, lmax)
    ls = np.arange(1, lmax + 1)
    w = 2 * ls + 1
    q_ext = -(2.0 / x**2) * float(np.sum(w * (t_e.real + t_m.real)))
    q_sca = (2.0 / x**2) * float(np.sum(w * (np.abs(t_e) ** 2 + np.abs(t_m) ** 2)))
    return q_ext, q_sca


def gaunt_quadrature(l1, m1, l2, m2, l3, m3, n=40) -> float:
    """int Y_{l1 m1} Y_{l2 m2} conj(Y_{l3 m3}) dOmega by Gauss-Legendre."""
    xs, ws = roots_legendre(n)
    theta = np.arccos(xs)
    total = 0.0 + 0.0j
    if m3 != m1 + m2:
        return 0.0
    # the azimuthal integral is 2 pi when m1 + m2 - m3 = 0
    y1 = _ylm(m1, l1, 0.0, theta)
    y2 = _ylm(m2, l2, 0.0, theta)
    y3 = np.conj(_ylm(m3, l3, 0.0, theta))
    total = 2.0 * math.pi * np.sum(ws * y1 * y2 * y3)
    return float(total.real)


def h1_closed(p: int, z: np.ndarray) -> np.ndarray:
    """Closed-form h1_p(z) = (-i)^{p+1} e^{iz}/z sum_m c_m (-2iz)^{-m}.

    Exact for any complex z (no recurrences; independent of the package)."""
    out = np.zeros_like(z, dtype=complex)
    for m in range(p + 1):
        c = math.factorial(p + m) / (math.factorial(m) * math.factorial(p - m))
        out = out + c * (-2j * z) ** (-m)
    return (-1j) ** (p + 1) * np.exp(1j * z) / z * out


def smooth_window(r: np.ndarray, rmax: float, start: float = 0.75) -> np.ndarray:
    """C-infinity bump cutoff: 1 below start*rmax, 0 above rmax."""
    t = np.clip((r / rmax - start) / (1.0 - start), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        s0 = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        s1 = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return s1 / (s0 + s1)


def direct_lattice_sums(k: complex, kpar, keys, rmax: float, windowed: bool = True) -> dict:
    """Independent direct sums S_{p sigma} over the unit square lattice.

    Absolutely convergent for Im k > 0; the smooth window only accelerates
    the truncation.  Summed row-by-row to bound memory.
    """
    n = int(math.ceil(rmax)) + 1
    tot = {key: 0.0 + 0.0j for key in keys}
    for row in range(-n, n + 1):
        g1 = np.arange(-n, n + 1, dtype=float)
        g2 = np.full_like(g1, float(row))
        if row == 0:
            g1 = g1[g1 != 0]
            g2 = np.zeros_like(g1)
        r = np.hypot(g1, g2)
        sel = r <= rmax
        if not sel.any():
            continue
        rx, ry, r = g1[sel], g2[sel], r[sel]
        ph = np.exp(1j * (kpar[0] * rx + kpar[1] * ry))
        if windowed:
            ph = ph * smooth_window(r, rmax)
        phi = np.arctan2(ry, rx)
        z = k * r
        for (p, sig) in keys:
            y = _ylm(sig, p, phi, math.pi / 2)
            tot[(p, sig)] += complex(np.sum(ph * h1_closed(p, z) * y))
    return tot


def damped_extrapolated_sums(k0: float, kpar, keys, n_nodes: int = 12) -> dict:
    """Lossless lattice sums by analytic continuation from the lossy side.

    S(k0 + i delta) is computed by absolutely convergent direct sums at
    Chebyshev nodes delta in [0.01, 0.06] and extrapolated to delta -> 0,
    which is the physical (outgoing/Abel) lossless limit.  Requires k0 well
    separated from Wood anomalies (|kpar + g| = k0).
    """
    import warnings

    from numpy.polynomial import Chebyshev

    nodes = 0.035 + 0.025 * np.cos(np.pi * (2 * np.arange(n_nodes) + 1) / (2 * n_nodes))
    samples = {key: [] for key in keys}
    for d in nodes:
        res = direct_lattice_sums(k0 + 1j * d, kpar, keys, rmax=26.0 / d)
        for key in keys:
            samples[key].append(res[key])
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for key in keys:
            fit = Chebyshev.fit(nodes, np.array(samples[key]), n_nodes - 1)
            out[key] = complex(fit(0.0))
    return out


def bragg_mirror_reflectance(n1: float, n2: float, periods: int) -> float:
    """Closed-form peak reflectance of a quarter-wave stack, matched media."""
    rho = (n2 / n1) ** (2 * periods)
    return ((rho - 1.0) / (rho + 1.0)) ** 2


def fresnel_power_reflectance(eps: complex) -> float:
    """Normal-incidence |r|^2 for vacuum -> eps half-space."""
    n = cmath.sqrt(eps)
    if n.imag < 0:
        n = -n
    r = (1 - n) / (1 + n)
    return abs(r) ** 2
