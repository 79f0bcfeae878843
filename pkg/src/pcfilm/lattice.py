"""2D lattice geometry, diffraction-order beam sets, and lattice sums.

The in-plane lattice sums

    S_{p,sigma}(k, kpar) = sum_{R != 0} e^{i kpar.R} h^(1)_p(k|R|) Y_{p,sigma}(Rhat)

are the "calculated only once per frequency" bottleneck; they are evaluated
by Ewald splitting (reciprocal part + real-space incomplete-Gaussian part +
origin correction).  The split rests on the exact identity

    int_0^inf u^{2L} exp(-R^2 u^2 + k^2/(4 u^2)) du
        = (i k sqrt(pi) / 2) (k / 2R)^L h^(1)_L(kR)

(outgoing branch), so the tail integral from eta gives the real-space part
with plain orthonormal Y_LM factors and the head resums in reciprocal space.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import wofz

from . import specfun as sf
from . import vswf
from .errors import ConvergenceError, InvalidArgumentError
from .mie import Material, branch_sqrt

_I_POW = (1.0, 1.0j, -1.0, -1.0j)  # i^M exactly, index M % 4


def _cerfc(z: complex) -> complex:
    """erfc for complex argument via the Faddeeva function."""
    z = complex(z)
    return np.exp(-z * z) * wofz(1j * z)


@dataclass(frozen=True)
class Lattice2D:
    """2D Bravais lattice with basis vectors in units of a."""

    a1: tuple[float, float]
    a2: tuple[float, float]

    def __post_init__(self):
        if abs(self.cross) < 1e-14:
            raise InvalidArgumentError(f"degenerate lattice cell: a1={self.a1}, a2={self.a2}")

    @property
    def cross(self) -> float:
        return self.a1[0] * self.a2[1] - self.a1[1] * self.a2[0]

    @property
    def area(self) -> float:
        return abs(self.cross)


SQUARE = Lattice2D((1.0, 0.0), (0.0, 1.0))
TRIANGULAR = Lattice2D((1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


def reciprocal_basis(lat: Lattice2D) -> tuple[np.ndarray, np.ndarray]:
    """Reciprocal vectors with b_i . a_j = 2 pi delta_ij."""
    c = lat.cross
    b1 = (2.0 * math.pi / c) * np.array([lat.a2[1], -lat.a2[0]])
    b2 = (2.0 * math.pi / c) * np.array([-lat.a1[1], lat.a1[0]])
    return b1, b2


def fold_to_zone(lat: Lattice2D, kpar) -> tuple[np.ndarray, tuple[int, int]]:
    """Fold kpar into the first Brillouin zone.

    Returns (folded kpar, (n1, n2)) with folded = kpar + n1 b1 + n2 b2 and
    |folded| minimal; ties broken lexicographically on (n1, n2).
    """
    kpar = np.asarray(kpar, dtype=float)
    b1, b2 = reciprocal_basis(lat)
    bmat = np.column_stack([b1, b2])
    frac = np.linalg.solve(bmat, kpar)
    n0 = -np.round(frac).astype(int)
    best = None
    for d1 in range(-2, 3):
        for d2 in range(-2, 3):
            n1, n2 = n0[0] + d1, n0[1] + d2
            v = kpar + n1 * b1 + n2 * b2
            key = (round(float(v @ v), 12), n1, n2)
            if best is None or key < best[0]:
                best = (key, v, (int(n1), int(n2)))
    return best[1], best[2]


@dataclass(frozen=True)
class BeamSet:
    """Truncated plane-wave (diffraction-order) basis at fixed (omega, kpar).

    Beams are sorted by |kpar+g| (lexicographic integer tie-break).  kz obeys
    the global branch rule; a beam is propagating iff kz is exactly real.
    """

    omega: float
    kpar: tuple[float, float]
    fold_shift: tuple[int, int]
    ambient: Material
    cutoff: float
    g_ints: tuple[tuple[int, int], ...]
    g: np.ndarray           # (n, 2) reciprocal vectors
    kt: np.ndarray          # (n, 2) in-plane wave vectors kpar + g
    kz: np.ndarray          # (n,) complex, branch rule
    propagating: np.ndarray  # (n,) bool

    @property
    def n_beams(self) -> int:
        return len(self.g_ints)


def beam_set(lat: Lattice2D, omega: float, kpar, ambient: Material, cutoff: float) -> BeamSet:
    """All diffraction orders g with |kpar+g| <= cutoff, kpar folded first."""
    if omega <= 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    k2 = ambient.eps * omega * omega
    if cutoff < omega * math.sqrt(abs(ambient.eps)) - 1e-12:
        raise InvalidArgumentError(
            f"cutoff {cutoff} < omega*sqrt|eps| = {omega * math.sqrt(abs(ambient.eps))}"
        )
    kf, shift = fold_to_zone(lat, kpar)
    if math.hypot(*kf) > cutoff:
        raise InvalidArgumentError("cutoff too small to include the specular beam")
    b1, b2 = reciprocal_basis(lat)
    # generous integer search box, then filter by the circle
    bmin = min(np.linalg.norm(b1), np.linalg.norm(b2))
    nbox = int(math.ceil((cutoff + math.hypot(*kf)) / bmin * 2.0)) + 2
    entries = []
    for n1 in range(-nbox, nbox + 1):
        for n2 in range(-nbox, nbox + 1):
            g = n1 * b1 + n2 * b2
            kt = kf + g
            kt2 = float(kt @ kt)
            if kt2 <= cutoff * cutoff + 1e-12:
                entries.append((round(kt2, 12), n1, n2, g, kt))
    entries.sort(key=lambda e: e[:3])
    g_ints = tuple((e[1], e[2]) for e in entries)
    g = np.array([e[3] for e in entries])
    kt = np.array([e[4] for e in entries])
    kz = np.array([branch_sqrt(k2 - float(v @ v)) for v in kt])
    prop = kz.imag == 0.0
    return BeamSet(
        omega=omega,
        kpar=(float(kf[0]), float(kf[1])),
        fold_shift=shift,
        ambient=ambient,
        cutoff=float(cutoff),
        g_ints=g_ints,
        g=g,
        kt=kt,
        kz=kz,
        propagating=prop,
    )


def _inc_gamma_half(nmax: int, x: complex, sqrt_x: complex) -> np.ndarray:
    """Gamma(1/2 - n, x) for n = 0..nmax, seeded by erfc, recurred downward."""
    out = np.zeros(nmax + 1, dtype=complex)
    out[0] = math.sqrt(math.pi) * _cerfc(sqrt_x)
    ex = np.exp(-x)
    for n in range(1, nmax + 1):
        s = 0.5 - (n - 1)
        out[n] = (out[n - 1] - sqrt_x ** (2 * (s - 1)) * ex) / (s - 1)
    return out


def _tail_integrals(lmax: int, r: float, k: complex, eta: float) -> np.ndarray:
    """I_L(r) = int_eta^inf u^{2L} exp(-r^2 u^2 + k^2/(4u^2)) du, L = 0..lmax.

    Closed-form seeds in erfc, then the exact three-term recursion from
    integrating d/du [u^{2L-1} exp(...)] over (eta, inf).
    """
    a = r * eta + 1j * k / (2 * eta)
    b = r * eta - 1j * k / (2 * eta)
    ep = np.exp(1j * k * r) * _cerfc(a)
    em = np.exp(-1j * k * r) * _cerfc(b)
    prev2 = 1j * math.sqrt(math.pi) / (2 * k) * (ep - em)   # I_{-1}
    prev1 = math.sqrt(math.pi) / (4 * r) * (ep + em)        # I_0
    out = np.zeros(lmax + 1, dtype=complex)
    out[0] = prev1
    boundary = np.exp(-r * r * eta * eta + k * k / (4 * eta * eta))
    for L in range(1, lmax + 1):
        cur = ((2 * L - 1) * prev1 + eta ** (2 * L - 1) * boundary - (k * k / 2) * prev2) / (
            2 * r * r
        )
        out[L] = cur
        prev2, prev1 = prev1, cur
    return out


def _shell(s: int):
    """Integer pairs with max(|n1|, |n2|) == s."""
    if s == 0:
        return [(0, 0)]
    out = []
    for n1 in range(-s, s + 1):
        for n2 in range(-s, s + 1):
            if max(abs(n1), abs(n2)) == s:
                out.append((n1, n2))
    return out


@lru_cache(maxsize=32)
def _lm_pairs(pmax: int):
    return [(L, M) for L in range(pmax + 1) for M in range(-L, L + 1) if (L + M) % 2 == 0]


@lru_cache(maxsize=32)
def _pair_tables(pmax: int):
    """Vectorization tables over the (L, M) pair list.

    Returns (Lidx, Midx, cmat, ktexp) where for pair i and Gaussian-integral
    order n the reciprocal-space inner sum is
    sum_n gtab[n] gpow[n] kt^(L-2n) cmat[i, n]; ktexp holds the exponents
    (clamped to 0 where cmat is 0).
    """
    pairs = _lm_pairs(pmax)
    f = math.factorial
    nmax = pmax // 2
    lidx = np.array([L for L, _ in pairs])
    midx = np.array([M for _, M in pairs])
    cmat = np.zeros((len(pairs), nmax + 1))
    ktexp = np.zeros((len(pairs), nmax + 1), dtype=int)
    for i, (L, M) in enumerate(pairs):
        for n in range((L - abs(M)) // 2 + 1):
            cmat[i, n] = 1.0 / (f(n) * f((L + M) // 2 - n) * f((L - M) // 2 - n))
            ktexp[i, n] = L - 2 * n
    return lidx, midx, cmat, ktexp


def _table_norm(tab: dict) -> float:
    return max((abs(v) for v in tab.values()), default=0.0)


def lattice_sums_ewald(
    lat: Lattice2D, k: complex, kpar, pmax: int, eta: float | None = None, tol: float = 1e-12
) -> dict:
    """Ewald-accelerated S_{p,sigma} for all p <= pmax, sigma with p+sigma even."""
    kpar = np.asarray(kpar, dtype=float)
    area = lat.area
    if eta is None:
        eta = math.sqrt(math.pi) / math.sqrt(area)
    b1, b2 = reciprocal_basis(lat)
    a1 = np.array(lat.a1)
    a2 = np.array(lat.a2)
    pairs = _lm_pairs(pmax)
    f = math.factorial
    lidx, midx, cmat, ktexp = _pair_tables(pmax)
    pref1 = np.array(
        [
            _I_POW[M % 4]
            * math.sqrt((2 * L + 1) * f(L - M) * f(L + M))
            / (area * k * (-2 * k) ** L)
            for L, M in pairs
        ]
    )
    vec = np.zeros(len(pairs), dtype=complex)

    # reciprocal-space part
    nmax = pmax // 2
    quiet = 0
    norm = 0.0
    for s in range(0, 200):
        ring = 0.0
        for n1, n2 in _shell(s):
            kg = kpar + n1 * b1 + n2 * b2
            kt = math.hypot(kg[0], kg[1])
            phig = math.atan2(kg[1], kg[0])
            gam = branch_sqrt(k * k - kt * kt)
            if abs(gam) < 1e-10 * abs(k):
                raise ConvergenceError(
                    "grazing diffraction order (Wood anomaly) in Ewald sum",
                    {"k": k, "kpar": tuple(kpar), "g": (n1, n2)},
                )
            gtab = _inc_gamma_half(nmax, -gam * gam / (4 * eta * eta), -1j * gam / (2 * eta))
            gpow = gam ** (2 * np.arange(nmax + 1) - 1)
            ktpow = kt ** np.arange(pmax + 1)
            inner = (cmat * (gtab * gpow)[None, :] * ktpow[ktexp]).sum(axis=1)
            terms = pref1 * np.exp(1j * midx * phig) * inner
            vec += terms
            ring = max(ring, float(np.max(np.abs(terms))))
        norm = max(norm, float(np.max(np.abs(vec))))
        if s > 0 and ring < tol * max(1.0, norm):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError(
            "reciprocal-space Ewald sum did not converge",
            {"eta": eta, "k": k, "kpar": tuple(kpar), "ring": ring},
        )

    # real-space part
    pref2 = -2j / (k * math.sqrt(math.pi))
    ylm0 = sf.ylm_table(pmax, 0.0, 1.0, 0.0)
    yvec0 = ylm0[lidx, midx + pmax]
    quiet = 0
    for s in range(1, 200):
        ring = 0.0
        for n1, n2 in _shell(s):
            rv = n1 * a1 + n2 * a2
            r = math.hypot(rv[0], rv[1])
            phi = math.atan2(rv[1], rv[0])
            itab = _tail_integrals(pmax, r, k, eta)
            bloch = np.exp(1j * (kpar[0] * rv[0] + kpar[1] * rv[1]))
            rpow = (2 * r / k) ** np.arange(pmax + 1)
            terms = pref2 * bloch * rpow[lidx] * yvec0 * np.exp(1j * midx * phi) * itab[lidx]
            vec += terms
            ring = max(ring, float(np.max(np.abs(terms))))
        norm = max(norm, float(np.max(np.abs(vec))))
        if ring < tol * max(1.0, norm):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError(
            "real-space Ewald sum did not converge",
            {"eta": eta, "k": k, "kpar": tuple(kpar), "ring": ring},
        )

    tab = {key: vec[i] for i, key in enumerate(pairs)}
    # origin correction (L = 0 only)
    g_m12 = _inc_gamma_half(1, -k * k / (4 * eta * eta), -1j * k / (2 * eta))[1]
    tab[(0, 0)] += g_m12 / (4.0 * math.pi)
    return tab


def lattice_sums_direct(
    lat: Lattice2D, k: complex, kpar, pmax: int, rmax: float = 60.0
) -> dict:
    """Brute-force S_{p,sigma} over |R| <= rmax (test oracle; needs Im k > 0)."""
    kpar = np.asarray(kpar, dtype=float)
    a1 = np.array(lat.a1)
    a2 = np.array(lat.a2)
    pairs = _lm_pairs(pmax)
    tab = {key: 0.0 + 0.0j for key in pairs}
    amin = min(np.linalg.norm(a1), np.linalg.norm(a2))
    nbox = int(math.ceil(rmax / amin * 2.0)) + 2
    for n1 in range(-nbox, nbox + 1):
        for n2 in range(-nbox, nbox + 1):
            if n1 == 0 and n2 == 0:
                continue
            rv = n1 * a1 + n2 * a2
            r = math.hypot(rv[0], rv[1])
            if r > rmax:
                continue
            h = sf.sph_hankel1(pmax, k * r)
            ytab = sf.ylm_table(pmax, 0.0, 1.0, math.atan2(rv[1], rv[0]))
            bloch = np.exp(1j * (kpar[0] * rv[0] + kpar[1] * rv[1]))
            for L, M in pairs:
                tab[(L, M)] += bloch * h[L] * ytab[L, M + pmax]
    return tab


@dataclass(frozen=True)
class StructureConstants:
    """Lattice-summed VSWF translation operator at one (omega, kpar).

    ``omega_mat`` is the (2 nlm) x (2 nlm) matrix over (M channels, E
    channels) x lm_list(lmax) mapping outgoing multipole amplitudes on all
    other sites to the regular expansion at the origin site.
    """

    omega: float
    kpar: tuple[float, float]
    lmax: int
    host: Material
    omega_mat: np.ndarray
    s_table: dict


_sc_cache: dict = {}
_sc_lock = threading.Lock()


def structure_constants(
    lat: Lattice2D,
    omega: float,
    kpar,
    host: Material,
    lmax: int,
    eta: float | None = None,
    method: str = "ewald",
) -> StructureConstants:
    """Structure constants Omega for a plane of scatterers (memoized)."""
    if omega <= 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    if lmax < 1:
        raise InvalidArgumentError(f"lmax must be >= 1, got {lmax}")
    kf, _ = fold_to_zone(lat, kpar)
    key = (lat.a1, lat.a2, float(omega), round(float(kf[0]), 12), round(float(kf[1]), 12),
           complex(host.eps), lmax, eta, method)
    with _sc_lock:
        hit = _sc_cache.get(key)
    if hit is not None:
        return hit
    k = host.wavenumber(omega)
    pmax = 2 * lmax + 2
    if method == "ewald":
        s_table = lattice_sums_ewald(lat, k, kf, pmax, eta=eta)
    elif method == "direct":
        s_table = lattice_sums_direct(lat, k, kf, pmax)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    w = vswf.translation_matrix(lmax, s_table)
    out = StructureConstants(
        omega=float(omega),
        kpar=(float(kf[0]), float(kf[1])),
        lmax=lmax,
        host=host,
        omega_mat=w,
        s_table=s_table,
    )
    with _sc_lock:
        _sc_cache[key] = out
    return out
