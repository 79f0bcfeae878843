"""Vector spherical wave machinery in a unified orbital basis.

Every vector multipole field is decomposed into scalar Helmholtz solutions
times fixed spherical unit vectors e_q (q = -1, 0, +1):

    M_lm      = z_l(kr) Yv[l,l,m]
    N_lm      = i sqrt((l+1)/(2l+1)) z_{l-1} Yv[l,l-1,m]
                - i sqrt(l/(2l+1))   z_{l+1} Yv[l,l+1,m]
    grad wave = sqrt(l/(2l+1)) z_{l-1} Yv[l,l-1,m]
                + sqrt((l+1)/(2l+1)) z_{l+1} Yv[l,l+1,m]

with Yv[l,j,m] = sum_q <j,m-q;1,q|l,m> Y_{j,m-q} e_q (so Yv[l,l,m] = X_lm).
Because the e_q are position independent, scalar identities (plane-wave
expansion, translation theorem, lattice sums) lift to the vector case by
plain linear algebra.  All decompositions above were pinned against direct
numerical differentiation.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import specfun as sf

# Cartesian components of the spherical unit vectors e_{+1}, e_0, e_{-1}
E_SPH = {
    +1: np.array([-1.0, -1.0j, 0.0]) / math.sqrt(2.0),
    0: np.array([0.0, 0.0, 1.0], dtype=complex),
    -1: np.array([1.0, -1.0j, 0.0]) / math.sqrt(2.0),
}


def spherical_components(v: np.ndarray) -> dict:
    """Components v^q such that v = sum_q v^q e_q."""
    vx, vy, vz = v
    return {
        +1: -(vx - 1j * vy) / math.sqrt(2.0),
        0: vz,
        -1: (vx + 1j * vy) / math.sqrt(2.0),
    }


def nlm(lmax: int) -> int:
    """Number of (l, m) channels with 1 <= l <= lmax."""
    return (lmax + 1) ** 2 - 1


def lm_index(l: int, m: int) -> int:
    """Flat index of channel (l, m), l >= 1."""
    return l * l - 1 + (m + l)


def lm_list(lmax: int):
    return [(l, m) for l in range(1, lmax + 1) for m in range(-l, l + 1)]


def sidx(lam: int, nu: int) -> int:
    """Flat index for scalar channels (lam, nu), lam >= 0."""
    return lam * lam + nu + lam


def n_scalar(lam_max: int) -> int:
    return (lam_max + 1) ** 2


def _ab(l: int):
    """Radial mixing coefficients of N_lm (and the gradient wave)."""
    al = 1j * math.sqrt((l + 1) / (2.0 * l + 1.0))
    bl = -1j * math.sqrt(l / (2.0 * l + 1.0))
    cl = math.sqrt(l / (2.0 * l + 1.0))
    dl = math.sqrt((l + 1) / (2.0 * l + 1.0))
    return al, bl, cl, dl


@lru_cache(maxsize=8)
def _scalar_index_arrays(lam_max: int):
    """(l, m) of every scalar channel, aligned with sidx ordering."""
    lidx = np.array([lam for lam in range(lam_max + 1) for _ in range(2 * lam + 1)])
    midx = np.array([nu for lam in range(lam_max + 1) for nu in range(-lam, lam + 1)])
    return lidx, midx


def ylm_flat(lmax: int, ct: complex, st: complex, phi: float) -> np.ndarray:
    """Y_lm values as a flat array over sidx(l, m), l <= lmax."""
    tab = sf.ylm_table(lmax, ct, st, phi)
    lidx, midx = _scalar_index_arrays(lmax)
    return tab[lidx, midx + lmax]


def vector_harmonic(l: int, j: int, m: int, yflat: np.ndarray) -> np.ndarray:
    """Cartesian 3-vector Yv[l,j,m] from a flat Y table of order >= j."""
    v = np.zeros(3, dtype=complex)
    for q in (-1, 0, 1):
        if abs(m - q) > j:
            continue
        cg = sf.clebsch_gordan(j, m - q, 1, q, l, m)
        if cg:
            v = v + cg * yflat[sidx(j, m - q)] * E_SPH[q]
    return v


def plane_wave_coeffs(lmax: int, ct, st, phi, evec) -> tuple[np.ndarray, np.ndarray]:
    """Regular VSWF coefficients (aM, aE) of E = evec * exp(i K.r).

    (ct, st, phi) describe the propagation direction K/k (possibly complex
    for evanescent beams); evec is the cartesian polarization vector with
    evec . K = 0.  Expansion: E = sum aM_lm M^(1)_lm + aE_lm N^(1)_lm.
    """
    lam_max = lmax + 1
    tab = sf.ylm_table(lam_max, ct, st, phi)
    lidx, midx = _scalar_index_arrays(lam_max)
    # Ybar analytic conjugate
    ybar = (-1.0) ** midx * tab[lidx, lam_max - midx]
    ecomp = spherical_components(np.asarray(evec, dtype=complex))
    mats = _pw_matrices(lmax)
    a = sum(ecomp[q] * (mats[q] @ ybar) for q in (-1, 0, 1))
    nv = nlm(lmax)
    return a[:nv], a[nv:]


@lru_cache(maxsize=8)
def _pw_matrices(lmax: int):
    """Per-component matrices P_q with (aM; aE) = sum_q e^q P_q Ybar.

    Encodes the Clebsch-Gordan contraction of plane_wave_coeffs once per
    lmax; the electric rows already invert the 2x2 (N, grad) block, whose
    determinant is exactly i.
    """
    lam_max = lmax + 1
    nv = nlm(lmax)
    mats = {q: np.zeros((2 * nv, n_scalar(lam_max)), dtype=complex) for q in (-1, 0, 1)}
    for l in range(1, lmax + 1):
        al, bl, cl, dl = _ab(l)
        for m in range(-l, l + 1):
            i = lm_index(l, m)
            for q in (-1, 0, 1):
                nu = m - q
                if abs(nu) <= l:
                    cg = sf.clebsch_gordan(l, nu, 1, q, l, m)
                    if cg:
                        mats[q][i, sidx(l, nu)] += 4.0 * math.pi * (1j) ** l * cg
                if abs(nu) <= l - 1:
                    cg = sf.clebsch_gordan(l - 1, nu, 1, q, l, m)
                    if cg:
                        mats[q][i + nv, sidx(l - 1, nu)] += (
                            -1j * dl * 4.0 * math.pi * (1j) ** (l - 1) * cg
                        )
                if abs(nu) <= l + 1:
                    cg = sf.clebsch_gordan(l + 1, nu, 1, q, l, m)
                    if cg:
                        mats[q][i + nv, sidx(l + 1, nu)] += (
                            1j * cl * 4.0 * math.pi * (1j) ** (l + 1) * cg
                        )
    return mats


def outgoing_beam_amplitude(
    lmax: int, bM: np.ndarray, bE: np.ndarray, ct, st, phi, c_pref: complex
) -> np.ndarray:
    """Plane-wave amplitude (cartesian E vector) of a lattice of multipoles.

    The scalar identity
        sum_R e^{i kpar.R} h_l(k|r-R|) Y_lm = sum_g c_pref (-i)^l Y_lm(Kg^pm) e^{i Kg.r}
    with c_pref = 2 pi / (A k gamma_g) lifts channel-wise; this returns the
    vector amplitude for one diffraction order/direction.
    """
    amp = out_tensor(lmax) @ ylm_flat(lmax + 1, ct, st, phi)
    return c_pref * (amp @ np.concatenate([bM, bE]))


@lru_cache(maxsize=8)
def out_tensor(lmax: int):
    """Cartesian plane-wave amplitude per unit multipole amplitude.

    Q[axis, channel, scalar] with amplitude = c_pref * (Q @ yflat) @ (bM; bE),
    where yflat = ylm_flat(lmax + 1, ...) for the outgoing direction.
    """
    lam_max = lmax + 1
    nv = nlm(lmax)
    q3 = np.zeros((3, 2 * nv, n_scalar(lam_max)), dtype=complex)
    for l in range(1, lmax + 1):
        al, bl, _, _ = _ab(l)
        for m in range(-l, l + 1):
            i = lm_index(l, m)
            for q in (-1, 0, 1):
                nu = m - q
                if abs(nu) <= l:
                    cg = sf.clebsch_gordan(l, nu, 1, q, l, m)
                    if cg:
                        q3[:, i, sidx(l, nu)] += (-1j) ** l * cg * E_SPH[q]
                if abs(nu) <= l - 1:
                    cg = sf.clebsch_gordan(l - 1, nu, 1, q, l, m)
                    if cg:
                        q3[:, i + nv, sidx(l - 1, nu)] += (-1j) ** (l - 1) * al * cg * E_SPH[q]
                if abs(nu) <= l + 1:
                    cg = sf.clebsch_gordan(l + 1, nu, 1, q, l, m)
                    if cg:
                        q3[:, i + nv, sidx(l + 1, nu)] += (-1j) ** (l + 1) * bl * cg * E_SPH[q]
    return q3


@lru_cache(maxsize=8)
def _scalar_contraction(lam_max: int):
    """Sparse recipe turning lattice sums S_{p,sigma} into Omega_scalar.

    Omega[(lam,nu),(lam',nu')] = 4 pi sum_p i^{lam+p-lam'} (-1)^p
                                 G(lam,nu; p,nu'-nu; lam',nu') S_{p,nu'-nu}
    Returns dict (p, sigma) -> (rows, cols, coefs).
    """
    recipe = {}
    for lam in range(lam_max + 1):
        for nu in range(-lam, lam + 1):
            r = sidx(lam, nu)
            for lamp in range(lam_max + 1):
                for nup in range(-lamp, lamp + 1):
                    c = sidx(lamp, nup)
                    sigma = nup - nu
                    for p in range(abs(lam - lamp), lam + lamp + 1):
                        if (lam + lamp + p) % 2:
                            continue
                        if (p + sigma) % 2:
                            continue  # in-plane lattice sums vanish for p+sigma odd
                        if abs(sigma) > p:
                            continue
                        g3 = sf.gaunt_lmm(lam, nu, p, sigma, lamp, nup)
                        if g3 == 0.0:
                            continue
                        coef = 4.0 * math.pi * (1j) ** (lam + p - lamp) * (-1) ** p * g3
                        rows, cols, coefs = recipe.setdefault((p, sigma), ([], [], []))
                        rows.append(r)
                        cols.append(c)
                        coefs.append(coef)
    return {
        key: (np.array(r), np.array(c), np.array(v))
        for key, (r, c, v) in recipe.items()
    }


def omega_scalar(lam_max: int, s_table: dict) -> np.ndarray:
    """Scalar lattice-summed translation matrix from sums S_{p,sigma}.

    s_table maps (p, sigma) -> sum_{R != 0} e^{i kpar.R} h_p(k R) Y_{p,sigma}(Rhat).
    """
    ns = n_scalar(lam_max)
    omega = np.zeros((ns, ns), dtype=complex)
    for (p, sigma), (rows, cols, coefs) in _scalar_contraction(lam_max).items():
        s = s_table.get((p, sigma), 0.0)
        if s != 0.0:
            np.add.at(omega, (rows, cols), coefs * s)
    return omega


@lru_cache(maxsize=8)
def _vector_maps(lmax: int):
    """Embed/reconstruct maps between VSWF channels and scalar channels.

    E_q: (n_scalar x nlm x 2 pol) embedding of outgoing VSWFs into scalar
    channels for each q; R_q: reconstruction of regular VSWF amplitudes.
    """
    lam_max = lmax + 1
    ns = n_scalar(lam_max)
    nv = nlm(lmax)
    embed = {q: np.zeros((ns, 2 * nv), dtype=complex) for q in (-1, 0, 1)}
    recon = {q: np.zeros((2 * nv, ns), dtype=complex) for q in (-1, 0, 1)}
    for l in range(1, lmax + 1):
        al, bl, cl, dl = _ab(l)
        for m in range(-l, l + 1):
            iM = lm_index(l, m)
            iE = iM + nv
            for q in (-1, 0, 1):
                nu = m - q
                if abs(nu) <= l:
                    cg = sf.clebsch_gordan(l, nu, 1, q, l, m)
                    if cg:
                        embed[q][sidx(l, nu), iM] += cg
                        recon[q][iM, sidx(l, nu)] += cg
                if abs(nu) <= l - 1:
                    cg = sf.clebsch_gordan(l - 1, nu, 1, q, l, m)
                    if cg:
                        embed[q][sidx(l - 1, nu), iE] += al * cg
                        recon[q][iE, sidx(l - 1, nu)] += -1j * dl * cg
                if abs(nu) <= l + 1:
                    cg = sf.clebsch_gordan(l + 1, nu, 1, q, l, m)
                    if cg:
                        embed[q][sidx(l + 1, nu), iE] += bl * cg
                        recon[q][iE, sidx(l + 1, nu)] += 1j * cl * cg
    return embed, recon


def translation_matrix(lmax: int, s_table: dict) -> np.ndarray:
    """Lattice-summed VSWF translation operator W, shape (2 nlm, 2 nlm).

    Ordering: magnetic channels first, electric channels second, each over
    lm_list(lmax).  W maps outgoing multipole amplitudes on every other
    lattice site to the regular incident expansion at the origin site.
    """
    omega = omega_scalar(lmax + 1, s_table)
    embed, recon = _vector_maps(lmax)
    nv2 = 2 * nlm(lmax)
    w = np.zeros((nv2, nv2), dtype=complex)
    for q in (-1, 0, 1):
        w += recon[q] @ omega @ embed[q]
    return w
