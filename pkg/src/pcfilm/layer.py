"""Per-layer scattering matrices in the diffraction-order basis.

Basis convention: beam index major, polarization minor with the (s, p) pair
defined per beam relative to its own plane of incidence.  For the degenerate
normal-incidence beam the plane of incidence is taken to contain the lattice
x axis (azimuth 0).  Amplitudes are flux-normalized at construction: the
physical E-field amplitude is a / sqrt(kz), so |a|^2 is the z-flux carried
by a propagating beam and lossless S-matrices are unitary on the propagating
subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import vswf
from .errors import InvalidArgumentError, SingularSolveError
from .lattice import BeamSet, Lattice2D, StructureConstants
from .mie import Material, SphereScatterer, branch_sqrt, mie_t

COND_REPORT_LIMIT = 1e10


@dataclass(frozen=True)
class PlaneOfSpheres:
    """2D-periodic plane of identical spheres."""

    lattice: Lattice2D
    scatterer: SphereScatterer
    offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        a1 = np.array(self.lattice.a1)
        a2 = np.array(self.lattice.a2)
        nn = min(
            np.linalg.norm(n1 * a1 + n2 * a2)
            for n1 in range(-2, 3)
            for n2 in range(-2, 3)
            if (n1, n2) != (0, 0)
        )
        if 2 * self.scatterer.radius >= nn:
            raise InvalidArgumentError(
                f"spheres overlap in plane: diameter {2 * self.scatterer.radius} >= "
                f"nearest-neighbor distance {nn}"
            )


@dataclass(frozen=True)
class Plate:
    """Homogeneous plate of given thickness (units of a)."""

    thickness: float
    material: Material

    def __post_init__(self):
        if self.thickness < 0:
            raise InvalidArgumentError(f"thickness must be >= 0, got {self.thickness}")


@dataclass
class LayerS:
    """Four-block scattering matrix over (beam, polarization) ports.

    out+(right) = tpp @ in+(left) + rmp @ in-(right)
    out-(left)  = rpm @ in+(left) + tmm @ in-(right)
    """

    beams: BeamSet
    mat_left: Material
    mat_right: Material
    tpp: np.ndarray
    rpm: np.ndarray
    rmp: np.ndarray
    tmm: np.ndarray


def identity_smatrix(beams: BeamSet, mat: Material | None = None) -> LayerS:
    n = 2 * beams.n_beams
    mat = beams.ambient if mat is None else mat
    z = np.zeros((n, n), dtype=complex)
    return LayerS(beams, mat, mat, np.eye(n, dtype=complex), z.copy(), z.copy(), np.eye(n, dtype=complex))


def beam_kz(beams: BeamSet, mat: Material) -> np.ndarray:
    """kz of every beam in a (possibly different) homogeneous medium."""
    k2 = mat.eps * beams.omega**2
    return np.array([branch_sqrt(k2 - float(v @ v)) for v in beams.kt])


def _pol_vectors(kt: np.ndarray, kz: complex, k: complex, sign: int):
    """(s_hat, p_hat) for the beam travelling toward sign*z.

    Bilinear-orthonormal (no conjugation), so coefficients of a transverse
    field are plain dot products even for evanescent beams.
    """
    ktn = math.hypot(kt[0], kt[1])
    if ktn < 1e-12:
        cphi, sphi = 1.0, 0.0
    else:
        cphi, sphi = kt[0] / ktn, kt[1] / ktn
    s_hat = np.array([-sphi, cphi, 0.0], dtype=complex)
    p_hat = np.array([sign * kz * cphi, sign * kz * sphi, -ktn], dtype=complex) / k
    return s_hat, p_hat


def _solve_reported(a: np.ndarray, b: np.ndarray, context: str) -> np.ndarray:
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSolveError(f"singular solve in {context}", condition=np.inf) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSolveError(f"non-finite solve result in {context}", condition=np.inf)
    cond = np.linalg.cond(a)
    if cond > COND_REPORT_LIMIT:
        raise SingularSolveError(
            f"ill-conditioned solve in {context}: cond = {cond:.3e}", condition=cond
        )
    return x


def sphere_plane_smatrix(
    plane: PlaneOfSpheres, sc: StructureConstants, beams: BeamSet, lmax: int
) -> LayerS:
    """S-matrix of one plane of spheres via self-consistent in-plane scattering.

    The regular incident expansion a about one sphere is scattered into
    b = (I - T Omega)^(-1) T a (T = Mie T-matrix, Omega = structure
    constants); b is then converted to outgoing diffraction orders through
    the lattice-sum plane-wave identity.
    """
    host = plane.scatterer.host
    if beams.ambient.eps != host.eps:
        raise InvalidArgumentError("beams must live in the sphere host medium")
    if (sc.omega != beams.omega) or (sc.kpar != beams.kpar) or (sc.host.eps != host.eps):
        raise InvalidArgumentError("structure constants and beams disagree on (omega, kpar, host)")
    omega = beams.omega
    k = host.wavenumber(omega)
    nv = vswf.nlm(lmax)
    t_e, t_m = mie_t(plane.scatterer, omega, lmax)
    tdiag = np.zeros(2 * nv, dtype=complex)
    for l, m in vswf.lm_list(lmax):
        tdiag[vswf.lm_index(l, m)] = t_m[l - 1]
        tdiag[vswf.lm_index(l, m) + nv] = t_e[l - 1]
    scatter = _solve_reported(
        np.eye(2 * nv) - tdiag[:, None] * sc.omega_mat,
        np.diag(tdiag),
        "sphere-plane self-consistency (I - T Omega)",
    )

    n = beams.n_beams
    kz = beams.kz
    area = plane.lattice.area
    off = np.asarray(plane.offset, dtype=float)
    sqrt_kz = np.array([branch_sqrt(z) for z in kz])

    # incident-expansion columns (2 nlm x 2n) for downward(+z) and upward(-z)
    a_plus = np.zeros((2 * nv, 2 * n), dtype=complex)
    a_minus = np.zeros((2 * nv, 2 * n), dtype=complex)
    # conversion rows (2n x 2 nlm) for outgoing up(+z) and down(-z)
    c_up = np.zeros((2 * n, 2 * nv), dtype=complex)
    c_down = np.zeros((2 * n, 2 * nv), dtype=complex)

    lam_max = lmax + 1
    out_t = vswf.out_tensor(lmax)
    for j in range(n):
        kt = beams.kt[j]
        ktn = math.hypot(kt[0], kt[1])
        phi = math.atan2(kt[1], kt[0]) if ktn > 1e-12 else 0.0
        st = ktn / k
        bloch = np.exp(1j * (kt[0] * off[0] + kt[1] * off[1]))
        for sign, a_cols in ((+1, a_plus), (-1, a_minus)):
            ct = sign * kz[j] / k
            s_hat, p_hat = _pol_vectors(kt, kz[j], k, sign)
            for ipol, evec in ((0, s_hat), (1, p_hat)):
                aM, aE = vswf.plane_wave_coeffs(lmax, ct, st, phi, evec)
                a_cols[:nv, 2 * j + ipol] = aM * bloch / sqrt_kz[j]
                a_cols[nv:, 2 * j + ipol] = aE * bloch / sqrt_kz[j]
        c_pref = 2.0 * math.pi / (area * k * kz[j])
        for sign, c_rows in ((+1, c_up), (-1, c_down)):
            ct = sign * kz[j] / k
            yflat = vswf.ylm_flat(lam_max, ct, st, phi)
            s_hat, p_hat = _pol_vectors(kt, kz[j], k, sign)
            scale = sqrt_kz[j] / bloch
            amp = out_t @ yflat  # cartesian amplitude per multipole channel
            c_rows[2 * j + 0, :] = scale * c_pref * (s_hat @ amp)
            c_rows[2 * j + 1, :] = scale * c_pref * (p_hat @ amp)

    b_plus = scatter @ a_plus
    b_minus = scatter @ a_minus
    eye = np.eye(2 * n, dtype=complex)
    return LayerS(
        beams,
        host,
        host,
        tpp=eye + c_up @ b_plus,
        rpm=c_down @ b_plus,
        rmp=c_up @ b_minus,
        tmm=eye + c_down @ b_minus,
    )


def _fresnel(kzl: complex, kzr: complex, epsl: complex, epsr: complex):
    """Flux-normalized s/p Fresnel coefficients for one beam.

    Returns (rs, ts, rp, tp) for left-to-right incidence; right-to-left
    follows by swapping arguments.
    """
    nl, nr = branch_sqrt(epsl), branch_sqrt(epsr)
    rs = (kzl - kzr) / (kzl + kzr)
    ts = 2.0 * kzl / (kzl + kzr)
    rp = (epsr * kzl - epsl * kzr) / (epsr * kzl + epsl * kzr)
    tp = 2.0 * nl * nr * kzl / (epsr * kzl + epsl * kzr)
    flux = branch_sqrt(kzr) / branch_sqrt(kzl)
    return rs, ts * flux, rp, tp * flux


def interface_smatrix(mat_left: Material, mat_right: Material, beams: BeamSet) -> LayerS:
    """Fresnel S-matrix of a planar dielectric interface, per beam and pol."""
    n = beams.n_beams
    kzl = beam_kz(beams, mat_left)
    kzr = beam_kz(beams, mat_right)
    tpp = np.zeros((2 * n, 2 * n), dtype=complex)
    rpm = np.zeros_like(tpp)
    rmp = np.zeros_like(tpp)
    tmm = np.zeros_like(tpp)
    for j in range(n):
        rs, ts, rp, tp = _fresnel(kzl[j], kzr[j], mat_left.eps, mat_right.eps)
        rs_b, ts_b, rp_b, tp_b = _fresnel(kzr[j], kzl[j], mat_right.eps, mat_left.eps)
        for ipol, (r, t, rb, tb) in enumerate(((rs, ts, rs_b, ts_b), (rp, tp, rp_b, tp_b))):
            i = 2 * j + ipol
            tpp[i, i] = t
            rpm[i, i] = r
            rmp[i, i] = rb
            tmm[i, i] = tb
    return LayerS(beams, mat_left, mat_right, tpp, rpm, rmp, tmm)


def gap_smatrix(distance: float, beams: BeamSet) -> LayerS:
    """Free propagation over a distance of the beams' ambient medium."""
    if distance < 0:
        raise InvalidArgumentError(f"distance must be >= 0, got {distance}")
    n = beams.n_beams
    phase = np.exp(1j * beams.kz * distance)
    diag = np.repeat(phase, 2)
    z = np.zeros((2 * n, 2 * n), dtype=complex)
    return LayerS(beams, beams.ambient, beams.ambient, np.diag(diag), z.copy(), z.copy(), np.diag(diag))


def plate_smatrix(
    plate: Plate, beams: BeamSet, ambient_left: Material, ambient_right: Material
) -> LayerS:
    """Closed-form Fabry-Perot S-matrix of a homogeneous plate.

    Underflow-safe: an opaque plate's interior phase factor flushes to exact
    zero, leaving the front-interface reflection.
    """
    n = beams.n_beams
    kzl = beam_kz(beams, ambient_left)
    kzm = beam_kz(beams, plate.material)
    kzr = beam_kz(beams, ambient_right)
    em = plate.material.eps
    tpp = np.zeros((2 * n, 2 * n), dtype=complex)
    rpm = np.zeros_like(tpp)
    rmp = np.zeros_like(tpp)
    tmm = np.zeros_like(tpp)
    for j in range(n):
        ph = np.exp(1j * kzm[j] * plate.thickness)
        f1 = _fresnel(kzl[j], kzm[j], ambient_left.eps, em)
        f1b = _fresnel(kzm[j], kzl[j], em, ambient_left.eps)
        f2 = _fresnel(kzm[j], kzr[j], em, ambient_right.eps)
        f2b = _fresnel(kzr[j], kzm[j], ambient_right.eps, em)
        for ipol in (0, 1):
            r1, t1 = f1[2 * ipol], f1[2 * ipol + 1]
            r1b, t1b = f1b[2 * ipol], f1b[2 * ipol + 1]
            r2, t2 = f2[2 * ipol], f2[2 * ipol + 1]
            r2b, t2b = f2b[2 * ipol], f2b[2 * ipol + 1]
            den = 1.0 - r1b * r2 * ph * ph
            i = 2 * j + ipol
            tpp[i, i] = t1 * t2 * ph / den
            rpm[i, i] = r1 + t1 * r2 * t1b * ph * ph / den
            rmp[i, i] = r2b + t2 * r1b * t2b * ph * ph / den
            tmm[i, i] = t2b * t1b * ph / den
    return LayerS(beams, ambient_left, ambient_right, tpp, rpm, rmp, tmm)


def star_product(s1: LayerS, s2: LayerS) -> LayerS:
    """Redheffer composition (s1 to the left of s2), exact multiple reflections."""
    if s1.beams.g_ints != s2.beams.g_ints:
        raise InvalidArgumentError("star_product requires identical beam sets")
    n = s1.tpp.shape[0]
    eye = np.eye(n, dtype=complex)
    x12 = _solve_reported(eye - s1.rmp @ s2.rpm, s1.tpp, "star product inter-layer solve")
    x21 = _solve_reported(eye - s2.rpm @ s1.rmp, s2.tmm, "star product inter-layer solve")
    return LayerS(
        s1.beams,
        s1.mat_left,
        s2.mat_right,
        tpp=s2.tpp @ x12,
        rpm=s1.rpm + s1.tmm @ s2.rpm @ x12,
        rmp=s2.rmp + s2.tpp @ s1.rmp @ x21,
        tmm=s1.tmm @ x21,
    )
