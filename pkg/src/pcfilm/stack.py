"""Finite-crystal scattering: compose layer S-matrices and extract R, T, A.

A stack is an ordered list of elements traversed left (incident side) to
right (exit side).  The ambient medium starts at ``incident`` and is changed
only by Interface elements; every element is validated against the ambient
it sits in.  If the ambient after the last element differs from ``exit``, a
final interface onto the exit medium is appended automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import layer as ly
from .errors import InvalidArgumentError, PcfilmError
from .lattice import SQUARE, Lattice2D, beam_set, structure_constants
from .layer import LayerS, Plate, PlaneOfSpheres, identity_smatrix, star_product
from .mie import Material, VACUUM
from .specfun import LMAX_DEFAULT


@dataclass(frozen=True)
class Interface:
    """Planar boundary switching the ambient from left to right material."""

    left: Material
    right: Material


@dataclass(frozen=True)
class Gap:
    """Free propagation through the current ambient medium."""

    distance: float

    def __post_init__(self):
        if self.distance < 0:
            raise InvalidArgumentError(f"distance must be >= 0, got {self.distance}")


@dataclass(frozen=True)
class Repeat:
    """A sub-stack repeated count times (composed by doubling)."""

    elements: tuple
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise InvalidArgumentError(f"count must be >= 0, got {self.count}")


@dataclass(frozen=True)
class StackDescription:
    """Ordered layer elements with incident ambient and exit termination.

    ``opaque_exit`` marks the exit medium as an absorbing termination whose
    transmitted flux is not collected (T = 0); it defaults to True whenever
    the exit material is lossy.
    """

    elements: tuple
    incident: Material = VACUUM
    exit: Material = VACUUM
    opaque_exit: bool | None = None

    @property
    def exit_is_opaque(self) -> bool:
        if self.opaque_exit is not None:
            return self.opaque_exit
        return not self.exit.lossless


@dataclass(frozen=True)
class NumericalControls:
    """Truncation and solver knobs, threaded explicitly (never global)."""

    lmax: int = LMAX_DEFAULT
    cutoff: float | None = None
    cond_limit: float = ly.COND_REPORT_LIMIT

    def resolved_cutoff(self, omega: float, eps_max: float, kpar_norm: float) -> float:
        if self.cutoff is not None:
            return self.cutoff
        return max(omega * math.sqrt(eps_max), kpar_norm) + 2.0 * math.pi


@dataclass(frozen=True)
class SpectrumPoint:
    """R, T, A (= emissivity E) at one (omega, theta, phi, polarization)."""

    omega: float
    theta: float
    phi: float
    pol: str
    R: float
    T: float
    A: float

    @property
    def E(self) -> float:
        return self.A


def repeat_slice(s: LayerS, n: int) -> LayerS:
    """n-fold star-power of a self-composable slice, by binary doubling."""
    if n < 0:
        raise InvalidArgumentError(f"repeat count must be >= 0, got {n}")
    if s.mat_left.eps != s.mat_right.eps:
        raise InvalidArgumentError("repeat_slice requires the same ambient on both sides")
    acc = identity_smatrix(s.beams, s.mat_left)
    base = s
    while n > 0:
        if n & 1:
            acc = star_product(acc, base)
        n >>= 1
        if n:
            base = star_product(base, base)
    return acc


def _stack_media(elements, ambient: Material):
    """Walk the element list, yielding (element, ambient_at_element)."""
    out = []
    for el in elements:
        if isinstance(el, Interface):
            if el.left.eps != ambient.eps:
                raise InvalidArgumentError(
                    f"interface left medium eps={el.left.eps} != ambient eps={ambient.eps}"
                )
            out.append((el, ambient))
            ambient = el.right
        elif isinstance(el, Repeat):
            sub, amb_after = _stack_media(el.elements, ambient)
            if amb_after.eps != ambient.eps:
                raise InvalidArgumentError("repeated sub-stack must preserve the ambient medium")
            out.append((el, ambient))
        elif isinstance(el, PlaneOfSpheres):
            if el.scatterer.host.eps != ambient.eps:
                raise InvalidArgumentError(
                    f"sphere plane host eps={el.scatterer.host.eps} != ambient eps={ambient.eps}"
                )
            out.append((el, ambient))
        elif isinstance(el, (Gap, Plate)):
            out.append((el, ambient))
        else:
            raise InvalidArgumentError(f"unknown stack element {el!r}")
    return out, ambient


def _collect_media(elements, ambient: Material, acc: set):
    acc.add(complex(ambient.eps))
    walked, ambient_out = _stack_media(elements, ambient)
    for el, amb in walked:
        if isinstance(el, Plate):
            acc.add(complex(el.material.eps))
        if isinstance(el, Repeat):
            _collect_media(el.elements, amb, acc)
    acc.add(complex(ambient_out.eps))
    return acc


def _first_lattice(elements) -> Lattice2D | None:
    for el in elements:
        if isinstance(el, PlaneOfSpheres):
            return el.lattice
        if isinstance(el, Repeat):
            found = _first_lattice(el.elements)
            if found is not None:
                return found
    return None


class _LayerBuilder:
    """Builds per-element S-matrices, caching BeamSets per medium."""

    def __init__(self, lat: Lattice2D, omega: float, kpar, cutoff: float, lmax: int):
        self.lat = lat
        self.omega = omega
        self.kpar = tuple(kpar)
        self.cutoff = cutoff
        self.lmax = lmax
        self._beams: dict[complex, object] = {}
        self._planes: dict = {}

    def beams_in(self, mat: Material):
        key = complex(mat.eps)
        if key not in self._beams:
            self._beams[key] = beam_set(self.lat, self.omega, self.kpar, mat, self.cutoff)
        return self._beams[key]

    def _sphere_plane(self, el: PlaneOfSpheres) -> LayerS:
        # the in-plane offset enters the S-matrix only as diagonal Bloch
        # phases, so one base matrix per scatterer serves all offsets
        host = el.scatterer.host
        key = (el.lattice.a1, el.lattice.a2, el.scatterer, complex(host.eps))
        if key not in self._planes:
            sc = structure_constants(el.lattice, self.omega, self.kpar, host, self.lmax)
            base = ly.sphere_plane_smatrix(
                PlaneOfSpheres(el.lattice, el.scatterer), sc, self.beams_in(host), self.lmax
            )
            self._planes[key] = base
        base = self._planes[key]
        if el.offset == (0.0, 0.0):
            return base
        beams = base.beams
        d = np.repeat(
            np.exp(1j * (np.asarray(beams.kt) @ np.asarray(el.offset, dtype=float))), 2
        )
        conj = lambda b: (1.0 / d)[:, None] * b * d[None, :]
        return LayerS(
            beams, base.mat_left, base.mat_right,
            tpp=conj(base.tpp), rpm=conj(base.rpm), rmp=conj(base.rmp), tmm=conj(base.tmm),
        )

    def build(self, el, ambient: Material) -> LayerS:
        if isinstance(el, Interface):
            return ly.interface_smatrix(el.left, el.right, self.beams_in(el.left))
        if isinstance(el, Gap):
            return ly.gap_smatrix(el.distance, self.beams_in(ambient))
        if isinstance(el, Plate):
            return ly.plate_smatrix(el, self.beams_in(ambient), ambient, ambient)
        if isinstance(el, PlaneOfSpheres):
            return self._sphere_plane(el)
        if isinstance(el, Repeat):
            sub = self.compose(el.elements, ambient)
            return repeat_slice(sub, el.count)
        raise InvalidArgumentError(f"unknown stack element {el!r}")

    def compose(self, elements, ambient: Material) -> LayerS:
        walked, _ = _stack_media(elements, ambient)
        total = None
        for el, amb in walked:
            s = self.build(el, amb)
            total = s if total is None else star_product(total, s)
        if total is None:
            total = identity_smatrix(self.beams_in(ambient), ambient)
        return total


def slice_smatrix(
    elements,
    ambient: Material,
    omega: float,
    kpar,
    controls: NumericalControls,
    lat: Lattice2D | None = None,
) -> LayerS:
    """S-matrix of a bare element sequence inside a fixed ambient medium.

    Used for unit slices of a periodic stacking (band structure) where no
    entrance/exit interfaces are wanted.
    """
    media = _collect_media(elements, ambient, set())
    eps_max = max(abs(e) for e in media)
    kpar = np.asarray(kpar, dtype=float)
    cutoff = controls.resolved_cutoff(omega, eps_max, float(np.hypot(*kpar)))
    if lat is None:
        lat = _first_lattice(elements) or SQUARE
    builder = _LayerBuilder(lat, omega, kpar, cutoff, controls.lmax)
    return builder.compose(elements, ambient)


def stack_smatrix(
    desc: StackDescription, omega: float, kpar, controls: NumericalControls
) -> LayerS:
    """Total S-matrix of the stack, including the final exit interface."""
    _, last_ambient = _stack_media(desc.elements, desc.incident)
    media = _collect_media(desc.elements, desc.incident, set())
    media.add(complex(desc.exit.eps))
    eps_max = max(abs(e) for e in media)
    kpar = np.asarray(kpar, dtype=float)
    cutoff = controls.resolved_cutoff(omega, eps_max, float(np.hypot(*kpar)))
    lat = _first_lattice(desc.elements) or SQUARE
    builder = _LayerBuilder(lat, omega, kpar, cutoff, controls.lmax)
    total = builder.compose(desc.elements, desc.incident)
    if last_ambient.eps != desc.exit.eps:
        tail = ly.interface_smatrix(last_ambient, desc.exit, builder.beams_in(last_ambient))
        total = star_product(total, tail)
    return total


def _extract_point(
    desc: StackDescription, total: LayerS, omega: float, theta: float, phi: float, pol: str
) -> SpectrumPoint:
    beams = total.beams
    # the incident beam is the diffraction order whose kt equals kpar
    target = (-beams.fold_shift[0], -beams.fold_shift[1])
    try:
        j0 = beams.g_ints.index(target)
    except ValueError as exc:
        raise PcfilmError("incident beam missing from beam set") from exc
    col = 2 * j0 + (0 if pol == "s" else 1)

    kz_in = ly.beam_kz(beams, desc.incident)
    prop_in = kz_in.imag == 0.0
    r_amp = total.rpm[:, col]
    t_amp = total.tpp[:, col]
    if not (np.all(np.isfinite(r_amp)) and np.all(np.isfinite(t_amp))):
        raise PcfilmError("non-finite amplitudes in stack solution")
    mask_in = np.repeat(prop_in, 2)
    R = float(np.sum(np.abs(r_amp[mask_in]) ** 2))
    if desc.exit_is_opaque:
        T = 0.0
    else:
        kz_out = ly.beam_kz(beams, desc.exit)
        mask_out = np.repeat(kz_out.imag == 0.0, 2)
        T = float(np.sum(np.abs(t_amp[mask_out]) ** 2))
    A = 1.0 - R - T
    return SpectrumPoint(omega=omega, theta=theta, phi=phi, pol=pol, R=R, T=T, A=A)


def solve_stack_points(
    desc: StackDescription,
    omega: float,
    theta: float,
    phi: float,
    pols,
    controls: NumericalControls | None = None,
) -> tuple:
    """SpectrumPoints for several polarizations sharing one stack S-matrix."""
    if controls is None:
        controls = NumericalControls()
    if omega <= 0:
        raise InvalidArgumentError(f"omega must be > 0, got {omega}")
    if not 0 <= theta < math.pi / 2:
        raise InvalidArgumentError(f"theta must be in [0, pi/2), got {theta}")
    for pol in pols:
        if pol not in ("s", "p"):
            raise InvalidArgumentError(f"pol must be 's' or 'p', got {pol!r}")
    if not desc.incident.lossless:
        raise InvalidArgumentError("incident ambient must be lossless")
    n_inc = desc.incident.n.real
    kpar = omega * n_inc * math.sin(theta) * np.array([math.cos(phi), math.sin(phi)])
    total = stack_smatrix(desc, omega, kpar, controls)
    return tuple(_extract_point(desc, total, omega, theta, phi, pol) for pol in pols)


def solve_stack(
    desc: StackDescription,
    omega: float,
    theta: float,
    phi: float,
    pol: str,
    controls: NumericalControls | None = None,
) -> SpectrumPoint:
    """R, T, A for a unit-flux plane wave incident from the left ambient."""
    return solve_stack_points(desc, omega, theta, phi, (pol,), controls)[0]
