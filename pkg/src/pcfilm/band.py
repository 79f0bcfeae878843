"""Complex band structure of the infinitely repeated slice.

The Bloch condition on a unit slice with scattering blocks (tpp, rpm, rmp,
tmm) is posed as the generalized eigenproblem

    [[tpp, rmp], [0, I]] v = lambda [[I, 0], [rpm, tmm]] v,   v = (a+_L, b-_R)

which never inverts the (exponentially small in-gap) transmission blocks.
Bloch wavevectors are kz = -i ln(lambda) / period with Re(kz) folded into
(-pi/d, pi/d].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InvalidArgumentError
from .layer import LayerS

PROP_TOL = 1e-6  # |ln|lambda|| below this counts as a propagating band


@dataclass(frozen=True)
class BandPoint:
    """Bloch wavevectors (units 1/a) of one stacking period at fixed (omega, kpar).

    kz_list holds the Im(kz) >= 0 representative of every (lambda, 1/lambda*)
    pair, sorted by (Im kz, Re kz); vectors are the matching eigenvectors
    (columns), used for band continuation across a frequency scan.
    """

    omega: float
    kpar: tuple[float, float]
    period: float
    kz_list: np.ndarray
    vectors: np.ndarray

    @property
    def propagating(self) -> np.ndarray:
        return np.abs(self.kz_list.imag) * self.period < PROP_TOL

    @property
    def min_decay(self) -> float:
        """Smallest Im(kz) among non-propagating branches (inf if none)."""
        dec = self.kz_list.imag[~self.propagating]
        return float(dec.min()) if dec.size else math.inf


def complex_bands(unit: LayerS, period: float, omega: float, kpar) -> BandPoint:
    """All Bloch branches of the repeated unit slice at one (omega, kpar)."""
    if period <= 0:
        raise InvalidArgumentError(f"period must be > 0, got {period}")
    if unit.mat_left.eps != unit.mat_right.eps:
        raise InvalidArgumentError("unit slice must have the same ambient on both sides")
    n = unit.tpp.shape[0]
    eye = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    a = np.block([[unit.tpp, unit.rmp], [zero, eye]])
    b = np.block([[eye, zero], [unit.rpm, unit.tmm]])
    try:
        vals, vecs = scipy.linalg.eig(a, b)
    except Exception as exc:  # scipy raises LinAlgError subclasses
        raise ConvergenceError(
            "generalized eigensolver failed",
            {
                "cond_a": np.linalg.cond(a),
                "cond_b": np.linalg.cond(b),
                "omega": omega,
            },
        ) from exc
    keep = []
    for i, lam in enumerate(vals):
        if not np.isfinite(lam) or lam == 0:
            continue  # half of a fully evanescent pair; its partner is kept
        kz = -1j * np.log(lam) / period
        # fold the Bloch phase into (-pi/d, pi/d]
        re = kz.real - 2 * math.pi / period * math.floor(
            (kz.real + math.pi / period) / (2 * math.pi / period)
        )
        kz = re + 1j * kz.imag
        if kz.imag > -PROP_TOL / period:
            keep.append((kz, i))
    keep.sort(key=lambda t: (round(t[0].imag, 9), round(t[0].real, 9)))
    kz_list = np.array([t[0] for t in keep])
    vectors = vecs[:, [t[1] for t in keep]]
    return BandPoint(
        omega=float(omega),
        kpar=(float(kpar[0]), float(kpar[1])),
        period=float(period),
        kz_list=kz_list,
        vectors=vectors,
    )


def overlap_permutation(prev: BandPoint, cur: BandPoint) -> np.ndarray:
    """Column order of ``cur`` branches maximizing eigenvector overlap with ``prev``.

    Greedy assignment on |<v_prev, v_cur>|; used to keep band lines connected
    across a frequency scan instead of sorting by eigenvalue.
    """
    p = prev.vectors / np.linalg.norm(prev.vectors, axis=0, keepdims=True)
    c = cur.vectors / np.linalg.norm(cur.vectors, axis=0, keepdims=True)
    ov = np.abs(p.conj().T @ c)
    nprev, ncur = ov.shape
    slot = np.full(nprev, -1, dtype=int)
    work = ov.copy()
    used = set()
    for _ in range(min(nprev, ncur)):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        if work[i, j] < 0:
            break
        slot[i] = j
        used.add(j)
        work[i, :] = -1.0
        work[:, j] = -1.0
    out = [j for j in slot if j >= 0]
    out += [j for j in range(ncur) if j not in used]
    return np.array(out, dtype=int)


def gap_edges(scan, refine=None, tol: float = 1e-4):
    """Maximal omega intervals of a monotone scan with no propagating branch.

    ``scan`` is a sequence of BandPoint at increasing omega.  When ``refine``
    (a callable omega -> BandPoint) is given, each edge is sharpened by
    bisection to ``tol`` in omega; otherwise edges sit at grid midpoints.
    """
    scan = list(scan)
    if any(scan[i].omega >= scan[i + 1].omega for i in range(len(scan) - 1)):
        raise InvalidArgumentError("scan must be strictly increasing in omega")
    in_gap = [not bp.propagating.any() for bp in scan]

    def edge(om_prop: float, om_gap: float) -> float:
        if refine is None:
            return 0.5 * (om_prop + om_gap)
        lo, hi = om_prop, om_gap
        while abs(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            if refine(mid).propagating.any():
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    gaps = []
    i = 0
    while i < len(scan):
        if in_gap[i]:
            j = i
            while j + 1 < len(scan) and in_gap[j + 1]:
                j += 1
            lo = scan[i].omega if i == 0 else edge(scan[i - 1].omega, scan[i].omega)
            hi = scan[j].omega if j == len(scan) - 1 else edge(scan[j + 1].omega, scan[j].omega)
            gaps.append((lo, hi))
            i = j + 1
        else:
            i += 1
    return gaps
