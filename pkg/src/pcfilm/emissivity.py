"""Kirchhoff-law emissivity maps and Planck weighting.

Emissivity is the absorptance of the (opaquely terminated) stack: E = A =
1 - R - T, evaluated point-by-point by the stack solver.  Planck weighting
is kept dimensionless: spectra are weighted by b(x) = x^3 / (e^x - 1) with
x = omega / x0, where x0 = a k_B T / (hbar c) maps the temperature to the
frequency unit (omega in c/a).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, PcfilmError
from .stack import NumericalControls, StackDescription, solve_stack, solve_stack_points

PLANCK_INTEGRAL = math.pi**4 / 15.0  # int_0^inf x^3/(e^x - 1) dx
PLANCK_PEAK_X = 2.8214393721220787   # root of 3(1 - e^-x) = x


@dataclass(frozen=True)
class EmissivityMap:
    """E(omega, theta) per polarization and their unpolarized average."""

    omega_grid: np.ndarray
    theta_grid: np.ndarray
    e_s: np.ndarray
    e_p: np.ndarray

    @property
    def e_avg(self) -> np.ndarray:
        return 0.5 * (self.e_s + self.e_p)


def emissivity_point(
    desc: StackDescription,
    omega: float,
    theta: float,
    pol: str,
    controls: NumericalControls | None = None,
    phi: float = 0.0,
) -> float:
    """Spectral directional emissivity E = A at one point."""
    return solve_stack(desc, omega, theta, phi, pol, controls).A


def angular_map(
    desc: StackDescription,
    omega_grid,
    theta_grid,
    controls: NumericalControls | None = None,
    phi: float = 0.0,
    threads: int = 1,
) -> EmissivityMap:
    """Full E(omega, theta) map for s, p; deterministic assembly by grid index."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    theta_grid = np.asarray(theta_grid, dtype=float)
    if omega_grid.size == 0 or theta_grid.size == 0:
        raise InvalidArgumentError("grids must be nonempty")
    tasks = [(i, j) for i in range(omega_grid.size) for j in range(theta_grid.size)]

    def work(task):
        i, j = task
        try:
            # both polarizations share one stack S-matrix
            ps, pp = solve_stack_points(
                desc, omega_grid[i], theta_grid[j], phi, ("s", "p"), controls
            )
            return ps.A, pp.A
        except PcfilmError as exc:
            raise PcfilmError(
                f"emissivity failed at omega={omega_grid[i]}, theta={theta_grid[j]}: {exc}"
            ) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    e_s = np.zeros((omega_grid.size, theta_grid.size))
    e_p = np.zeros_like(e_s)
    for (i, j), (vs, vp) in zip(tasks, results):
        e_s[i, j] = vs
        e_p[i, j] = vp
    return EmissivityMap(omega_grid, theta_grid, e_s, e_p)


def planck_b(x):
    """Dimensionless Planck spectral density b(x) = x^3 / (e^x - 1)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    small = x < 1e-8
    pos = (x > 0) & ~small
    out[pos] = x[pos] ** 3 / np.expm1(x[pos])
    out[small & (x > 0)] = x[small & (x > 0)] ** 2  # leading order
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PlanckWeighted:
    """Planck-weighted spectrum with the grid's coverage of the full integral."""

    omega_grid: np.ndarray
    weighted: np.ndarray
    coverage: float
    low_coverage: bool


def planck_weight(omega_grid, emissivity, x0: float) -> PlanckWeighted:
    """Weight a spectrum E(omega) by the Planck density at scale x0.

    Output is E(omega) b(omega/x0) normalized so a unit-emissivity spectrum
    integrates to exactly 1 over the grid.  The coverage fraction reports
    how much of the full Planck integral the grid spans; below 80% the
    low-coverage flag is set.
    """
    if x0 <= 0:
        raise InvalidArgumentError(f"x0 must be > 0, got {x0}")
    omega_grid = np.asarray(omega_grid, dtype=float)
    emissivity = np.asarray(emissivity, dtype=float)
    if omega_grid.ndim != 1 or np.any(np.diff(omega_grid) <= 0):
        raise InvalidArgumentError("omega grid must be strictly increasing")
    x = omega_grid / x0
    b = planck_b(x)
    norm = np.trapezoid(b, omega_grid)
    if norm == 0:
        raise InvalidArgumentError("Planck weight vanishes on the given grid")
    coverage = float(np.trapezoid(planck_b(x), x) / PLANCK_INTEGRAL)
    return PlanckWeighted(
        omega_grid=omega_grid,
        weighted=emissivity * b / norm,
        coverage=coverage,
        low_coverage=coverage < 0.80,
    )
