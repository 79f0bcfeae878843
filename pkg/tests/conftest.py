"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np


def longest_run(mask) -> tuple[int, int] | None:
    """Indices (first, last) of the longest contiguous True run, or None."""
    mask = np.asarray(mask, dtype=bool)
    best = None
    i = 0
    while i < mask.size:
        if mask[i]:
            j = i
            while j + 1 < mask.size and mask[j + 1]:
                j += 1
            if best is None or (j - i) > (best[1] - best[0]):
                best = (i, j)
            i = j + 1
        else:
            i += 1
    return best


def band_interval(omega, values, threshold: float = 0.2):
    """(omega_low, omega_high) of the longest run with values < threshold."""
    run = longest_run(np.asarray(values) < threshold)
    if run is None:
        return None
    omega = np.asarray(omega, dtype=float)
    return float(omega[run[0]]), float(omega[run[1]])
