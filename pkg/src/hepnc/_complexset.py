"""Tolerance-aware helpers for finite sets of complex values.

Everything downstream compares constellation points, difference points and
fade states that are separated by gaps orders of magnitude above double
rounding error, so a single absolute tolerance is enough.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def dedupe(values: Iterable[complex], tol: float = DEFAULT_TOL) -> list[complex]:
    """Collapse near-equal values, keeping the first representative of each.

    Sorts by real part so candidate duplicates are confined to a sliding
    window; near-equal values always end up with near-equal real parts.
    """
    arr = np.asarray(list(values), dtype=complex)
    if arr.size == 0:
        return []
    order = np.lexsort((arr.imag, arr.real))
    kept: list[complex] = []
    # window of accepted values whose real part is still within tol
    window: list[complex] = []
    for v in arr[order]:
        v = complex(v)
        window = [u for u in window if v.real - u.real <= tol]
        if not any(abs(v - u) <= tol for u in window):
            kept.append(v)
        window.append(v)
    return kept


def find(values: Sequence[complex], target: complex, tol: float = DEFAULT_TOL) -> int:
    """Index of the first element within tol of target, or -1."""
    for i, v in enumerate(values):
        if abs(v - target) <= tol:
            return i
    return -1


def sets_equal(a: Iterable[complex], b: Iterable[complex], tol: float = DEFAULT_TOL) -> bool:
    """Set equality under tolerance (duplicates within each side collapsed)."""
    da = dedupe(a, tol)
    db = dedupe(b, tol)
    if len(da) != len(db):
        return False
    remaining = list(db)
    for v in da:
        i = find(remaining, v, tol)
        if i < 0:
            return False
        remaining.pop(i)
    return not remaining
