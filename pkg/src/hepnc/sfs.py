"""Singular fade states: closed-form enumeration and removal constraints.

A fade state w = H_B/H_A is singular when two distinct symbol pairs give the
same noiseless relay observation, i.e. d1 + w*d2 = 0 for difference points
d1, d2.  For symmetric PSK the nonzero solutions organise into circles: one
radius sin(n1*pi/M1)/sin(n2*pi/M2) per distinct ring ratio, M1 equispaced
points per circle.  The phase offset of each circle is derived here from a
representative difference pair rather than from a parity case table, which
keeps the enumeration valid for every power-of-two scheme including BPSK.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from ._complexset import DEFAULT_TOL, dedupe
from .psk import DifferenceConstellation, SchemePair, difference_constellation

__all__ = [
    "SingularFadeState",
    "SingularityConstraint",
    "principal_angle",
    "enumerate_sfs",
    "brute_force_sfs",
    "sfs_circle_radii",
    "singularity_constraints",
    "match_sfs",
]

TWO_PI = 2.0 * math.pi


def principal_angle(theta: float) -> float:
    """Reduce an angle to [-pi, pi); pi maps to -pi."""
    x = math.fmod(theta + math.pi, TWO_PI)
    if x < 0.0:
        x += TWO_PI
    return x - math.pi


@dataclass(frozen=True)
class SingularFadeState:
    """One singular fade state with its circle/phase provenance.

    circle_index is the (n1, n2) ring pair of the representative difference
    ratio with the smallest n2 (smallest |d2|); phase_slot numbers the M1
    points of the circle in increasing principal angle.  The origin carries
    None for both.
    """

    value: complex
    circle_index: tuple[int, int] | None
    phase_slot: int | None

    @property
    def gamma(self) -> float:
        return abs(self.value)

    @property
    def theta(self) -> float:
        return principal_angle(cmath.phase(self.value)) if self.value != 0 else 0.0

    @property
    def is_origin(self) -> bool:
        return self.circle_index is None


@dataclass(frozen=True)
class SingularityConstraint:
    """Cluster-label equalities required to remove one SFS.

    pairs holds 4-tuples (a, b, a2, b2) meaning cells (x_A=a, x_B=b) and
    (x_A=a2, x_B=b2) must share a label; both symbol indices differ within
    every pair, so the equalities never contradict the exclusive law on
    their own.  The origin (and only the origin) is irremovable: its
    collisions pin pairs that the exclusive law must keep apart.
    """

    sfs: SingularFadeState
    pairs: tuple[tuple[int, int, int, int], ...]
    irremovable: bool


def _ring_point(ds: DifferenceConstellation, n: int) -> complex:
    for p in ds.points:
        if p.n == n and p.k == 0:
            return p.value
    raise ValueError(f"no ring {n} in difference constellation of order {ds.order}")


def _circle_reps(scheme: SchemePair) -> list[tuple[float, int, int]]:
    """Distinct circle radii with their smallest-n2 representative (n1, n2)."""
    reps: list[tuple[float, int, int]] = []
    for n2 in range(1, scheme.m2 // 2 + 1):
        for n1 in range(1, scheme.m1 // 2 + 1):
            r = math.sin(n1 * math.pi / scheme.m1) / math.sin(n2 * math.pi / scheme.m2)
            if not any(abs(r - r0) <= 1e-12 for r0, _, _ in reps):
                reps.append((r, n1, n2))
    reps.sort(key=lambda t: t[0])
    return reps


def sfs_circle_radii(scheme: SchemePair) -> list[float]:
    """Sorted distinct nonzero SFS circle radii."""
    return [r for r, _, _ in _circle_reps(scheme)]


def enumerate_sfs(scheme: SchemePair) -> list[SingularFadeState]:
    """Origin plus every circle of M1 points, ordered by radius then angle."""
    ds1 = difference_constellation(scheme.user_a)
    ds2 = difference_constellation(scheme.user_b)
    m1 = scheme.m1
    spacing = TWO_PI / m1

    out = [SingularFadeState(value=0j, circle_index=None, phase_slot=None)]
    for radius, n1, n2 in _circle_reps(scheme):
        w0 = -_ring_point(ds1, n1) / _ring_point(ds2, n2)
        offset = math.fmod(cmath.phase(w0), spacing)
        if offset < 0.0:
            offset += spacing
        # circles sit exactly on 0 or half-spacing offsets; snap float dust
        for exact in (0.0, spacing / 2.0, spacing):
            if abs(offset - exact) <= 1e-9:
                offset = exact % spacing
                break
        angles = sorted(principal_angle(offset + l * spacing) for l in range(m1))
        for slot, ang in enumerate(angles):
            out.append(
                SingularFadeState(
                    value=radius * cmath.exp(1j * ang),
                    circle_index=(n1, n2),
                    phase_slot=slot,
                )
            )
    return out


def brute_force_sfs(scheme: SchemePair, tol: float = DEFAULT_TOL) -> list[complex]:
    """Oracle: the deduplicated ratio set {-d1/d2} plus the origin."""
    d1s = difference_constellation(scheme.user_a).nonzero_values()
    d2s = difference_constellation(scheme.user_b).nonzero_values()
    ratios = (-d1s[:, None] / d2s[None, :]).ravel()
    return dedupe([0j, *ratios], tol)


def singularity_constraints(h: SingularFadeState, scheme: SchemePair) -> SingularityConstraint:
    """All pair-merge equalities that hold exactly at the fade state h."""
    if h.is_origin:
        return SingularityConstraint(sfs=h, pairs=(), irremovable=True)
    s1 = scheme.user_a.points
    s2 = scheme.user_b.points
    w = h.value
    pairs = []
    cells = [(a, b) for a in range(scheme.m1) for b in range(scheme.m2)]
    for i, (a, b) in enumerate(cells):
        for a2, b2 in cells[i + 1:]:
            if a == a2 or b == b2:
                continue
            if abs((s1[a] - s1[a2]) + w * (s2[b] - s2[b2])) < DEFAULT_TOL:
                pairs.append((a, b, a2, b2))
    pairs.sort()
    return SingularityConstraint(sfs=h, pairs=tuple(pairs), irremovable=False)


def match_sfs(
    sfs_list: list[SingularFadeState], value: complex, tol: float = DEFAULT_TOL
) -> SingularFadeState | None:
    for s in sfs_list:
        if abs(s.value - value) <= tol:
            return s
    return None
