"""Fade-state plane partition and map selection.

The relay's metric for a fade state w and a difference pair (d1, d2) is
D = |d1 + w*d2|.  Minimising D over all nonzero pairs classifies w:

* the minimiser has d2 = 0: every exclusive-law map already attains the
  minimum distance 2*sin(pi/M1) (external clustering-independent region);
* the minimiser has d1 = 0: same, with 2*gamma*sin(pi/M2) (internal CI);
* otherwise the minimiser points at a singular fade state h = -d1/d2 and
  the relay should use a map that removes h.

For a mixed pair, D = |d2|*|w - h|, so per SFS only the representative with
the smallest |d2| matters; that weight (written 2*t_h below) turns all the
region geometry into weighted nearest-point comparisons whose boundaries
are lines (equal weights) or circles (unequal weights, Apollonius).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .psk import SchemePair, difference_constellation
from .sfs import SingularFadeState, enumerate_sfs, principal_angle

__all__ = [
    "FadeState",
    "RegionCurve",
    "MapSelection",
    "CiRegionSpec",
    "SfsRegion",
    "EXTERNAL_CI",
    "INTERNAL_CI",
    "USE_SFS_MAP",
    "distance_metric",
    "select_map",
    "pairwise_boundary",
    "external_ci_spec",
    "internal_ci_spec",
    "is_external_ci",
    "is_internal_ci",
    "region_for_sfs",
    "rasterize",
    "classify_analytic_grid",
    "compare_partition",
    "classify_fades",
    "boundary_curves",
    "raster_label",
]

EXTERNAL_CI = "external_ci"
INTERNAL_CI = "internal_ci"
USE_SFS_MAP = "use_sfs_map"

_KIND_EXT = 0
_KIND_INT = 1
_KIND_SFS = 2


@dataclass(frozen=True)
class FadeState:
    gamma: float
    theta: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    @property
    def value(self) -> complex:
        return self.gamma * complex(math.cos(self.theta), math.sin(self.theta))

    @staticmethod
    def from_value(w: complex) -> "FadeState":
        return FadeState(gamma=abs(w), theta=principal_angle(cmath.phase(w)) if w else 0.0)


@dataclass(frozen=True)
class RegionCurve:
    """A circle |w - center| = radius or a line a*x + b*y = c (w = x + jy).

    Lines are stored normalized: (a, b) is a unit vector, c >= 0 (with a
    deterministic sign rule when c = 0), so coefficient comparisons are
    meaningful across construction paths.
    """

    kind: str
    center: complex | None = None
    radius: float | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None

    def distance(self, w: complex) -> float:
        if self.kind == "circle":
            return abs(abs(w - self.center) - self.radius)
        return abs(self.a * w.real + self.b * w.imag - self.c)

    def key(self) -> tuple:
        if self.kind == "circle":
            return ("circle", round(self.center.real, 9), round(self.center.imag, 9),
                    round(self.radius, 9))
        return ("line", round(self.a, 9), round(self.b, 9), round(self.c, 9))


def _circle(center: complex, radius: float) -> RegionCurve:
    return RegionCurve(kind="circle", center=center, radius=radius)


def _line(a: float, b: float, c: float) -> RegionCurve:
    norm = math.hypot(a, b)
    if norm == 0.0:
        raise ValueError("degenerate line")
    a, b, c = a / norm, b / norm, c / norm
    flip = c < -1e-15 or (abs(c) <= 1e-15 and (a < -1e-15 or (abs(a) <= 1e-15 and b < 0)))
    if flip:
        a, b, c = -a, -b, -c
    return RegionCurve(kind="line", a=a, b=b, c=c)


@dataclass(frozen=True)
class MapSelection:
    verdict: str
    sfs: SingularFadeState | None
    witness: tuple[complex, complex]
    distance: float


@dataclass(frozen=True)
class CiRegionSpec:
    external_circles: tuple[RegionCurve, ...]
    internal_curves: tuple[RegionCurve, ...]


@dataclass(frozen=True)
class SfsRegion:
    """The set of fade states quantized to one SFS.

    Membership: w lies in the wedge of half-width pi/M1 around the SFS
    angle, its weighted distance to h beats every neighbor on the wedge's
    three rays, and w falls inside the clustering-independence circle
    around h.
    """

    sfs: SingularFadeState
    wedge: tuple[float, float]
    curves: tuple[RegionCurve, ...]
    ci_radius: float
    weight: float  # 2*sin(n2_min*pi/M2), the |d2| of the best witness
    neighbors: tuple[tuple[complex, float], ...]  # (h', weight')

    def contains(self, w: complex) -> bool:
        h = self.sfs.value
        half = (self.wedge[1] - self.wedge[0]) / 2.0
        center = (self.wedge[0] + self.wedge[1]) / 2.0
        ang = cmath.phase(w) if w != 0 else 0.0
        if abs(principal_angle(ang - center)) > half + 1e-12:
            return False
        if abs(w - h) > self.ci_radius + 1e-12:
            return False
        d = self.weight * abs(w - h)
        return all(d <= wt * abs(w - hv) + 1e-12 for hv, wt in self.neighbors)


class _Geometry:
    """Per-scheme precomputed arrays for fast classification."""

    def __init__(self, scheme: SchemePair):
        self.scheme = scheme
        self.sfs_all = enumerate_sfs(scheme)
        self.sfs = [s for s in self.sfs_all if not s.is_origin]
        self.h = np.array([s.value for s in self.sfs], dtype=complex)
        m2 = scheme.m2
        self.t = np.array(
            [math.sin(s.circle_index[1] * math.pi / m2) for s in self.sfs]
        )
        self.ext_val = 2.0 * math.sin(math.pi / scheme.m1)
        self.int_coeff = 2.0 * math.sin(math.pi / m2)
        self.ci_radius = math.sin(math.pi / scheme.m1) / self.t

        ds1 = difference_constellation(scheme.user_a).points
        ds2 = difference_constellation(scheme.user_b).points
        d1s, d2s, kinds, sfs_idx = [], [], [], []
        for p in ds1:
            d1s.append(p.value); d2s.append(0j); kinds.append(_KIND_EXT); sfs_idx.append(-1)
        for p in ds2:
            d1s.append(0j); d2s.append(p.value); kinds.append(_KIND_INT); sfs_idx.append(-1)
        for p1 in ds1:
            for p2 in ds2:
                ratio = -p1.value / p2.value
                j = int(np.argmin(np.abs(self.h - ratio)))
                if abs(self.h[j] - ratio) > 1e-9:  # pragma: no cover
                    raise AssertionError("difference ratio missing from SFS set")
                d1s.append(p1.value); d2s.append(p2.value)
                kinds.append(_KIND_SFS); sfs_idx.append(j)
        self.cand_d1 = np.asarray(d1s)
        self.cand_d2 = np.asarray(d2s)
        self.cand_kind = np.asarray(kinds, dtype=np.int8)
        self.cand_sfs = np.asarray(sfs_idx)

        halfw = math.pi / scheme.m1
        self.regions: list[SfsRegion] = []
        for i, s in enumerate(self.sfs):
            alpha = s.theta
            rays = (alpha - halfw, alpha, alpha + halfw)
            neigh = []
            for j, s2 in enumerate(self.sfs):
                if j == i or abs(abs(self.h[j]) - abs(self.h[i])) <= 1e-9:
                    continue
                if any(abs(principal_angle(s2.theta - r)) <= 1e-9 for r in rays):
                    neigh.append((complex(self.h[j]), 2.0 * float(self.t[j])))
            # the origin stands in for the internal-CI criterion: its
            # "weighted distance" 2*sin(pi/M2)*|w| is the distance every map
            # already guarantees at small gamma
            neigh.append((0j, self.int_coeff))
            curves = [_line(math.sin(r), -math.cos(r), 0.0) for r in (rays[0], rays[2])]
            curves += [
                pairwise_boundary_values(
                    complex(self.h[i]), 2.0 * float(self.t[i]), hv, wt
                )
                for hv, wt in neigh
            ]
            curves.append(_circle(complex(self.h[i]), float(self.ci_radius[i])))
            self.regions.append(
                SfsRegion(
                    sfs=s,
                    wedge=(alpha - halfw, alpha + halfw),
                    curves=tuple(curves),
                    ci_radius=float(self.ci_radius[i]),
                    weight=2.0 * float(self.t[i]),
                    neighbors=tuple(neigh),
                )
            )

    # --- vectorized kernels ------------------------------------------------

    def oracle_classify(self, ws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """First-minimum argmin over the canonical candidate order.

        Returns (kind, sfs_index) with sfs_index = -1 off SFS verdicts.
        """
        ws = np.ascontiguousarray(ws, dtype=complex).ravel()
        kinds = np.empty(ws.size, dtype=np.int8)
        sidx = np.empty(ws.size, dtype=int)
        step = max(1, (1 << 22) // max(1, self.cand_d1.size))
        for lo in range(0, ws.size, step):
            chunk = ws[lo:lo + step, None]
            d = np.abs(self.cand_d1[None, :] + chunk * self.cand_d2[None, :])
            best = np.argmin(d, axis=1)
            kinds[lo:lo + step] = self.cand_kind[best]
            sidx[lo:lo + step] = self.cand_sfs[best]
        return kinds, sidx

    def weighted_dists(self, ws: np.ndarray) -> np.ndarray:
        """Matrix of D_h(w) = 2*t_h*|w - h| for all nonzero SFS."""
        ws = np.asarray(ws, dtype=complex).ravel()
        return 2.0 * self.t[None, :] * np.abs(ws[:, None] - self.h[None, :])

    def analytic_classify(self, ws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Region classification from the analytic partition.

        Same encoding as oracle_classify; kind 3 marks cells claimed by no
        region (should only ever happen on boundary sets).
        """
        ws = np.ascontiguousarray(ws, dtype=complex).ravel()
        kinds = np.full(ws.size, 3, dtype=np.int8)
        sidx = np.full(ws.size, -1, dtype=int)
        step = max(1, (1 << 22) // max(1, len(self.sfs)))
        halfw = math.pi / self.scheme.m1
        for lo in range(0, ws.size, step):
            w = ws[lo:lo + step]
            gamma = np.abs(w)
            dmat = self.weighted_dists(w)
            dmin = dmat.min(axis=1)
            k = kinds[lo:lo + step]
            si = sidx[lo:lo + step]
            k[(gamma < 1.0) & (dmin >= gamma * self.int_coeff)] = _KIND_INT
            k[(gamma > 1.0) & (dmin >= self.ext_val)] = _KIND_EXT
            open_ = k == 3
            if np.any(open_):
                ang = np.angle(w)
                for i, reg in enumerate(self.regions):
                    if not np.any(open_):
                        break
                    alpha = reg.sfs.theta
                    diff = np.abs(np.angle(np.exp(1j * (ang - alpha))))
                    cand = open_ & (diff <= halfw + 1e-12)
                    cand &= np.abs(w - self.h[i]) <= reg.ci_radius + 1e-12
                    for hv, wt in reg.neighbors:
                        if not np.any(cand):
                            break
                        cand &= dmat[:, i] <= wt * np.abs(w - hv) + 1e-12
                    k[cand] = _KIND_SFS
                    si[cand] = i
                    open_ &= ~cand
            kinds[lo:lo + step] = k
            sidx[lo:lo + step] = si
        return kinds, sidx


_GEOMETRY_CACHE: dict[tuple[int, int], _Geometry] = {}


def _geometry(scheme: SchemePair) -> _Geometry:
    key = (scheme.m1, scheme.m2)
    if key not in _GEOMETRY_CACHE:
        _GEOMETRY_CACHE[key] = _Geometry(scheme)
    return _GEOMETRY_CACHE[key]


def distance_metric(fs: FadeState, d1: complex, d2: complex) -> float:
    if d1 == 0 and d2 == 0:
        raise ValueError("difference pair must be nonzero")
    return abs(d1 + fs.value * d2)


def select_map(fs: FadeState, scheme: SchemePair) -> MapSelection:
    """Exhaustive argmin of the distance metric over all nonzero pairs.

    Ties prefer user-A axis pairs, then user-B axis pairs, then mixed pairs
    in (n1, k1, n2, k2) order, so boundary points classify deterministically.
    """
    geo = _geometry(scheme)
    w = fs.value
    d = np.abs(geo.cand_d1 + w * geo.cand_d2)
    i = int(np.argmin(d))
    kind = int(geo.cand_kind[i])
    witness = (complex(geo.cand_d1[i]), complex(geo.cand_d2[i]))
    if kind == _KIND_EXT:
        return MapSelection(EXTERNAL_CI, None, witness, float(d[i]))
    if kind == _KIND_INT:
        return MapSelection(INTERNAL_CI, None, witness, float(d[i]))
    sfs = geo.sfs[int(geo.cand_sfs[i])]
    return MapSelection(USE_SFS_MAP, sfs, witness, float(d[i]))


def classify_fades(ws, scheme: SchemePair):
    """Vector verdicts for many fade values at once.

    Returns (kind, sfs_index, nearest_index): kind 0=external CI,
    1=internal CI, 2=SFS region; nearest_index is the plain nearest nonzero
    SFS (used for CI-region map policy).
    """
    geo = _geometry(scheme)
    ws = np.asarray(ws, dtype=complex).ravel()
    kinds, sidx = geo.oracle_classify(ws)
    nearest = np.empty(ws.size, dtype=int)
    step = max(1, (1 << 22) // max(1, len(geo.sfs)))
    for lo in range(0, ws.size, step):
        nearest[lo:lo + step] = np.argmin(
            np.abs(ws[lo:lo + step, None] - geo.h[None, :]), axis=1
        )
    return kinds, sidx, nearest


def pairwise_boundary_values(h1: complex, u1: float, h2: complex, u2: float) -> RegionCurve:
    """Locus of u1*|w - h1| = u2*|w - h2| (u_i = |d2| of each witness)."""
    if abs(h1 - h2) <= 1e-12:
        raise ValueError("fade states must differ")
    q1, q2 = u1 * u1, u2 * u2
    if abs(u1 - u2) <= 1e-12:
        v = h2 - h1
        return _line(2.0 * q1 * v.real, 2.0 * q1 * v.imag,
                     q2 * abs(h2) ** 2 - q1 * abs(h1) ** 2)
    center = (q1 * h1 - q2 * h2) / (q1 - q2)
    radius = u1 * u2 * abs(h1 - h2) / abs(q1 - q2)
    return _circle(center, radius)


def pairwise_boundary(h1: SingularFadeState, h2: SingularFadeState,
                      scheme: SchemePair) -> RegionCurve:
    """Boundary between the regions of two SFS: a line when their best
    witnesses share |d2|, otherwise an Apollonius circle."""
    if h1.is_origin or h2.is_origin:
        raise ValueError("boundaries are defined between nonzero SFS")
    m2 = scheme.m2
    u1 = 2.0 * math.sin(h1.circle_index[1] * math.pi / m2)
    u2 = 2.0 * math.sin(h2.circle_index[1] * math.pi / m2)
    return pairwise_boundary_values(h1.value, u1, h2.value, u2)


def external_ci_spec(scheme: SchemePair) -> CiRegionSpec:
    """Circles whose joint exterior (at gamma > 1) is the external CI region.

    One circle per (ring, |d2|-representative) pair: centered at each SFS of
    ring ratio sin(l1*pi/M1)/sin(l2*pi/M2) with radius sin(pi/M1)/sin(l2*pi/M2).
    """
    geo = _geometry(scheme)
    circles: list[RegionCurve] = []
    seen = set()
    for l2 in range(1, scheme.m2 // 2 + 1):
        t = math.sin(l2 * math.pi / scheme.m2)
        radius = math.sin(math.pi / scheme.m1) / t
        for l1 in range(1, scheme.m1 // 2 + 1):
            rho = math.sin(l1 * math.pi / scheme.m1) / t
            for s in geo.sfs:
                if abs(s.gamma - rho) <= 1e-9:
                    c = _circle(s.value, radius)
                    if c.key() not in seen:
                        seen.add(c.key())
                        circles.append(c)
    return CiRegionSpec(external_circles=tuple(circles), internal_curves=())


def internal_ci_spec(scheme: SchemePair) -> CiRegionSpec:
    """Constraint curves whose joint satisfaction (at gamma < 1) is the
    internal CI region: per SFS representative, a half-plane boundary when
    |d2| is already minimal, else the exterior of a circle."""
    geo = _geometry(scheme)
    s2 = math.sin(math.pi / scheme.m2)
    curves: list[RegionCurve] = []
    seen = set()
    for s in geo.sfs:
        gamma = s.gamma
        for n2 in range(1, scheme.m2 // 2 + 1):
            t = math.sin(n2 * math.pi / scheme.m2)
            matched = any(
                abs(math.sin(n1 * math.pi / scheme.m1) / t - gamma) <= 1e-9
                for n1 in range(1, scheme.m1 // 2 + 1)
            )
            if not matched:
                continue
            h = s.value
            if abs(t - s2) <= 1e-12:
                curve = _line(h.real, h.imag, abs(h) ** 2 / 2.0)
            else:
                denom = t * t - s2 * s2
                curve = _circle(t * t * h / denom, t * s2 * abs(h) / denom)
            if curve.key() not in seen:
                seen.add(curve.key())
                curves.append(curve)
    return CiRegionSpec(external_circles=(), internal_curves=tuple(curves))


def is_external_ci(fs: FadeState, scheme: SchemePair) -> bool:
    geo = _geometry(scheme)
    w = fs.value
    if abs(w) <= 1.0:
        return False
    return bool(geo.weighted_dists(np.array([w]))[0].min() >= geo.ext_val)


def is_internal_ci(fs: FadeState, scheme: SchemePair) -> bool:
    geo = _geometry(scheme)
    w = fs.value
    if abs(w) >= 1.0:
        return False
    return bool(geo.weighted_dists(np.array([w]))[0].min() >= abs(w) * geo.int_coeff)


def region_for_sfs(h: SingularFadeState, scheme: SchemePair) -> SfsRegion:
    """Region of a canonical SFS (one lying on theta = 0 or pi/M1); regions
    of the remaining SFS follow by 2*pi/M1 rotational symmetry."""
    if h.is_origin:
        raise ValueError("the origin has no selection region")
    halfw = math.pi / scheme.m1
    if not (abs(h.theta) <= 1e-9 or abs(h.theta - halfw) <= 1e-9):
        raise ValueError("canonical SFS must lie on theta = 0 or theta = pi/M1")
    return _region_any(h, scheme)


def _region_any(h: SingularFadeState, scheme: SchemePair) -> SfsRegion:
    geo = _geometry(scheme)
    for i, s in enumerate(geo.sfs):
        if abs(s.value - h.value) <= 1e-9:
            return geo.regions[i]
    raise ValueError(f"{h.value} is not a singular fade state of the scheme")


def boundary_curves(scheme: SchemePair) -> list[RegionCurve]:
    """Every analytic boundary curve of the partition, deduplicated."""
    geo = _geometry(scheme)
    curves: list[RegionCurve] = []
    seen = set()
    pools = [
        external_ci_spec(scheme).external_circles,
        internal_ci_spec(scheme).internal_curves,
        *[r.curves for r in geo.regions],
    ]
    for pool in pools:
        for c in pool:
            if c.key() not in seen:
                seen.add(c.key())
                curves.append(c)
    return curves


def raster_label(kind: int, sfs: SingularFadeState | None) -> str:
    if kind == _KIND_EXT:
        return "EXT"
    if kind == _KIND_INT:
        return "INT"
    if kind == _KIND_SFS and sfs is not None:
        n1, n2 = sfs.circle_index
        return f"SFS:{n1},{n2},{sfs.phase_slot}"
    return "NONE"


def _grid_centers(bounds: tuple[float, float, float, float], n: int):
    xmin, xmax, ymin, ymax = bounds
    if n < 1 or xmax <= xmin or ymax <= ymin:
        raise ValueError("invalid grid")
    xs = xmin + (np.arange(n) + 0.5) * (xmax - xmin) / n
    ys = ymin + (np.arange(n) + 0.5) * (ymax - ymin) / n
    return xs, ys


def rasterize(scheme: SchemePair, bounds: tuple[float, float, float, float], n: int):
    """Selection verdict at every cell center of an n-by-n grid.

    Returns (xs, ys, labels) with labels in row-major (y outer) order,
    classified by the exhaustive argmin (the runtime authority).
    """
    geo = _geometry(scheme)
    xs, ys = _grid_centers(bounds, n)
    ws = (xs[None, :] + 1j * ys[:, None]).ravel()
    kinds, sidx = geo.oracle_classify(ws)
    labels = [
        raster_label(int(k), geo.sfs[int(i)] if k == _KIND_SFS else None)
        for k, i in zip(kinds, sidx)
    ]
    return xs, ys, labels


def classify_analytic_grid(scheme: SchemePair, bounds, n: int):
    """Analytic-partition labels for the same grid as rasterize."""
    geo = _geometry(scheme)
    xs, ys = _grid_centers(bounds, n)
    ws = (xs[None, :] + 1j * ys[:, None]).ravel()
    kinds, sidx = geo.analytic_classify(ws)
    labels = [
        raster_label(int(k), geo.sfs[int(i)] if k == _KIND_SFS else None)
        for k, i in zip(kinds, sidx)
    ]
    return xs, ys, labels


def _curve_distance_min(ws: np.ndarray, curves) -> np.ndarray:
    """Distance from each point to the nearest curve in the set."""
    lines = [(c.a, c.b, c.c) for c in curves if c.kind == "line"]
    circles = [(c.center, c.radius) for c in curves if c.kind == "circle"]
    out = np.full(ws.size, np.inf)
    x, y = ws.real, ws.imag
    for a, b, c in lines:
        np.minimum(out, np.abs(a * x + b * y - c), out=out)
    for center, radius in circles:
        np.minimum(out, np.abs(np.abs(ws - center) - radius), out=out)
    return out


def compare_partition(scheme: SchemePair, bounds, n: int, margin: float = 1e-3) -> dict:
    """Cell-by-cell agreement between the argmin oracle and the analytic
    partition, ignoring cells within margin of any boundary curve.

    Returns counts: total, boundary (excluded), compared, mismatches.
    """
    geo = _geometry(scheme)
    xs, ys = _grid_centers(bounds, n)
    ws = (xs[None, :] + 1j * ys[:, None]).ravel()
    kinds_o, sidx_o = geo.oracle_classify(ws)
    kinds_a, sidx_a = geo.analytic_classify(ws)
    mismatch = (kinds_o != kinds_a) | ((kinds_o == _KIND_SFS) & (sidx_o != sidx_a))
    near = _curve_distance_min(ws, boundary_curves(scheme)) < margin
    return {
        "total": int(ws.size),
        "boundary": int(np.count_nonzero(near)),
        "compared": int(np.count_nonzero(~near)),
        "mismatches": int(np.count_nonzero(mismatch & ~near)),
    }
