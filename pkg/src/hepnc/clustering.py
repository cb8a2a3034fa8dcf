"""Latin-rectangle cluster maps for the relay.

A cluster map assigns every symbol pair (x_A, x_B) a relay label.  Rows are
indexed by x_B, columns by x_A.  The exclusive law (no repeated label in any
row or column) is what lets each user invert the map with its own symbol;
removing a singular fade state additionally forces the pairs that collide
there into a common label.  Construction is constraint merging (union-find)
followed by exact backtracking completion over a bounded label budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .psk import SchemePair
from .sfs import (
    SingularFadeState,
    SingularityConstraint,
    enumerate_sfs,
    singularity_constraints,
)

__all__ = [
    "ClusterMap",
    "MapLibrary",
    "check_exclusive_law",
    "min_cluster_distance",
    "removes_sfs",
    "broadcast_length",
    "builtin_library",
    "construct_map_for_sfs",
    "construct_library",
]

REMOVAL_THRESHOLD = 1e-6

# Relay map tables keyed by (M1, M2).  First row is always the identity row;
# each entry lists the remaining rows of one map.
_BUILTIN_ROWS: dict[tuple[int, int], list[list[list[int]]]] = {
    (4, 2): [
        [[1, 0, 3, 2]],
        [[3, 2, 1, 0]],
        [[2, 3, 0, 1]],
    ],
    (8, 2): [
        [[1, 5, 6, 7, 3, 4, 2, 0]],
        [[3, 0, 1, 2, 5, 6, 7, 4]],
        [[7, 2, 3, 4, 1, 0, 5, 6]],
        [[2, 7, 0, 5, 6, 3, 4, 1]],
        [[6, 3, 4, 1, 2, 7, 0, 5]],
        [[5, 4, 7, 6, 1, 0, 3, 2]],
        [[3, 6, 5, 0, 7, 2, 1, 4]],
        [[4, 5, 6, 7, 0, 1, 2, 3]],
    ],
}


@dataclass(frozen=True)
class ClusterMap:
    """An M2-row by M1-column label array satisfying the exclusive law."""

    scheme: SchemePair
    cells: np.ndarray
    label_count: int

    @staticmethod
    def from_cells(scheme: SchemePair, cells) -> "ClusterMap":
        arr = np.asarray(cells, dtype=int)
        if arr.shape != (scheme.m2, scheme.m1):
            raise ValueError(
                f"cells must be {scheme.m2}x{scheme.m1}, got {arr.shape}"
            )
        labels = np.unique(arr)
        k = labels.size
        if arr.min() < 0 or not np.array_equal(labels, np.arange(k)):
            raise ValueError("labels must be exactly 0..K-1")
        if not (max(scheme.m1, scheme.m2) <= k <= scheme.m1 * scheme.m2):
            raise ValueError(f"label count {k} out of range for scheme")
        arr.setflags(write=False)
        m = ClusterMap(scheme=scheme, cells=arr, label_count=k)
        if not check_exclusive_law(m):
            raise ValueError("cells violate the exclusive law")
        return m

    @cached_property
    def _intercluster_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """(d1, d2) difference arrays over all pairs in different clusters."""
        s1 = self.scheme.user_a.array()
        s2 = self.scheme.user_b.array()
        cells = [(a, b) for a in range(self.scheme.m1) for b in range(self.scheme.m2)]
        d1s, d2s = [], []
        for i, (a, b) in enumerate(cells):
            for a2, b2 in cells[i + 1:]:
                if self.cells[b, a] != self.cells[b2, a2]:
                    d1s.append(s1[a] - s1[a2])
                    d2s.append(s2[b] - s2[b2])
        return np.asarray(d1s), np.asarray(d2s)

    @cached_property
    def inverse_by_row(self) -> np.ndarray:
        """inverse_by_row[b, label] = the column a with cells[b, a] = label,
        or -1 when the label does not appear in row b."""
        inv = np.full((self.scheme.m2, self.label_count), -1, dtype=int)
        for b in range(self.scheme.m2):
            for a in range(self.scheme.m1):
                inv[b, self.cells[b, a]] = a
        return inv

    @cached_property
    def inverse_by_col(self) -> np.ndarray:
        inv = np.full((self.scheme.m1, self.label_count), -1, dtype=int)
        for a in range(self.scheme.m1):
            for b in range(self.scheme.m2):
                inv[a, self.cells[b, a]] = b
        return inv


def check_exclusive_law(m: ClusterMap) -> bool:
    cells = m.cells
    for row in cells:
        if np.unique(row).size != row.size:
            return False
    for col in cells.T:
        if np.unique(col).size != col.size:
            return False
    return True


def min_cluster_distance(m: ClusterMap, gamma: float, theta: float) -> float:
    """Minimum of |d1 + gamma e^{j theta} d2| over inter-cluster pairs."""
    d1s, d2s = m._intercluster_pairs
    w = gamma * complex(math.cos(theta), math.sin(theta))
    return float(np.min(np.abs(d1s + w * d2s)))


def removes_sfs(m: ClusterMap, h: SingularFadeState) -> bool:
    if h.is_origin:
        raise ValueError("origin SFS cannot be removed by clustering")
    return min_cluster_distance(m, h.gamma, h.theta) > REMOVAL_THRESHOLD


def broadcast_length(m: ClusterMap) -> int:
    """Broadcast channel uses needed to convey one label with M2-PSK."""
    bits = (m.label_count - 1).bit_length()
    return max(1, math.ceil(bits / m.scheme.user_b.bits_per_symbol))


@dataclass(frozen=True)
class MapLibrary:
    """A set of maps jointly removing every removable SFS of a scheme.

    coverage[i] lists, for sfs_list[i], the indices of maps removing it
    (empty for the origin).
    """

    scheme: SchemePair
    maps: tuple[ClusterMap, ...]
    sfs_list: tuple[SingularFadeState, ...]
    coverage: tuple[tuple[int, ...], ...]

    def map_for(self, h: SingularFadeState, max_maps: int | None = None) -> int | None:
        """Lowest-index map removing h among the first max_maps, else None."""
        limit = len(self.maps) if max_maps is None else max_maps
        for i, s in enumerate(self.sfs_list):
            if s is h or abs(s.value - h.value) <= 1e-9:
                for mi in self.coverage[i]:
                    if mi < limit:
                        return mi
                return None
        raise ValueError("fade state not in library's SFS list")


def _library_from_maps(scheme: SchemePair, maps: list[ClusterMap]) -> MapLibrary:
    sfs_list = enumerate_sfs(scheme)
    coverage = []
    for s in sfs_list:
        if s.is_origin:
            coverage.append(())
            continue
        coverage.append(tuple(i for i, m in enumerate(maps) if removes_sfs(m, s)))
    return MapLibrary(
        scheme=scheme,
        maps=tuple(maps),
        sfs_list=tuple(sfs_list),
        coverage=tuple(coverage),
    )


def builtin_library(scheme: SchemePair) -> MapLibrary:
    key = (scheme.m1, scheme.m2)
    if key not in _BUILTIN_ROWS:
        raise ValueError(
            f"no builtin map library for scheme {key}; use construct_library"
        )
    identity = list(range(scheme.m1))
    maps = [
        ClusterMap.from_cells(scheme, [identity] + rows)
        for rows in _BUILTIN_ROWS[key]
    ]
    return _library_from_maps(scheme, maps)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def copy(self) -> "_UnionFind":
        uf = _UnionFind(0)
        uf.parent = list(self.parent)
        return uf


def _merge_state(scheme: SchemePair, constraints: list[SingularityConstraint]) -> _UnionFind | None:
    """Union cells of all constraint pairs; None when a component would hold
    two cells of one row or one column (exclusive-law conflict)."""
    m1, m2 = scheme.m1, scheme.m2
    uf = _UnionFind(m1 * m2)
    for c in constraints:
        for a, b, a2, b2 in c.pairs:
            uf.union(b * m1 + a, b2 * m1 + a2)
    seen_rows: dict[int, set[int]] = {}
    seen_cols: dict[int, set[int]] = {}
    for b in range(m2):
        for a in range(m1):
            root = uf.find(b * m1 + a)
            if b in seen_rows.setdefault(root, set()):
                return None
            seen_rows[root].add(b)
            if a in seen_cols.setdefault(root, set()):
                return None
            seen_cols[root].add(a)
    return uf


def _color_components(scheme: SchemePair, uf: _UnionFind, label_budget: int) -> np.ndarray | None:
    """Exact backtracking label assignment honoring merges and the exclusive
    law, using at most label_budget labels.  Components are labeled
    most-constrained-first; candidate labels are tried lowest-first with at
    most one fresh label per step (symmetry breaking)."""
    m1, m2 = scheme.m1, scheme.m2
    roots = sorted({uf.find(i) for i in range(m1 * m2)})
    comp_of = {r: i for i, r in enumerate(roots)}
    comp_cells: list[list[tuple[int, int]]] = [[] for _ in roots]
    for b in range(m2):
        for a in range(m1):
            comp_cells[comp_of[uf.find(b * m1 + a)]].append((b, a))

    n = len(roots)
    # conflict graph: components sharing a row or column must differ
    adj: list[set[int]] = [set() for _ in range(n)]
    by_row: list[list[int]] = [[] for _ in range(m2)]
    by_col: list[list[int]] = [[] for _ in range(m1)]
    for ci, cells in enumerate(comp_cells):
        for b, a in cells:
            by_row[b].append(ci)
            by_col[a].append(ci)
    for group in (*by_row, *by_col):
        for i, ci in enumerate(group):
            for cj in group[i + 1:]:
                adj[ci].add(cj)
                adj[cj].add(ci)

    colors = [-1] * n
    used = 0

    def pick() -> int:
        best, best_key = -1, None
        for ci in range(n):
            if colors[ci] >= 0:
                continue
            banned = {colors[cj] for cj in adj[ci] if colors[cj] >= 0}
            avail = min(used, label_budget) - len(banned) + (1 if used < label_budget else 0)
            key = (avail, ci)
            if best_key is None or key < best_key:
                best, best_key = ci, key
        return best

    def solve() -> bool:
        nonlocal used
        ci = pick()
        if ci < 0:
            return True
        banned = {colors[cj] for cj in adj[ci] if colors[cj] >= 0}
        candidates = [c for c in range(used) if c not in banned]
        if used < label_budget:
            candidates.append(used)
        for c in candidates:
            colors[ci] = c
            bumped = c == used
            if bumped:
                used += 1
            if solve():
                return True
            if bumped:
                used -= 1
            colors[ci] = -1
        return False

    if not solve():
        return None
    cells = np.empty((m2, m1), dtype=int)
    for ci, comp in enumerate(comp_cells):
        for b, a in comp:
            cells[b, a] = colors[ci]
    return _canonical_relabel(cells)


def _canonical_relabel(cells: np.ndarray) -> np.ndarray:
    """Renumber labels by first occurrence in row-major order."""
    mapping: dict[int, int] = {}
    out = np.empty_like(cells)
    for b in range(cells.shape[0]):
        for a in range(cells.shape[1]):
            v = int(cells[b, a])
            if v not in mapping:
                mapping[v] = len(mapping)
            out[b, a] = mapping[v]
    return out


def construct_map_for_sfs(h: SingularFadeState, scheme: SchemePair) -> ClusterMap:
    """Smallest-label-budget exclusive-law map merging all of h's pairs."""
    constraint = singularity_constraints(h, scheme)
    if constraint.irremovable:
        raise ValueError("the origin SFS is irremovable")
    uf = _merge_state(scheme, [constraint])
    if uf is None:
        raise ValueError(f"constraints of {h.value} conflict with the exclusive law")
    for budget in range(max(scheme.m1, scheme.m2), scheme.m1 * scheme.m2 + 1):
        cells = _color_components(scheme, uf, budget)
        if cells is not None:
            return ClusterMap.from_cells(scheme, cells)
    raise ValueError(f"backtracking exhausted for SFS {h.value}")  # pragma: no cover


def construct_library(scheme: SchemePair) -> MapLibrary:
    """Greedy accumulation: walk the SFS in enumeration order, folding each
    one's constraints into the current map whenever the merge stays
    exclusive-law-feasible and completable within max(M1, M2) labels."""
    base_budget = max(scheme.m1, scheme.m2)
    remaining = [s for s in enumerate_sfs(scheme) if not s.is_origin]
    constraints = {id(s): singularity_constraints(s, scheme) for s in remaining}
    maps: list[ClusterMap] = []
    while remaining:
        accepted: list[SingularityConstraint] = []
        for s in remaining:
            trial = accepted + [constraints[id(s)]]
            uf = _merge_state(scheme, trial)
            if uf is not None and _color_components(scheme, uf, base_budget) is not None:
                accepted = trial
        if accepted:
            cells = _color_components(scheme, _merge_state(scheme, accepted), base_budget)
            new_map = ClusterMap.from_cells(scheme, cells)
        else:
            # first SFS alone needs more than the base budget
            new_map = construct_map_for_sfs(remaining[0], scheme)
        maps.append(new_map)
        still = [s for s in remaining if not removes_sfs(new_map, s)]
        if len(still) == len(remaining):  # pragma: no cover
            raise RuntimeError("library construction made no progress")
        remaining = still
    return _library_from_maps(scheme, maps)
