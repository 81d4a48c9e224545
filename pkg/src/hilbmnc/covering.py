"""Combinatorial solvers on finite pseudometric spaces.

All solvers take a symmetric distance matrix.  Three quantities are
computed for a point set and a count ``m``:

* ``r_m``: the m-center covering radius with centers restricted to the points,
* ``s_m``: the largest minimum pairwise distance over m-point subsets,
* ``D_m``: the smallest max-diameter over partitions into at most m parts.

``"exact"`` mode enumerates within the size caps below; ``"greedy"`` runs
farthest-point heuristics.  ``"branch"`` is an uncapped exact search (binary
search over the distinct distances plus a pruned DFS) for structured
instances too large to enumerate.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

MAX_EXACT_POINTS = 16
MAX_EXACT_CENTERS = 4
MAX_PARTITION_POINTS = 10

MODES = ("exact", "greedy", "branch")


class BudgetExceeded(ValueError):
    pass


def distance_matrix(points: Sequence, metric) -> np.ndarray:
    """Pairwise distances; ``metric`` is a callable or has ``distance_matrix``."""
    if hasattr(metric, "distance_matrix"):
        return np.asarray(metric.distance_matrix(points), dtype=float)
    n = len(points)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = float(metric(points[i], points[j]))
    return dist


def _check(dist: np.ndarray, m: int):
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise ValueError("distance matrix must be square")
    if dist.shape[0] == 0:
        raise ValueError("empty point list")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")


# -- covering radius ---------------------------------------------------------

def cover_radius(dist: np.ndarray, m: int, mode: str = "exact") -> float:
    dist = np.asarray(dist, dtype=float)
    _check(dist, m)
    n = dist.shape[0]
    if m >= n:
        return 0.0
    if mode == "exact":
        if n > MAX_EXACT_POINTS or m > MAX_EXACT_CENTERS:
            raise BudgetExceeded(f"exact covering needs <= {MAX_EXACT_POINTS} points and m <= "
                                 f"{MAX_EXACT_CENTERS}; got {n} points, m = {m}")
        combos = np.array(list(itertools.combinations(range(n), m)))
        return float(dist[combos].min(axis=1).max(axis=1).min())
    if mode == "greedy":
        return float(_radius_of(dist, greedy_centers(dist, m)))
    if mode == "branch":
        return _branch_cover(dist, m)
    raise ValueError(f"unknown mode {mode!r}")


def greedy_centers(dist: np.ndarray, m: int) -> list[int]:
    """Farthest-point traversal from point 0; ties go to the lowest index."""
    n = dist.shape[0]
    centers = [0]
    near = dist[0].copy()
    while len(centers) < min(m, n):
        nxt = int(np.argmax(near))
        centers.append(nxt)
        near = np.minimum(near, dist[nxt])
    return centers


def _radius_of(dist: np.ndarray, centers: Sequence[int]) -> float:
    return dist[list(centers)].min(axis=0).max()


def _branch_cover(dist: np.ndarray, m: int) -> float:
    radii = np.unique(dist)
    upper = _radius_of(dist, greedy_centers(dist, m))
    radii = radii[radii <= upper]
    lo, hi = 0, len(radii) - 1  # radii[hi] is feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if _coverable(dist, m, radii[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(radii[hi])


def _coverable(dist: np.ndarray, m: int, r: float) -> bool:
    n = dist.shape[0]
    balls = [sum(1 << int(p) for p in np.flatnonzero(dist[c] <= r)) for c in range(n)]
    full = (1 << n) - 1
    covering = [[c for c in range(n) if balls[c] >> p & 1] for p in range(n)]
    for lst in covering:
        lst.sort(key=lambda c: -bin(balls[c]).count("1"))
    biggest = max(bin(b).count("1") for b in balls)
    seen = set()

    def dfs(covered: int, left: int) -> bool:
        if covered == full:
            return True
        if left == 0:
            return False
        if bin(full & ~covered).count("1") > left * biggest or (covered, left) in seen:
            return False
        p = ((full & ~covered) & -(full & ~covered)).bit_length() - 1
        for c in covering[p]:
            if dfs(covered | balls[c], left - 1):
                return True
        seen.add((covered, left))
        return False

    return dfs(0, m)


# -- separation number -------------------------------------------------------

def separation(dist: np.ndarray, m: int, mode: str = "exact") -> float:
    dist = np.asarray(dist, dtype=float)
    _check(dist, m)
    n = dist.shape[0]
    if not 2 <= m <= n:
        raise ValueError(f"separation needs 2 <= m <= {n}, got m = {m}")
    if mode == "exact":
        if n > MAX_EXACT_POINTS or m > MAX_EXACT_CENTERS:
            raise BudgetExceeded(f"exact separation needs <= {MAX_EXACT_POINTS} points and m <= "
                                 f"{MAX_EXACT_CENTERS}; got {n} points, m = {m}")
        combos = np.array(list(itertools.combinations(range(n), m)))
        iu = np.triu_indices(m, 1)
        sub = dist[combos[:, :, None], combos[:, None, :]]
        return float(sub[:, iu[0], iu[1]].min(axis=1).max())
    if mode == "greedy":
        return _greedy_separation(dist, m)
    if mode == "branch":
        return _branch_separation(dist, m)
    raise ValueError(f"unknown mode {mode!r}")


def _greedy_separation(dist: np.ndarray, m: int) -> float:
    # start from a diametral pair, then keep adding the farthest point
    i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
    if i == j:  # all distances zero
        i, j = 0, 1
    chosen = [int(min(i, j)), int(max(i, j))]
    near = np.minimum(dist[chosen[0]], dist[chosen[1]])
    while len(chosen) < m:
        near[chosen] = -1.0
        nxt = int(np.argmax(near))
        chosen.append(nxt)
        near = np.minimum(near, dist[nxt])
    sub = dist[np.ix_(chosen, chosen)]
    return float(sub[np.triu_indices(m, 1)].min())


def _branch_separation(dist: np.ndarray, m: int) -> float:
    n = dist.shape[0]
    vals = np.unique(dist[np.triu_indices(n, 1)])
    lo, hi = 0, len(vals) - 1
    lower = _greedy_separation(dist, m)
    lo = int(np.searchsorted(vals, lower))  # vals[lo] is achievable
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _has_spread_subset(dist, m, vals[mid]):
            lo = mid
        else:
            hi = mid - 1
    return float(vals[lo])


def _has_spread_subset(dist: np.ndarray, m: int, t: float) -> bool:
    n = dist.shape[0]
    ok = dist >= t

    def dfs(start: int, chosen: list[int]) -> bool:
        if len(chosen) == m:
            return True
        for c in range(start, n - (m - len(chosen)) + 1):
            if all(ok[c, q] for q in chosen):
                chosen.append(c)
                if dfs(c + 1, chosen):
                    return True
                chosen.pop()
        return False

    return dfs(0, [])


# -- partition diameter ------------------------------------------------------

def partition_diameter(dist: np.ndarray, m: int, mode: str = "exact") -> float:
    dist = np.asarray(dist, dtype=float)
    _check(dist, m)
    n = dist.shape[0]
    if m >= n:
        return 0.0
    if mode == "greedy":
        return _greedy_partition(dist, m)
    if mode in ("exact", "branch"):
        if mode == "exact" and n > MAX_PARTITION_POINTS:
            raise BudgetExceeded(f"exact partition needs <= {MAX_PARTITION_POINTS} points, got {n}")
        return _branch_partition(dist, m)
    raise ValueError(f"unknown mode {mode!r}")


def _greedy_partition(dist: np.ndarray, m: int) -> float:
    centers = greedy_centers(dist, m)
    owner = np.argmin(dist[centers], axis=0)
    worst = 0.0
    for c in range(len(centers)):
        idx = np.flatnonzero(owner == c)
        if idx.size > 1:
            worst = max(worst, float(dist[np.ix_(idx, idx)].max()))
    return worst


def _branch_partition(dist: np.ndarray, m: int) -> float:
    """Restricted-growth DFS with bound pruning, seeded by the greedy value."""
    n = dist.shape[0]
    best = _greedy_partition(dist, m)
    parts: list[list[int]] = []

    def dfs(p: int, current: float):
        nonlocal best
        if p == n:
            best = current
            return
        for part in parts:
            grow = max(current, max(dist[p, q] for q in part))
            if grow < best:
                part.append(p)
                dfs(p + 1, grow)
                part.pop()
        if len(parts) < m and current < best:
            parts.append([p])
            dfs(p + 1, current)
            parts.pop()

    dfs(0, 0.0)
    return float(best)


def pairwise_min(dist: np.ndarray) -> float:
    n = dist.shape[0]
    if n < 2:
        return float("inf")
    return float(dist[np.triu_indices(n, 1)].min())


def exact_budget(n_points: int, m: int) -> bool:
    return n_points <= MAX_EXACT_POINTS and m <= MAX_EXACT_CENTERS

