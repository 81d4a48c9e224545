"""Brute-force reference implementations.

Everything here is deliberately naive: plain loops, no shared code with the
optimized solvers beyond the metric callable.  Used by the test-suite and
by ``--audit-oracle`` runs of the command line tool.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .hmodule import inner


@dataclass(frozen=True)
class OracleBudget:
    max_points: int = 16
    max_centers: int = 4
    max_partition_points: int = 10
    power_iterations: int = 10000
    tolerance: float = 1e-10

    def __post_init__(self):
        for name in ("max_points", "max_centers", "max_partition_points", "power_iterations"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


DEFAULT_BUDGET = OracleBudget()


class OracleBudgetExceeded(ValueError):
    pass


class PowerIterationStalled(RuntimeError):
    pass


def exact_cover_radius(points, m, metric, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    n = len(points)
    if n == 0:
        raise ValueError("empty point list")
    if n > budget.max_points or m > budget.max_centers:
        raise OracleBudgetExceeded(f"{n} points / {m} centers exceeds the oracle budget")
    if m >= n:
        return 0.0
    best = math.inf
    for centers in itertools.combinations(range(n), m):
        worst = 0.0
        for p in range(n):
            near = math.inf
            for c in centers:
                d = 0.0 if c == p else metric(points[min(c, p)], points[max(c, p)])
                near = min(near, d)
            worst = max(worst, near)
        best = min(best, worst)
    return best


def exact_separation(points, m, metric, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    n = len(points)
    if n > budget.max_points or m > budget.max_centers:
        raise OracleBudgetExceeded(f"{n} points / {m} subset size exceeds the oracle budget")
    if not 2 <= m <= n:
        raise ValueError("separation needs 2 <= m <= number of points")
    best = -math.inf
    for subset in itertools.combinations(range(n), m):
        spread = min(metric(points[a], points[b]) for a, b in itertools.combinations(subset, 2))
        best = max(best, spread)
    return best


def set_partitions(n: int, max_parts: int):
    """All partitions of ``range(n)`` into at most ``max_parts`` blocks."""
    if n == 0:
        yield []
        return
    for part in set_partitions(n - 1, max_parts):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [n - 1]] + part[i + 1:]
        if len(part) < max_parts:
            yield part + [[n - 1]]


def exact_partition_diameter(points, m, metric, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    n = len(points)
    if n > budget.max_partition_points:
        raise OracleBudgetExceeded(f"{n} points exceeds the partition budget")
    d = {(a, b): metric(points[a], points[b]) for a, b in itertools.combinations(range(n), 2)}
    best = math.inf
    for part in set_partitions(n, m):
        diam = 0.0
        for block in part:
            for a, b in itertools.combinations(sorted(block), 2):
                diam = max(diam, d[a, b])
        best = min(best, diam)
    return best


def spectral_norm_reference(matrix, budget: OracleBudget = DEFAULT_BUDGET, seed=0, restarts: int = 2) -> float:
    """Largest singular value by power iteration on ``A^* A``.

    Several random starts are run; the best Rayleigh quotient wins.  Raises
    ``PowerIterationStalled`` if no start converges within the budget.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return 0.0
    gram = a.conj().T @ a
    rng = np.random.default_rng(seed)
    best, converged = 0.0, False
    for _ in range(restarts):
        v = rng.standard_normal(gram.shape[0]) + 1j * rng.standard_normal(gram.shape[0])
        v /= np.linalg.norm(v)
        est = 0.0
        for _ in range(budget.power_iterations):
            w = gram @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                est, converged = 0.0, True
                break
            v = w / nw
            new = float(np.real(np.vdot(v, gram @ v)))
            if abs(new - est) <= budget.tolerance * max(new, 1e-300) * 1e-3:
                est, converged = new, True
                break
            est = new
        best = max(best, est)
    if not converged:
        raise PowerIterationStalled("power iteration did not converge within the budget")
    return math.sqrt(max(best, 0.0))


def seminorm_reference(pair, x) -> float:
    """Naive double loop over the coupled state/tail indices."""
    M = len(pair.X)
    if M > 64:
        raise OracleBudgetExceeded("reference seminorm is limited to 64 system vectors")
    coeffs = [inner(x, xi) for xi in pair.X]
    best = 0.0
    for k in range(M):
        phi = pair.Phi[k]
        terms = [abs(phi(coeffs[i])) ** 2 for i in range(k, M)]
        best = max(best, math.fsum(sorted(terms)))
    return math.sqrt(best)
