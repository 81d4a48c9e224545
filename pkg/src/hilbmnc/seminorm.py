"""Admissible systems and the seminorms they induce.

For a finite system ``X = (x_1..x_M)`` and states ``Phi = (phi_1..phi_M)``

    p(x)^2 = max_k sum_{i >= k} |phi_k(<x, x_i>)|^2

with the state index coupled to the start of the tail sum.  The coefficient
``phi_k(<x, x_i>)`` is conjugate-linear in ``x``, so a pair is compiled once
into a dense map from (conjugated) coordinates to the ``M x M`` coefficient
table and evaluated on many points at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (AlgebraElement, ShapeMismatch, State, is_unitary, min_eigenvalue,
                      norming_state)
from .covering import cover_radius, distance_matrix, pairwise_min
from .hmodule import (ModuleVector, block_part, inner, right_mul, tail_norm, vec_norm)

NORM_TOL = 1e-10


class SamplerExhausted(RuntimeError):
    """The target set cannot reach the required tail norm."""

    def __init__(self, message: str, best: float):
        super().__init__(message)
        self.best = best


class WindowTooSmall(RuntimeError):
    def __init__(self, message: str, minimal_N: int):
        super().__init__(message)
        self.minimal_N = minimal_N


class AdmissiblePair:
    """Finite admissible system with a matching list of states."""

    def __init__(self, X: Sequence[ModuleVector], Phi: Sequence[State], tol: float = NORM_TOL):
        X, Phi = tuple(X), tuple(Phi)
        if not X:
            raise ValueError("admissible pair needs at least one vector")
        if len(X) != len(Phi):
            raise ValueError(f"{len(X)} vectors but {len(Phi)} states")
        shape, N = X[0].shape, X[0].N
        for x in X:
            if x.shape != shape or x.N != N:
                raise ShapeMismatch("system vectors differ in shape or truncation")
        for phi in Phi:
            if phi.shape != shape:
                raise ShapeMismatch("state shape differs from module shape")
        for i, x in enumerate(X, 1):
            nx = vec_norm(x)
            if nx > 1 + tol:
                raise ValueError(f"system vector {i} has norm {nx:.12g} > 1")
        self.X = X
        self.Phi = Phi
        self.shape = shape
        self.N = N
        self._coef = None

    def __len__(self):
        return len(self.X)

    @property
    def coefficient_map(self) -> np.ndarray:
        """Array ``L[k, i, :]`` with ``phi_k(<x, x_i>) = L[k, i] . conj(flat(x))``."""
        if self._coef is None:
            parts = []
            for b in range(self.shape.n_blocks):
                T = np.stack([x.stacked(b) for x in self.X])            # (M, Nd, d)
                rho = np.stack([phi.densities[b] for phi in self.Phi])  # (M, d, d)
                W = np.einsum("kca,ipc->kipa", rho, T)
                parts.append(W.reshape(len(self), len(self), -1))
            self._coef = np.concatenate(parts, axis=2)
        return self._coef

    def coefficients(self, points: Sequence[ModuleVector]) -> np.ndarray:
        """``C[p, k, i] = phi_k(<points[p], x_i>)``."""
        flat = np.stack([_flatten(self, x) for x in points])
        return np.einsum("kid,pd->pki", self.coefficient_map, flat.conj())

    def evaluate(self, points: Sequence[ModuleVector]) -> np.ndarray:
        return _seminorm_from_coefficients(self.coefficients(points))

    def __call__(self, x: ModuleVector) -> float:
        return seminorm_eval(self, x)

    def distance_matrix(self, points: Sequence[ModuleVector]) -> np.ndarray:
        C = self.coefficients(points)
        n = len(points)
        dist = np.zeros((n, n))
        for p in range(n):
            if p + 1 < n:
                dist[p, p + 1:] = _seminorm_from_coefficients(C[p] - C[p + 1:])
        return dist + dist.T

    def __repr__(self):
        return f"AdmissiblePair(M={len(self)}, dims={self.shape.block_dims}, N={self.N})"


def _flatten(pair: AdmissiblePair, x: ModuleVector) -> np.ndarray:
    if x.shape != pair.shape or x.N != pair.N:
        raise ShapeMismatch("vector does not live in the pair's module")
    return np.concatenate([x.stacked(b).ravel() for b in range(x.shape.n_blocks)])


def _seminorm_from_coefficients(C: np.ndarray) -> np.ndarray:
    sq = np.abs(C) ** 2
    M = sq.shape[-1]
    tails = np.triu(np.ones((M, M)))  # keep i >= k
    return np.sqrt((sq * tails).sum(axis=-1).max(axis=-1))


def seminorm_eval(pair: AdmissiblePair, x: ModuleVector) -> float:
    return float(pair.evaluate([x])[0])


def pseudometric(pair: AdmissiblePair, x: ModuleVector, y: ModuleVector) -> float:
    return seminorm_eval(pair, x - y)


def check_admissible(X: Sequence[ModuleVector], samples: Sequence[ModuleVector],
                     tol: float = 1e-9) -> tuple[bool, float]:
    """Bessel-type condition on a finite sample domain.

    Returns ``(admissible, worst)`` where ``worst`` is the most negative
    eigenvalue of ``<x,x> - sum_i <x,x_i><x_i,x>`` over the samples.
    """
    for i, x in enumerate(X, 1):
        nx = vec_norm(x)
        if nx > 1 + tol:
            raise ValueError(f"system vector {i} has norm {nx:.12g} > 1")
    worst = np.inf
    for s in samples:
        residual = inner(s, s)
        for x in X:
            g = inner(s, x)
            residual = residual - g * g.H
        worst = min(worst, min_eigenvalue(residual))
    return bool(worst >= -tol), float(worst)


def basis_pair(shape, N: int, states: Sequence[State] | None = None) -> AdmissiblePair:
    """``X = (e_1..e_N)`` with the given states (default: normalized trace)."""
    X = [ModuleVector.basis(shape, N, k) for k in range(1, N + 1)]
    if states is None:
        states = [State.tracial(shape)] * N
    return AdmissiblePair(X, states)


def build_blocked_system(Y: Sequence[ModuleVector], breaks: Sequence[int],
                         tol: float = 1e-12) -> list[ModuleVector]:
    """Normalized block parts ``P_{n_i}(I - P_{n_{i-1}}) y_i``.

    ``breaks = (n_0, n_1, ..., n_M)`` must be strictly increasing with
    ``n_M <= N``; ``y_i`` contributes the coordinates ``n_{i-1}+1 .. n_i``.
    """
    breaks = [int(b) for b in breaks]
    if len(breaks) != len(Y) + 1:
        raise ValueError(f"need {len(Y) + 1} breaks for {len(Y)} vectors, got {len(breaks)}")
    if any(b >= c for b, c in zip(breaks, breaks[1:])) or breaks[0] < 0:
        raise ValueError(f"breaks must be strictly increasing and nonnegative: {breaks}")
    out = []
    for i, y in enumerate(Y, 1):
        if breaks[-1] > y.N:
            raise ValueError(f"break {breaks[-1]} exceeds truncation {y.N}")
        part = block_part(y, breaks[i - 1], breaks[i])
        nrm = vec_norm(part)
        if nrm <= tol:
            raise ValueError(f"block {i} (coordinates {breaks[i - 1] + 1}..{breaks[i]}) has norm "
                             f"{nrm:.3e} <= {tol:.1e}")
        out.append(part / nrm)
    return out


def transform_unitary(pair: AdmissiblePair, u: AlgebraElement, tol: float = 1e-10) -> AdmissiblePair:
    """Pair with ``x_i u*`` and ``phi(u* . u)``; ``p(x u)`` becomes ``p^u(x)``."""
    if not is_unitary(u, tol):
        raise ValueError("transform_unitary needs a unitary element")
    ustar = u.H
    X = [right_mul(x, ustar) for x in pair.X]
    Phi = [State(phi.shape, [q @ r @ q.conj().T for q, r in zip(u.blocks, phi.densities)])
           for phi in pair.Phi]
    return AdmissiblePair(X, Phi)


# -- witness systems ---------------------------------------------------------

@dataclass
class WitnessCertificate:
    pair: AdmissiblePair
    witnesses: list[ModuleVector]
    lambda_value: float
    epsilon: float
    block_breaks: list[int]
    guaranteed_bound: float
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.block_breaks, self.block_breaks[1:])):
            raise ValueError("block breaks must be strictly increasing")
        if self.guaranteed_bound < 0:
            raise ValueError("guaranteed bound must be nonnegative")
        if len(self.block_breaks) != len(self.witnesses) + 1:
            raise ValueError("need one more break than witnesses")


@dataclass
class CertificateCheck:
    head_values: list[float]      # |phi_j <z_j, x_j>|, each must exceed lambda - eps/2
    worst_leak: float             # max |phi_j <z_l, x_j>| over l with small tail past i_j
    admissible_residual: float
    pairwise_min: float
    cover_floor: dict[int, float]
    valid: bool
    failures: list[str]


def _block_end(z: ModuleVector, start: int, leak: float) -> int:
    for end in range(start + 1, z.N + 1):
        if tail_norm(z, end) < leak:
            return end
    return z.N


def build_witness_system(sampler, lambda_profile: Sequence[float], epsilon: float, seed=0,
                         count: int | None = None, draws: int = 16) -> WitnessCertificate:
    """Run the separated-witness construction against a target set.

    ``sampler`` must expose ``N``, ``shape``, ``tail_candidates(i)`` (points of
    the set that nearly maximize ``||(I - P_i) z||``) and ``draw(count, rng)``.
    ``lambda_profile`` is the profile over the scenario window; its minimum is
    the lambda value.  Steps: pick ``z_i`` with ``||(I-P_i) z_i|| > lambda - eps/4``,
    cut the next break where the remaining tail of ``z_i`` drops below
    ``eps/4``, normalize the block part into ``x_j`` and take a norming state
    of ``<x_j, block part>``.
    """
    lam = float(min(lambda_profile))
    if not 0 < epsilon < lam:
        raise ValueError(f"need 0 < epsilon < lambda; got epsilon = {epsilon}, lambda = {lam}")
    rng = np.random.default_rng(seed)
    extra = list(sampler.draw(draws, rng)) if draws else []
    reach, leak = lam - epsilon / 4, epsilon / 4
    N = sampler.N

    starts, chosen, prov = [], [], []
    i, best_seen = 0, 0.0
    while i < N and (count is None or len(chosen) < count):
        picked = None
        for src, z in [("maximizer", z) for z in sampler.tail_candidates(i)] + [("draw", z) for z in extra]:
            t = tail_norm(z, i)
            best_seen = max(best_seen, t)
            if t > reach:
                end = _block_end(z, i, leak)
                if picked is None or end < picked[0]:
                    picked = (end, z, src)
        if picked is None:
            if not chosen:
                raise SamplerExhausted(
                    f"no element reaches tail {reach:.6g} at index {i}; best {best_seen:.6g}", best_seen)
            break
        end, z, src = picked
        starts.append(i)
        chosen.append(z)
        prov.append(f"{src}@{i}")
        i = end
    breaks = starts + [i]
    if count is not None and len(chosen) < count:
        widest = max(b - a for a, b in zip(breaks, breaks[1:]))
        raise WindowTooSmall(
            f"only {len(chosen)} of {count} witnesses fit in N = {N}",
            minimal_N=breaks[-1] + (count - len(chosen)) * widest)

    parts = [block_part(z, a, b) for z, a, b in zip(chosen, breaks, breaks[1:])]
    X = build_blocked_system(chosen, breaks)
    Phi = [norming_state(inner(x, p)) for x, p in zip(X, parts)]
    return WitnessCertificate(AdmissiblePair(X, Phi), chosen, lam, float(epsilon), breaks,
                              lam - epsilon, prov)


def validate_certificate(cert: WitnessCertificate, m_max: int = 8, samples: Sequence[ModuleVector] = (),
                         slack: float = 1e-8) -> CertificateCheck:
    """Re-check the displayed estimates and the covering-radius floor."""
    pair, Z, lam, eps = cert.pair, cert.witnesses, cert.lambda_value, cert.epsilon
    failures = []
    heads, worst_leak = [], 0.0
    starts = cert.block_breaks[:-1]
    for j, (x, phi) in enumerate(zip(pair.X, pair.Phi)):
        h = abs(phi(inner(Z[j], x)))
        heads.append(h)
        if not h > lam - eps / 2:
            failures.append(f"witness {j}: |phi<z,x>| = {h:.6g} <= lambda - eps/2")
        for l, zl in enumerate(Z):
            if l != j and tail_norm(zl, starts[j]) < eps / 4:
                g = abs(phi(inner(zl, x)))
                worst_leak = max(worst_leak, g)
                if not g < eps / 2:
                    failures.append(f"witness {l} leaks {g:.6g} >= eps/2 into block {j}")
    ok, residual = check_admissible(pair.X, list(samples) + list(Z))
    if not ok:
        failures.append(f"system not admissible on samples: residual {residual:.3e}")
    dist = distance_matrix(Z, pair)
    pmin = pairwise_min(dist)
    floor = {}
    for m in range(1, min(m_max, len(Z) - 1) + 1):
        floor[m] = cover_radius(dist, m, mode="branch")
        if floor[m] < cert.guaranteed_bound - slack:
            failures.append(f"{m}-center radius {floor[m]:.6g} below bound {cert.guaranteed_bound:.6g}")
    return CertificateCheck(heads, worst_leak, residual, pmin, floor, not failures, failures)
