"""Measures of noncompactness of sets in ``A^N``.

Two kinds of target set are supported:

``finite``
    an explicit list of vectors;
``image``
    ``radius * T(B_1)`` for a module map ``T`` given by per-block matrices;
    the ball of a submodule ``ran Q`` is the image of ``B_1`` under ``Q``.

Suprema over ``image`` sets are operator norms and are computed exactly.
Drawn points only feed the combinatorial solvers and the witness builder.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import covering
from .algebra import AlgebraShape
from .hmodule import (DirectSumContext, ModuleProjection, ModuleVector, apply_projection,
                      direct_sum_embed, direct_sum_part, distance_to_range, tail_norm, vec_norm)
from .seminorm import AdmissiblePair, WitnessCertificate, check_admissible, validate_certificate

BRACKET_SLACK = 1e-8


def _head_mask(N: int, d: int, lo: int, hi: int) -> np.ndarray:
    m = np.zeros(N * d)
    m[lo * d: hi * d] = 1.0
    return m


def _top_singular(mat: np.ndarray):
    u, s, vh = np.linalg.svd(mat)
    return float(s[0]), vh[0].conj()


class SampledSet:
    """A bounded target set with a deterministic sample of its points."""

    def __init__(self, kind: str, shape: AlgebraShape, N: int, points: Sequence[ModuleVector], *,
                 mats=None, radius: float = 1.0, seed=None, preimages=None, label: str = ""):
        if kind not in ("finite", "image"):
            raise ValueError(f"unknown set kind {kind!r}")
        self.kind = kind
        self.shape = shape
        self.N = N
        self.points = list(points)
        self.mats = None if mats is None else tuple(np.asarray(m, dtype=complex) for m in mats)
        self.radius = float(radius)
        self.seed = seed
        self.preimages = preimages
        self.label = label
        if kind == "finite":
            if not self.points:
                raise ValueError("finite set needs at least one point")
            self.norm_bound = max(vec_norm(x) for x in self.points)
        else:
            self.norm_bound = self.radius * max(np.linalg.norm(m, 2) for m in self.mats)

    def __repr__(self):
        return f"SampledSet({self.kind}, {self.label or '?'}, N={self.N}, {len(self.points)} points)"

    # exact suprema

    def sup_tail(self, n: int) -> float:
        """``sup_{x in E} ||(I - P_n) x||``."""
        if not 0 <= n <= self.N:
            raise ValueError(f"n = {n} outside 0..{self.N}")
        if self.kind == "finite":
            return max(tail_norm(x, n) for x in self.points)
        if n == self.N:
            return 0.0
        return self.radius * max(np.linalg.norm(m[n * d:], 2)
                                 for d, m in zip(self.shape.block_dims, self.mats))

    def sup_distance(self, Q: ModuleProjection) -> float:
        """``sup_{x in E} d(x, ran Q)``."""
        if self.kind == "finite":
            return max(distance_to_range(Q, x) for x in self.points)
        return self.radius * max(np.linalg.norm((np.eye(q.shape[0]) - q) @ m, 2)
                                 for q, m in zip(Q.matrices(), self.mats))

    # sampling

    def _image(self, w: ModuleVector) -> ModuleVector:
        return ModuleVector.from_stacked(self.shape, self.N,
                                         [self.radius * (m @ w.stacked(k)) for k, m in enumerate(self.mats)])

    def _unit_in_block(self, k: int, v: np.ndarray) -> ModuleVector:
        stacked = []
        for b, d in enumerate(self.shape.block_dims):
            s = np.zeros((self.N * d, d), complex)
            if b == k:
                s[:, 0] = v
            stacked.append(s)
        return ModuleVector.from_stacked(self.shape, self.N, stacked)

    def tail_maximizer(self, lo: int, hi: int | None = None) -> tuple[ModuleVector, ModuleVector]:
        """Point ``T w`` maximizing ``||(P_hi - P_lo) T w||`` over unit ``w``; returns ``(Tw, w)``."""
        hi = self.N if hi is None else hi
        best = None
        for k, (d, m) in enumerate(zip(self.shape.block_dims, self.mats)):
            s, v = _top_singular(_head_mask(self.N, d, lo, hi)[:, None] * m)
            if best is None or s > best[0]:
                best = (s, k, v)
        w = self._unit_in_block(best[1], best[2])
        return self._image(w), w

    def tail_candidates(self, i: int) -> list[ModuleVector]:
        if self.kind == "finite":
            return list(self.points)
        return [self.tail_maximizer(i, hi)[0] for hi in range(i + 1, self.N + 1)]

    def draw(self, count: int, rng) -> list[ModuleVector]:
        if self.kind == "finite":
            idx = rng.integers(0, len(self.points), size=count)
            return [self.points[i] for i in idx]
        return [self._image(_random_unit(self.shape, self.N, rng)) for _ in range(count)]

    def contains(self, x: ModuleVector, tol: float = 1e-10) -> bool:
        if self.kind == "finite":
            return any(x == p for p in self.points)
        for i, p in enumerate(self.points):
            if x == p and self.preimages is not None:
                w = self.preimages[i]
                return vec_norm(w) <= 1 + tol and self._image(w).allclose(x, atol=tol)
        return False


def _random_unit(shape, N, rng) -> ModuleVector:
    data = [rng.standard_normal((N, d, d)) + 1j * rng.standard_normal((N, d, d)) for d in shape.block_dims]
    x = ModuleVector(shape, N, data)
    return x * (rng.uniform(0.5, 1.0) / vec_norm(x))


def finite_set(points: Sequence[ModuleVector], label: str = "finite") -> SampledSet:
    p0 = points[0]
    return SampledSet("finite", p0.shape, p0.N, points, label=label)


def image_set(shape: AlgebraShape, N: int, mats, radius: float = 1.0, count: int = 32, seed=0,
              label: str = "image") -> SampledSet:
    """``radius * T(B_1)`` sampled with ``count`` random points plus tail maximizers."""
    E = SampledSet("image", shape, N, [], mats=mats, radius=radius, seed=seed, label=label)
    rng = np.random.default_rng(seed)
    pre = []
    for n in range(N):
        pre.append(E.tail_maximizer(n)[1])
    for _ in range(count):
        pre.append(_random_unit(shape, N, rng))
    E.points = [E._image(w) for w in pre]
    E.preimages = pre
    return E


def submodule_ball(Q: ModuleProjection, radius: float = 1.0, count: int = 32, seed=0) -> SampledSet:
    return image_set(Q.shape, Q.N, Q.matrices(), radius, count, seed, label="submodule-ball")


def unit_ball(shape: AlgebraShape, N: int, count: int = 32, seed=0) -> SampledSet:
    mats = [np.eye(N * d, dtype=complex) for d in shape.block_dims]
    return image_set(shape, N, mats, 1.0, count, seed, label="unit-ball")


def basis_set(shape: AlgebraShape, N: int) -> SampledSet:
    return finite_set([ModuleVector.basis(shape, N, k) for k in range(1, N + 1)], label="basis")


# -- lambda ------------------------------------------------------------------

def lambda_profile(E: SampledSet, n_max: int) -> np.ndarray:
    """``s_n = sup_{x in E} ||x - P_n x||`` for ``n = 0..n_max``."""
    if n_max > E.N:
        raise ValueError(f"n_max = {n_max} exceeds truncation N = {E.N}")
    prof = np.array([E.sup_tail(n) for n in range(n_max + 1)])
    # suprema of nested tails are nonincreasing; remove solver jitter
    return np.minimum.accumulate(prof)


def lambda_via_projection_family(E: SampledSet, family: Sequence[ModuleProjection]) -> float:
    if not family:
        raise ValueError("empty projection family")
    for Q in family:
        if Q.shape != E.shape or Q.N != E.N:
            raise ValueError("projection does not act on the set's module")
        sa, idem = Q.defects()
        if sa > 1e-9 or idem > 1e-9:
            raise ValueError(f"invalid projection in family: defects {sa:.2e}, {idem:.2e}")
    return min(E.sup_distance(Q) for Q in family)


def head_family(shape: AlgebraShape, N: int, n_max: int) -> list[ModuleProjection]:
    return [ModuleProjection(shape, N, head=n) for n in range(n_max + 1)]


def projection_onto_image(Q: ModuleProjection, L: ModuleProjection) -> ModuleProjection:
    """Projection onto ``Q(ran L)``."""
    return ModuleProjection.onto_columns(Q.shape, Q.N, [q @ l for q, l in zip(Q.matrices(), L.matrices())])


@dataclass
class ComplementedCheck:
    lambda_sub: float
    lambda_ambient: float
    worst_pointwise: float    # max over L, x of d(x, Q(L)) - d(x, L); must be <= 0
    ok: bool


def complemented_lambda_check(E: SampledSet, Q: ModuleProjection, family: Sequence[ModuleProjection],
                              tol: float = 1e-8) -> ComplementedCheck:
    """Compare lambda of ``E`` inside ``ran Q`` with lambda in the ambient module.

    The submodule sees the transported family ``{Q(ran L)}``; the ambient module
    sees ``family`` together with the transported projections.
    """
    moved = [projection_onto_image(Q, L) for L in family]
    lam_sub = lambda_via_projection_family(E, moved)
    lam_amb = lambda_via_projection_family(E, list(family) + moved)
    worst = -np.inf
    for L, QL in zip(family, moved):
        worst = max(worst, E.sup_distance(QL) - E.sup_distance(L))
        for x in E.points[:8]:
            worst = max(worst, distance_to_range(QL, x) - distance_to_range(L, x))
    ok = abs(lam_sub - lam_amb) <= tol and worst <= tol
    return ComplementedCheck(lam_sub, lam_amb, float(worst), ok)


# -- finite-instance surrogates ----------------------------------------------

def _auto(n: int, m: int, mode: str | None, partition: bool = False) -> str:
    if mode is not None:
        return mode
    if partition:
        return "exact" if n <= covering.MAX_PARTITION_POINTS else "greedy"
    return "exact" if covering.exact_budget(n, m) else "greedy"


def covering_radius(points: Sequence, m: int, metric, mode: str = "exact") -> float:
    """Best radius of ``m`` balls centred at points of the list."""
    return covering.cover_radius(covering.distance_matrix(points, metric), m, mode)


def separation_number(points: Sequence, m: int, metric, mode: str | None = None) -> float:
    """Largest ``eps`` such that some ``m`` points are pairwise ``eps``-apart."""
    return covering.separation(covering.distance_matrix(points, metric), m, _auto(len(points), m, mode))


def partition_diameter(points: Sequence, m: int, metric, mode: str | None = None) -> float:
    """Smallest max-diameter over partitions into at most ``m`` parts."""
    return covering.partition_diameter(covering.distance_matrix(points, metric), m,
                                       _auto(len(points), m, mode, partition=True))


# -- reports -----------------------------------------------------------------

@dataclass
class MncReport:
    label: str
    lambda_profile: list[float]
    lambda_value: float
    chi_lower: float
    chi_upper: float
    cover_surrogate: dict[int, float] = field(default_factory=dict)
    alpha_surrogate: dict[int, float] = field(default_factory=dict)
    separation_surrogate: dict[int, float] = field(default_factory=dict)
    lower_source: str = ""
    certificate_floor: dict[int, float] | None = None
    certificate_valid: bool | None = None

    def __post_init__(self):
        if self.chi_lower > self.chi_upper + BRACKET_SLACK:
            raise AssertionError(f"bracket violated: lower {self.chi_lower!r} > upper {self.chi_upper!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("cover_surrogate", "alpha_surrogate", "separation_surrogate", "certificate_floor"):
            if d[key] is not None:
                d[key] = {str(k): v for k, v in d[key].items()}
        return d

    def csv_rows(self) -> list[tuple[int, str, float]]:
        rows = [(n, "lambda_profile", v) for n, v in enumerate(self.lambda_profile)]
        for name in ("cover_surrogate", "alpha_surrogate", "separation_surrogate"):
            rows += [(m, name, v) for m, v in getattr(self, name).items()]
        if self.certificate_floor:
            rows += [(m, "certificate_floor", v) for m, v in self.certificate_floor.items()]
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n_or_m", "quantity", "value"])
        for row in self.csv_rows():
            w.writerow([row[0], row[1], repr(float(row[2]))])
        return buf.getvalue()


def mnc_bracket(E: SampledSet, pairs: Sequence[AdmissiblePair], n_max: int, m_range: Sequence[int],
                certificate: WitnessCertificate | None = None, cert_m_max: int = 8) -> MncReport:
    """Bracket the Hausdorff-type measure of ``E`` between a lower and an upper value.

    The upper end is the lambda value over the window ``0..n_max``.  Lower
    values come from separated tails ``(I - P_{n_max}) x`` of sampled points
    under each pair (half the ``(m+1)``-separation) and, if given, from a
    validated witness certificate.
    """
    if not pairs:
        raise ValueError("need at least one admissible pair")
    prof = lambda_profile(E, n_max)
    lam = float(prof[-1])
    tails = [x - apply_projection(ModuleProjection(E.shape, E.N, head=n_max), x) for x in E.points]
    lower, source = 0.0, "none"
    cover, alpha, sep = {}, {}, {}
    for idx, pair in enumerate(pairs):
        dist = pair.distance_matrix(tails)
        n = len(tails)
        for m in m_range:
            r = covering.cover_radius(dist, m, _auto(n, m, None))
            D = covering.partition_diameter(dist, m, _auto(n, m, None, partition=True))
            cover[m] = max(cover.get(m, 0.0), r)
            alpha[m] = max(alpha.get(m, 0.0), D)
            if m + 1 <= n:
                s = covering.separation(dist, m + 1, _auto(n, m + 1, None))
                sep[m + 1] = max(sep.get(m + 1, 0.0), s)
                if s / 2 > lower:
                    lower, source = s / 2, f"pair {idx}, separation m={m + 1}"
    floor, valid = None, None
    if certificate is not None:
        check = validate_certificate(certificate, m_max=cert_m_max)
        floor, valid = check.cover_floor, check.valid
        if check.valid and certificate.guaranteed_bound > lower:
            lower, source = certificate.guaranteed_bound, "witness certificate"
    return MncReport(E.label, [float(v) for v in prof], lam, float(lower), lam, cover, alpha, sep,
                     source, floor, valid)


# -- direct sums -------------------------------------------------------------

@dataclass
class DirectSumCheck:
    radii: list[dict]
    identity_defect: float
    admissible: bool
    ok: bool
    failures: list[str]


def transport_pair(ctx: DirectSumContext, pair: AdmissiblePair, side: int, direction: str) -> AdmissiblePair:
    """``X -> {p_j x_i}`` (direction ``"part"``) or ``X -> {J_j x_i}`` (``"embed"``)."""
    if direction == "part":
        return AdmissiblePair([direct_sum_part(ctx, side, x) for x in pair.X], pair.Phi)
    if direction == "embed":
        return AdmissiblePair([direct_sum_embed(ctx, side, x) for x in pair.X], pair.Phi)
    raise ValueError(f"unknown direction {direction!r}")


def direct_sum_chi_check(ctx: DirectSumContext, E: Sequence[ModuleVector],
                         sum_pairs: Sequence[AdmissiblePair], summand_pairs: Sequence[AdmissiblePair],
                         m_range: Sequence[int], tol: float = 1e-8) -> DirectSumCheck:
    """Finite-instance forms of ``max chi_j(p_j E) <= chi(E) <= chi_1(p_1 E) + chi_2(p_2 E)``.

    Upper side: for a pair on the sum and its parts ``X^(j) = p_j X``, the
    product centres ``J_1 z + J_2 w`` built from optimal centres of ``p_1 E``
    and ``p_2 E`` cover ``E`` within ``r_1 + r_2``.  Lower side: for a pair
    ``X`` on summand 1, ``r_m(p_1 E; X) <= r_m(E; J_1 X)``.
    """
    E = list(E)
    for x in E:
        if x.N != ctx.N or x.shape != ctx.shape:
            raise ValueError("set does not live in the direct sum")
    parts = {j: [direct_sum_part(ctx, j, x) for x in E] for j in (1, 2)}
    failures, rows, defect = [], [], 0.0
    admissible = True
    probe = E[:4]
    for pi, pair in enumerate(sum_pairs):
        sub = {j: transport_pair(ctx, pair, j, "part") for j in (1, 2)}
        for j in (1, 2):
            ok, _ = check_admissible(sub[j].X, parts[j][:4])
            admissible &= ok
            for y in parts[j][:4]:
                lhs = pair(direct_sum_embed(ctx, j, y))
                defect = max(defect, abs(lhs - sub[j](y)))
        d1, d2 = sub[1].distance_matrix(parts[1]), sub[2].distance_matrix(parts[2])
        for m1 in m_range:
            for m2 in m_range:
                c1 = _optimal_centers(d1, m1)
                c2 = _optimal_centers(d2, m2)
                r1 = covering._radius_of(d1, c1)
                r2 = covering._radius_of(d2, c2)
                centers = [direct_sum_embed(ctx, 1, parts[1][a]) + direct_sum_embed(ctx, 2, parts[2][b])
                           for a in c1 for b in c2]
                dc = pair.distance_matrix(centers + E)[len(centers):, :len(centers)]
                rE = float(dc.min(axis=1).max())
                rows.append({"pair": pi, "side": "upper", "m1": m1, "m2": m2, "r_sum": rE,
                             "r1": float(r1), "r2": float(r2)})
                if rE > r1 + r2 + tol:
                    failures.append(f"pair {pi}, m=({m1},{m2}): {rE:.6g} > {r1:.6g} + {r2:.6g}")
    for pi, pair in enumerate(summand_pairs):
        if pair.N != ctx.N1:
            raise ValueError("summand pairs must live on the first summand")
        big = transport_pair(ctx, pair, 1, "embed")
        ok, _ = check_admissible(big.X, probe)
        admissible &= ok
        for y in E[:4]:
            defect = max(defect, abs(pair(direct_sum_part(ctx, 1, y)) - big(y)))
        dE = big.distance_matrix(E)
        d1 = pair.distance_matrix(parts[1])
        for m in m_range:
            rE = covering.cover_radius(dE, m, _auto(len(E), m, None))
            r1 = covering.cover_radius(d1, m, _auto(len(E), m, None))
            rows.append({"pair": pi, "side": "lower", "m": m, "r_sum": rE, "r1": r1})
            if r1 > rE + tol:
                failures.append(f"summand pair {pi}, m={m}: r(p1 E) = {r1:.6g} > r(E) = {rE:.6g}")
    if defect > 1e-10:
        failures.append(f"transported seminorm identity off by {defect:.3e}")
    if not admissible:
        failures.append("a transported system failed admissibility")
    return DirectSumCheck(rows, defect, admissible, not failures, failures)


def _optimal_centers(dist: np.ndarray, m: int) -> list[int]:
    """Centres attaining the exact radius (greedy centres past the exact budget)."""
    n = dist.shape[0]
    if m >= n:
        return list(range(n))
    if not covering.exact_budget(n, m):
        return covering.greedy_centers(dist, m)
    best, arg = np.inf, None
    for combo in itertools.combinations(range(n), m):
        r = dist[list(combo)].min(axis=0).max()
        if r < best:
            best, arg = r, list(combo)
    return arg
