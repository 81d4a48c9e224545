"""Named invariant checks run by ``verify``.

Every check yields margins; a margin is ``allowed - observed`` so the check
passes iff its smallest margin is nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import covering, oracle
from ..algebra import (AlgebraShape, alg_norm, min_eigenvalue, norming_state, random_element,
                       random_normal, random_state, random_unitary)
from ..hmodule import (DirectSumContext, ModuleProjection, apply_projection, inner, random_projection,
                       random_vector, right_mul, tail_norm, vec_norm)
from ..opmnc import (adjoint_defect, lambda_op_profile, op_norm, operator_property_suite,
                     random_operator, random_theta_combination)
from ..seminorm import AdmissiblePair, basis_pair, build_blocked_system, check_admissible, transform_unitary
from ..setmnc import (complemented_lambda_check, direct_sum_chi_check, finite_set, head_family, lambda_profile,
                      mnc_bracket, submodule_ball, unit_ball)


@dataclass
class InvariantResult:
    name: str
    passed: bool
    worst_margin: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "worst_margin": self.worst_margin,
                "detail": self.detail}


def _result(name, margins, detail="") -> InvariantResult:
    margins = [float(m) for m in margins]
    worst = min(margins) if margins else 0.0
    return InvariantResult(name, bool(worst >= 0.0), worst, detail)


def random_blocked_pair(shape: AlgebraShape, N: int, rng) -> AdmissiblePair:
    M = int(rng.integers(1, N + 1))
    cuts = sorted(rng.choice(np.arange(1, N), size=M - 1, replace=False).tolist()) if M > 1 else []
    breaks = [0] + cuts + [N]
    Y = [random_vector(shape, N, rng) for _ in range(M)]
    X = build_blocked_system(Y, breaks)
    return AdmissiblePair(X, [random_state(shape, rng) for _ in range(M)])


def random_pair(shape: AlgebraShape, N: int, rng) -> AdmissiblePair:
    if rng.random() < 0.3:
        return basis_pair(shape, N, [random_state(shape, rng) for _ in range(N)])
    return random_blocked_pair(shape, N, rng)


# -- algebra -----------------------------------------------------------------

def algebra_checks(shape: AlgebraShape, N: int, trials: int, rng) -> list[InvariantResult]:
    cstar, states, norming, submult = [], [], [], []
    for _ in range(trials):
        a, b = random_element(shape, rng), random_element(shape, rng)
        na = alg_norm(a)
        cstar.append(1e-9 * (1 + na * na) - abs(alg_norm(a.H * a) - na * na))
        submult.append(na * alg_norm(b) + 1e-9 - alg_norm(a * b))
        phi = random_state(shape, rng)
        states.append(phi(a.H * a).real + 1e-12)
        states.append(1e-12 - abs(phi(shape.unit()) - 1))
        c = random_normal(shape, rng)
        norming.append(abs(norming_state(c)(c)) - alg_norm(c) + 1e-9)
    return [_result("algebra.c_star_identity", cstar), _result("algebra.submultiplicative", submult),
            _result("algebra.state_positive_unital", states), _result("algebra.norming_state", norming)]


# -- hmodule -----------------------------------------------------------------

def hmodule_checks(shape: AlgebraShape, N: int, trials: int, rng) -> list[InvariantResult]:
    cs, pos, mono, contr, rmul = [], [], [], [], []
    for _ in range(trials):
        x, y = random_vector(shape, N, rng), random_vector(shape, N, rng)
        cs.append(vec_norm(x) * vec_norm(y) + 1e-10 - alg_norm(inner(x, y)))
        pos.append(min_eigenvalue(inner(x, x)) + 1e-12)
        tails = [tail_norm(x, n) for n in range(N + 1)]
        mono.extend(t0 - t1 + 1e-12 for t0, t1 in zip(tails, tails[1:]))
        Q = random_projection(shape, N, rng)
        contr.append(vec_norm(x) + 1e-10 - vec_norm(apply_projection(Q, x)))
        a = random_element(shape, rng)
        lhs, rhs = inner(x, right_mul(y, a)), inner(x, y) * a
        rmul.append(1e-10 - alg_norm(lhs - rhs))
    return [_result("hmodule.cauchy_schwarz", cs), _result("hmodule.inner_positive", pos),
            _result("hmodule.tail_monotone", mono), _result("hmodule.projection_contraction", contr),
            _result("hmodule.right_linearity", rmul)]


def projection_checks(named: dict[str, ModuleProjection], tol: float) -> list[InvariantResult]:
    out = []
    for name, Q in named.items():
        sa, idem = Q.defects()
        out.append(_result(f"projection.{name}.self_adjoint", [tol - sa], f"||Q* - Q|| = {sa:.3e}"))
        out.append(_result(f"projection.{name}.idempotent", [tol - idem], f"||Q^2 - Q|| = {idem:.3e}"))
    return out


# -- seminorm ----------------------------------------------------------------

def seminorm_checks(shape: AlgebraShape, N: int, trials: int, samples: int, rng) -> list[InvariantResult]:
    dom, adm, uni = [], [], []
    for _ in range(trials):
        pair = random_pair(shape, N, rng)
        x = random_vector(shape, N, rng)
        dom.append(vec_norm(x) + 1e-10 - pair(x))
        blocked = random_blocked_pair(shape, N, rng)
        _, worst = check_admissible(blocked.X, [random_vector(shape, N, rng) for _ in range(samples)])
        adm.append(worst + 1e-9)
        u = random_unitary(shape, rng)
        uni.append(1e-10 - abs(pair(right_mul(x, u)) - transform_unitary(pair, u)(x)))
    return [_result("seminorm.domination", dom), _result("seminorm.blocked_admissible", adm),
            _result("seminorm.unitary_transport", uni)]


# -- setmnc ------------------------------------------------------------------

def setmnc_checks(shape: AlgebraShape, N: int, trials: int, m_range, tol: float, rng) -> list[InvariantResult]:
    ball = lambda_profile(unit_ball(shape, N, count=4, seed=rng), N - 1)
    unit = [1e-10 - abs(v - 1.0) for v in ball]

    sub, chain = [], []
    for _ in range(trials):
        F = finite_set([random_vector(shape, N, rng) for _ in range(3)])
        G = finite_set([random_vector(shape, N, rng) for _ in range(3)])
        FG = finite_set([f + g for f in F.points for g in G.points])
        n = int(rng.integers(0, N + 1))
        lam = lambda E: float(lambda_profile(E, n)[-1])
        sub.append(lam(F) + lam(G) + 1e-10 - lam(FG))

        pts = [random_vector(shape, N, rng) for _ in range(int(rng.integers(3, 9)))]
        dist = random_pair(shape, N, rng).distance_matrix(pts)
        for m in range(1, min(4, len(pts)) + 1):
            r = covering.cover_radius(dist, m, "exact")
            D = covering.partition_diameter(dist, m, "exact")
            chain += [D - r + 1e-12, 2 * r - D + 1e-12]
            if m >= 2:
                s = covering.separation(dist, m, "exact")
                chain.append(covering.cover_radius(dist, m - 1, "exact") - s / 2 + 1e-12)

    comp = []
    for _ in range(max(1, trials // 4)):
        Q = random_projection(shape, N, rng)
        E = submodule_ball(Q, count=4, seed=rng)
        chk = complemented_lambda_check(E, Q, head_family(shape, N, int(rng.integers(0, N))), tol)
        comp += [tol - abs(chk.lambda_sub - chk.lambda_ambient), tol - chk.worst_pointwise]

    ds = []
    if N >= 2:
        ctx = DirectSumContext(shape, N // 2, N - N // 2)
        for _ in range(max(1, trials // 4)):
            E = [random_vector(shape, ctx.N, rng) for _ in range(5)]
            chk = direct_sum_chi_check(ctx, E, [random_pair(shape, ctx.N, rng)],
                                       [random_pair(shape, ctx.N1, rng)], [m for m in m_range if m <= 3])
            ds.append(0.0 if chk.ok else -1.0)
    return [_result("setmnc.unit_ball_lambda", unit), _result("setmnc.lambda_subadditive", sub),
            _result("setmnc.surrogate_chain", chain), _result("setmnc.complemented_invariance", comp),
            _result("setmnc.direct_sum_inequality", ds)]


def bracket_checks(sets: dict, N: int, n_max: int, m_range, tol: float) -> list[InvariantResult]:
    out = []
    for name, E in sets.items():
        pair = basis_pair(E.shape, N)
        try:
            rep = mnc_bracket(E, [pair], n_max, m_range)
            margin = rep.chi_upper + tol - rep.chi_lower
        except AssertionError as exc:
            out.append(InvariantResult(f"set.{name}.bracket_ordered", False, -np.inf, str(exc)))
            continue
        out.append(_result(f"set.{name}.bracket_ordered", [margin]))
    return out


# -- opmnc -------------------------------------------------------------------

def opmnc_checks(shape: AlgebraShape, N: int, trials: int, operators: dict, rng) -> list[InvariantResult]:
    adj, sub, hom, nrm, pert = [], [], [], [], []
    for _ in range(trials):
        T, S = random_operator(shape, N, rng), random_operator(shape, N, rng)
        k = int(rng.integers(0, N + 1))
        K = random_theta_combination(shape, N, k, terms=2, seed=rng)
        c = float(rng.uniform(0.1, 3.0))
        rep = operator_property_suite(T, S, K, c, n_eval=int(rng.integers(k, N + 1)))
        sub.append(rep.subadditivity_slack + 1e-9)
        hom.append(1e-10 - rep.homogeneity_error)
        nrm.append(rep.norm_slack + 1e-10)
        pert.append(1e-12 - rep.perturbation_error)
        x, y = random_vector(shape, N, rng), random_vector(shape, N, rng)
        adj.append(1e-10 - adjoint_defect(T, x, y))
    out = [_result("opmnc.adjoint_identity", adj), _result("opmnc.subadditive", sub),
           _result("opmnc.positive_homogeneous", hom), _result("opmnc.norm_bound", nrm),
           _result("opmnc.compact_perturbation", pert)]
    for name, T in operators.items():
        prof = lambda_op_profile(T, N)
        margins = [op_norm(T) + 1e-10 - prof[0]] + [a - b + 1e-12 for a, b in zip(prof, prof[1:])]
        out.append(_result(f"operator.{name}.profile_monotone", margins))
    return out


# -- oracle audit ------------------------------------------------------------

def oracle_checks(shape: AlgebraShape, N: int, trials: int, rng) -> list[InvariantResult]:
    combo, spectral, semi = [], [], []
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        pts = [random_vector(shape, N, rng) for _ in range(n)]
        pair = random_pair(shape, N, rng)
        dist = pair.distance_matrix(pts)
        idx = list(range(n))
        metric = lambda a, b: float(dist[a, b])
        for m in range(1, min(4, n) + 1):
            combo.append(-abs(covering.cover_radius(dist, m, "exact") - oracle.exact_cover_radius(idx, m, metric)))
            combo.append(-abs(covering.partition_diameter(dist, m, "exact")
                              - oracle.exact_partition_diameter(idx, m, metric)))
            if m >= 2:
                combo.append(-abs(covering.separation(dist, m, "exact") - oracle.exact_separation(idx, m, metric)))
        T = random_operator(shape, N, rng)
        ref = oracle.spectral_norm_reference(T.mats[0], seed=rng)
        fast = float(np.linalg.norm(T.mats[0], 2))
        spectral.append(1e-8 * max(fast, 1e-300) - abs(ref - fast))
        x = random_vector(shape, N, rng)
        semi.append(1e-12 - abs(oracle.seminorm_reference(pair, x) - pair(x)))
    return [_result("oracle.combinatorial_agreement", combo), _result("oracle.spectral_agreement", spectral),
            _result("oracle.seminorm_agreement", semi)]
