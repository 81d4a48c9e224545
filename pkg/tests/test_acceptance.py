"""Acceptance criteria at the documented sizes and tolerances.

Each test prints one ``criterion k: PASS|FAIL`` line to the terminal (also
under ``-q``/captured runs) before asserting.
"""

import time

import numpy as np
import pytest

from hilbmnc import covering, oracle
from hilbmnc.algebra import AlgebraShape, alg_norm, norming_state, random_normal, random_state, random_unitary
from hilbmnc.harness.suites import random_blocked_pair, random_pair
from hilbmnc.hmodule import DirectSumContext, random_projection, random_vector, right_mul, vec_norm
from hilbmnc.opmnc import AdjointableOperator, operator_property_suite, random_operator, random_theta_combination
from hilbmnc.seminorm import basis_pair, build_witness_system, check_admissible, transform_unitary, validate_certificate
from hilbmnc.setmnc import (basis_set, complemented_lambda_check, direct_sum_chi_check, head_family, image_set,
                            lambda_profile, mnc_bracket, submodule_ball, unit_ball)

SHAPES = [AlgebraShape.of(1), AlgebraShape.of(2), AlgebraShape.of(2, 3)]


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return emit


def test_unit_ball_lambda(report):
    t0 = time.perf_counter()
    worst = 0.0
    for shape in SHAPES:
        for N in (4, 8, 16):
            prof = lambda_profile(unit_ball(shape, N, count=8, seed=N), N - 1)
            worst = max(worst, float(np.max(np.abs(prof - 1.0))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5
    assert report(1, ok, f"max |s_n - 1| = {worst:.2e}, {elapsed:.2f} s"), (worst, elapsed)


def test_seminorm_domination(report):
    rng = np.random.default_rng(1)
    worst = -np.inf
    for i in range(1000):
        shape = SHAPES[i % 3]
        N = int(rng.integers(1, 9))
        pair = random_pair(shape, N, rng) if N > 1 else basis_pair(shape, 1, [random_state(shape, rng)])
        x = random_vector(shape, N, rng, norm=float(rng.uniform(0.1, 3)))
        worst = max(worst, pair(x) - vec_norm(x))
    assert report(2, worst <= 1e-10, f"max p(x) - ||x|| = {worst:.2e} over 1000 instances"), worst


def test_blocked_admissibility(report):
    rng = np.random.default_rng(2)
    worst = np.inf
    for i in range(200):
        shape = SHAPES[i % 3]
        N = int(rng.integers(2, 9))
        pair = random_blocked_pair(shape, N, rng)
        _, w = check_admissible(pair.X, [random_vector(shape, N, rng) for _ in range(50)])
        worst = min(worst, w)
    assert report(3, worst >= -1e-9, f"min residual eigenvalue {worst:.2e} over 200 systems"), worst


def test_unitary_invariance(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(100):
        shape = SHAPES[i % 3]
        N = int(rng.integers(2, 8))
        pair = random_pair(shape, N, rng)
        u = random_unitary(shape, rng)
        x = random_vector(shape, N, rng)
        worst = max(worst, abs(pair(right_mul(x, u)) - transform_unitary(pair, u)(x)))
    assert report(4, worst <= 1e-10, f"max deviation {worst:.2e} over 100 triples"), worst


def test_norming_states(report):
    rng = np.random.default_rng(4)
    worst = -np.inf
    for i in range(500):
        shape = [AlgebraShape.of(1), AlgebraShape.of(2), AlgebraShape.of(2, 3), AlgebraShape.of(4)][i % 4]
        a = random_normal(shape, rng)
        worst = max(worst, alg_norm(a) - abs(norming_state(a)(a)))
    assert report(5, worst <= 1e-9, f"max ||a|| - |phi(a)| = {worst:.2e} over 500 elements"), worst


# -- criterion 6 -------------------------------------------------------------

N6 = 32
SHAPE6 = AlgebraShape.of(2, 3)


def _diag_window(eps):
    """Window for diag(1, 1/2, ...) whose lambda value 1/(n+1) is the smallest one above eps."""
    return max(n for n in range(N6) if 1 / (n + 1) > eps)


def _scenario(kind, eps):
    if kind == "unit-ball":
        return unit_ball(SHAPE6, N6, count=8, seed=6), 4, 1.0
    if kind == "basis":
        return basis_set(SHAPE6, N6), 4, 1.0
    T = AdjointableOperator.harmonic(SHAPE6, N6)
    n = _diag_window(eps)
    return image_set(SHAPE6, N6, T.mats, count=8, seed=6), n, 1 / (n + 1)


def _sandwich(kind, eps):
    t0 = time.perf_counter()
    E, n_max, lam_exact = _scenario(kind, eps)
    prof = lambda_profile(E, n_max)
    cert = build_witness_system(E, prof, eps, seed=6)
    check = validate_certificate(cert, m_max=8)
    rep = mnc_bracket(E, [basis_pair(SHAPE6, N6), cert.pair], n_max, [1, 2], certificate=cert)
    elapsed = time.perf_counter() - t0
    low = [m for m, v in check.cover_floor.items() if v < cert.lambda_value - eps - 1e-8]
    missing = sorted(set(range(1, 9)) - set(check.cover_floor))
    problems = []
    if not check.valid:
        problems.append("certificate invalid: " + "; ".join(check.failures[:2]))
    if len(cert.witnesses) < 24:
        problems.append(f"{len(cert.witnesses)} witnesses < 24")
    if low:
        problems.append(f"r_m below lambda - eps for m in {low}")
    if missing:
        problems.append(f"r_m undefined for m in {missing[0]}..{missing[-1]} (fewer witnesses than centres)")
    if not (rep.chi_upper == cert.lambda_value and abs(rep.chi_upper - lam_exact) <= 1e-10):
        problems.append(f"chi_upper {rep.chi_upper!r} != lambda {lam_exact!r}")
    if elapsed >= 60:
        problems.append(f"runtime {elapsed:.1f} s")
    return problems, len(cert.witnesses), elapsed


def test_witness_sandwich(report):
    cases = [(k, e) for k in ("unit-ball", "diag-image", "basis") for e in (0.2, 0.05)]
    failed = []
    for kind, eps in cases:
        problems, count, elapsed = _sandwich(kind, eps)
        if problems:
            failed.append(f"{kind} eps={eps}: {', '.join(problems)}")
    detail = f"{len(cases) - len(failed)}/{len(cases)} scenarios"
    if failed:
        detail += "; " + " | ".join(failed)
    assert report(6, not failed, detail), failed


# -- criteria 7 and 8 --------------------------------------------------------

def _instances(count, seed):
    """In-budget point sets with Euclidean metrics or module seminorm pseudometrics."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(2, covering.MAX_PARTITION_POINTS + 1))
        if i % 2:
            pts = rng.standard_normal((n, int(rng.integers(1, 4))))
            yield np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        else:
            shape = SHAPES[i % 3]
            N = int(rng.integers(2, 6))
            pts = [random_vector(shape, N, rng) for _ in range(n)]
            yield random_pair(shape, N, rng).distance_matrix(pts)


def test_surrogate_chain(report):
    violations, checked = 0, 0
    for dist in _instances(200, 7):
        n = dist.shape[0]
        for m in range(1, covering.MAX_EXACT_CENTERS + 1):
            r = covering.cover_radius(dist, m, "exact")
            D = covering.partition_diameter(dist, m, "exact")
            checked += 2
            violations += not (r <= D <= 2 * r)
            if 2 <= m <= n:
                checked += 1
                violations += not (covering.cover_radius(dist, m - 1, "exact")
                                   >= covering.separation(dist, m, "exact") / 2)
    assert report(7, violations == 0, f"{violations} violations in {checked} inequalities"), violations


def test_oracle_equivalence(report):
    mismatches, checked = 0, 0
    for dist in _instances(200, 8):
        n = dist.shape[0]
        idx = list(range(n))
        metric = lambda a, b, d=dist: float(d[a, b])
        for m in range(1, covering.MAX_EXACT_CENTERS + 1):
            checked += 2
            mismatches += covering.cover_radius(dist, m, "exact") != oracle.exact_cover_radius(idx, m, metric)
            mismatches += (covering.partition_diameter(dist, m, "exact")
                           != oracle.exact_partition_diameter(idx, m, metric))
            if 2 <= m <= n:
                checked += 1
                mismatches += covering.separation(dist, m, "exact") != oracle.exact_separation(idx, m, metric)
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(1, 13))
        a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        solver = float(np.linalg.norm(a, 2))
        worst = max(worst, abs(oracle.spectral_norm_reference(a, seed=rng) - solver) / solver)
    ok = mismatches == 0 and worst <= 1e-8
    assert report(8, ok, f"{mismatches} combinatorial mismatches in {checked}; "
                         f"spectral max relative error {worst:.2e}"), (mismatches, worst)


def test_complemented_and_direct_sum(report):
    rng = np.random.default_rng(9)
    worst_inv, bad_ds = 0.0, []
    for i in range(20):
        shape = SHAPES[i % 3]
        N = int(rng.integers(2, 6))
        Q = random_projection(shape, N, rng)
        E = submodule_ball(Q, count=6, seed=rng)
        chk = complemented_lambda_check(E, Q, head_family(shape, N, int(rng.integers(0, N))), tol=1e-8)
        worst_inv = max(worst_inv, abs(chk.lambda_sub - chk.lambda_ambient))
        if not chk.ok:
            bad_ds.append(f"complemented instance {i}")
    for i in range(20):
        shape = SHAPES[i % 3]
        ctx = DirectSumContext(shape, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        E = [random_vector(shape, ctx.N, rng) for _ in range(6)]
        sums = [random_pair(shape, ctx.N, rng) if ctx.N > 1 else basis_pair(shape, 1) for _ in range(2)]
        parts = [random_pair(shape, ctx.N1, rng) if ctx.N1 > 1 else basis_pair(shape, 1) for _ in range(2)]
        chk = direct_sum_chi_check(ctx, E, sums, parts, [1, 2, 3])
        if not chk.ok:
            bad_ds.append(f"direct sum {i}: {chk.failures[:1]}")
    ok = worst_inv <= 1e-8 and not bad_ds
    assert report(9, ok, f"invariance gap {worst_inv:.2e}; {len(bad_ds)} failing instances"), bad_ds


def test_operator_properties(report):
    rng = np.random.default_rng(10)
    sub, hom, pert, nrm = np.inf, 0.0, 0.0, np.inf
    for i in range(100):
        shape = SHAPES[i % 3]
        N = int(rng.integers(2, 7))
        T, S = random_operator(shape, N, rng), random_operator(shape, N, rng)
        k = int(rng.integers(0, N + 1))
        K = random_theta_combination(shape, N, k, terms=int(rng.integers(1, 4)), seed=rng)
        rep = operator_property_suite(T, S, K, float(rng.uniform(0.05, 5)), int(rng.integers(k, N + 1)))
        sub, nrm = min(sub, rep.subadditivity_slack), min(nrm, rep.norm_slack)
        hom, pert = max(hom, rep.homogeneity_error), max(pert, rep.perturbation_error)
    ok = sub >= -1e-9 and hom <= 1e-10 and pert <= 1e-12 and nrm >= -1e-10
    assert report(10, ok, f"subadditivity slack {sub:.2e}, homogeneity {hom:.2e}, "
                          f"perturbation {pert:.2e}, norm slack {nrm:.2e}"), (sub, hom, pert, nrm)
