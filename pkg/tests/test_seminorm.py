import numpy as np
import pytest

from hilbmnc.algebra import AlgebraShape, State, random_state, random_unitary
from hilbmnc.hmodule import ModuleVector, inner, random_vector, right_mul, tail_norm, vec_norm
from hilbmnc.seminorm import (AdmissiblePair, SamplerExhausted, WindowTooSmall, basis_pair, build_blocked_system,
                              build_witness_system, check_admissible, pseudometric, seminorm_eval,
                              transform_unitary, validate_certificate)
from hilbmnc.setmnc import basis_set, lambda_profile, unit_ball

C = AlgebraShape.of(1)


def e(shape, N, k):
    return ModuleVector.basis(shape, N, k)


def random_blocked(shape, N, rng):
    M = int(rng.integers(1, N + 1))
    cuts = sorted(rng.choice(np.arange(1, N), size=M - 1, replace=False).tolist()) if M > 1 else []
    X = build_blocked_system([random_vector(shape, N, rng) for _ in range(M)], [0] + cuts + [N])
    return AdmissiblePair(X, [random_state(shape, rng) for _ in range(M)])


def test_admissibility_examples(shape, rng):
    N = 3
    samples = [random_vector(shape, N, rng) for _ in range(5)]
    ok, worst = check_admissible([e(shape, N, 1)], samples)
    assert ok and worst >= -1e-12
    ok, worst = check_admissible([e(shape, N, 1), e(shape, N, 1)], [e(shape, N, 1)])
    assert not ok and worst == pytest.approx(-1)
    ok, worst = check_admissible([e(shape, N, k) for k in (1, 2, 3)], samples)
    assert ok and abs(worst) <= 1e-10


def test_oversized_system_vector_rejected():
    with pytest.raises(ValueError):
        check_admissible([2 * e(C, 2, 1)], [])


def test_seminorm_examples():
    pair = AdmissiblePair([e(C, 2, 1), e(C, 2, 2)], [State.tracial(C)] * 2)
    assert seminorm_eval(pair, ModuleVector.zeros(C, 2)) == 0
    assert seminorm_eval(pair, e(C, 2, 1)) == pytest.approx(1)


def test_seminorm_is_dominated_by_norm(shape, rng):
    for _ in range(50):
        pair = random_blocked(shape, 6, rng)
        x = random_vector(shape, 6, rng)
        assert seminorm_eval(pair, x) <= vec_norm(x) + 1e-10


def test_pseudometric_axioms(shape, rng):
    pair = random_blocked(shape, 5, rng)
    x, y, z = (random_vector(shape, 5, rng) for _ in range(3))
    assert pseudometric(pair, x, x) == 0
    assert pseudometric(pair, x, y) == pytest.approx(pseudometric(pair, y, x))
    assert pseudometric(pair, x, z) <= pseudometric(pair, x, y) + pseudometric(pair, y, z) + 1e-12


def test_basis_pseudometric_over_complex_numbers_is_the_euclidean_norm(rng):
    pair = basis_pair(C, 6)
    for _ in range(10):
        x, y = random_vector(C, 6, rng), random_vector(C, 6, rng)
        d = (x - y).data[0].ravel()
        tail_max = max(np.sqrt(np.sum(np.abs(d[k:]) ** 2)) for k in range(6))
        assert pseudometric(pair, x, y) == pytest.approx(tail_max, rel=1e-12)
        assert pseudometric(pair, x, y) == pytest.approx(np.linalg.norm(d), rel=1e-12)


def test_blocked_system_examples(shape, rng):
    X = build_blocked_system([e(shape, 2, 1), e(shape, 2, 2)], [0, 1, 2])
    assert X[0] == e(shape, 2, 1) and X[1] == e(shape, 2, 2)
    with pytest.raises(ValueError, match="block 2"):
        build_blocked_system([e(shape, 3, 1), e(shape, 3, 1)], [0, 1, 3])
    Y = [random_vector(shape, 8, rng) for _ in range(3)]
    X = build_blocked_system(Y, [0, 2, 5, 8])
    for i, x in enumerate(X):
        assert vec_norm(x) == pytest.approx(1, abs=1e-10)
        for j, y in enumerate(X):
            if i != j:
                assert inner(x, y) == shape.zero()


def test_blocked_systems_are_admissible(shape, rng):
    for _ in range(10):
        pair = random_blocked(shape, 6, rng)
        ok, worst = check_admissible(pair.X, [random_vector(shape, 6, rng) for _ in range(10)])
        assert ok, worst


def test_bad_breaks_rejected():
    with pytest.raises(ValueError):
        build_blocked_system([e(C, 3, 1)], [1, 1])
    with pytest.raises(ValueError):
        build_blocked_system([e(C, 3, 1)], [0, 1, 2])


def test_unitary_transport(shape, rng):
    pair = random_blocked(shape, 5, rng)
    x = random_vector(shape, 5, rng)
    same = transform_unitary(pair, shape.unit())
    assert seminorm_eval(same, x) == pytest.approx(seminorm_eval(pair, x), abs=1e-12)
    for _ in range(10):
        u = random_unitary(shape, rng)
        moved = transform_unitary(pair, u)
        assert abs(seminorm_eval(pair, right_mul(x, u)) - seminorm_eval(moved, x)) <= 1e-10
        back = transform_unitary(moved, u.H)
        assert abs(seminorm_eval(back, x) - seminorm_eval(pair, x)) <= 1e-10


def test_transport_needs_unitary():
    with pytest.raises(ValueError):
        transform_unitary(basis_pair(C, 2), C.scalar(2))


def test_witnesses_on_the_basis_set():
    E = basis_set(C, 16)
    prof = lambda_profile(E, 4)
    cert = build_witness_system(E, prof, 0.1)
    assert len(cert.witnesses) == 16
    assert cert.guaranteed_bound == pytest.approx(0.9)
    for j, (z, x) in enumerate(zip(cert.witnesses, cert.pair.X)):
        assert z == e(C, 16, j + 1) and x == z
    check = validate_certificate(cert)
    assert check.valid, check.failures
    assert min(check.cover_floor.values()) >= 0.9


def test_witnesses_on_the_unit_ball(shape):
    E = unit_ball(shape, 12, count=4, seed=1)
    cert = build_witness_system(E, lambda_profile(E, 3), 0.2, seed=3)
    assert cert.lambda_value == pytest.approx(1)
    check = validate_certificate(cert)
    assert check.valid, check.failures
    assert all(v >= 0.8 - 1e-8 for v in check.cover_floor.values())


def test_witness_epsilon_must_be_below_lambda():
    E = basis_set(C, 4)
    with pytest.raises(ValueError):
        build_witness_system(E, lambda_profile(E, 2), 1.0)


def test_sampler_exhaustion_reports_best_value():
    class Flat:
        N, shape = 4, C

        def tail_candidates(self, i):
            return [ModuleVector.scalars([0.1, 0, 0, 0])]

        def draw(self, count, rng):
            return []

    with pytest.raises(SamplerExhausted) as info:
        build_witness_system(Flat(), [1.0], 0.1)
    assert info.value.best == pytest.approx(0.1)


def test_window_too_small_reports_minimal_size():
    E = basis_set(C, 4)
    with pytest.raises(WindowTooSmall) as info:
        build_witness_system(E, lambda_profile(E, 1), 0.1, count=6)
    assert info.value.minimal_N == 6


def test_tampered_certificate_fails_validation():
    E = basis_set(C, 10)
    cert = build_witness_system(E, lambda_profile(E, 2), 0.1)
    cert.witnesses[3] = cert.witnesses[2]
    assert not validate_certificate(cert).valid


def test_witness_tails_exceed_reach():
    E = unit_ball(AlgebraShape.of(2), 10, count=4, seed=0)
    cert = build_witness_system(E, lambda_profile(E, 2), 0.2)
    for z, start in zip(cert.witnesses, cert.block_breaks):
        assert tail_norm(z, start) > cert.lambda_value - cert.epsilon / 4
