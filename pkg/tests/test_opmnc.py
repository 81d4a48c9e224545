import numpy as np
import pytest

from hilbmnc.algebra import AlgebraShape, random_unitary
from hilbmnc.hmodule import ModuleVector, apply_theta, random_vector, tail_norm
from hilbmnc.opmnc import (AdjointableOperator, adjoint_defect, image_ball_sampler, lambda_op_profile, op_apply,
                           op_norm, operator_property_suite, random_operator, random_theta_combination)

C = AlgebraShape.of(1)


def test_apply_examples(shape, rng):
    x = random_vector(shape, 4, rng)
    assert op_apply(AdjointableOperator.identity(shape, 4), x).allclose(x)
    e1, e2 = ModuleVector.basis(shape, 4, 1), ModuleVector.basis(shape, 4, 2)
    assert op_apply(AdjointableOperator.theta(e1, e2), x).allclose(apply_theta(e1, e2, x), atol=1e-12)
    D = AdjointableOperator.diagonal(C, [2, 3])
    assert op_apply(D, ModuleVector.scalars([1, 1])).allclose(ModuleVector.scalars([2, 3]))


def test_norm_examples(shape, rng):
    assert op_norm(AdjointableOperator.zero(shape, 3)) == 0
    U = AdjointableOperator.diagonal(shape, [random_unitary(shape, rng) for _ in range(3)])
    assert op_norm(U) == pytest.approx(1, abs=1e-12)
    assert op_norm(AdjointableOperator.harmonic(C, 3)) == pytest.approx(1)


def test_adjoint_identity(shape, rng):
    T = random_operator(shape, 4, rng)
    for _ in range(5):
        assert adjoint_defect(T, random_vector(shape, 4, rng), random_vector(shape, 4, rng)) <= 1e-10


def test_profile_examples(shape):
    N = 5
    np.testing.assert_allclose(lambda_op_profile(AdjointableOperator.identity(shape, N), N - 1), 1, atol=1e-12)
    np.testing.assert_allclose(lambda_op_profile(AdjointableOperator.harmonic(shape, N), N - 1),
                               [1 / (n + 1) for n in range(N)], atol=1e-12)
    K = random_theta_combination(shape, N, 2, terms=3, seed=1)
    assert np.all(lambda_op_profile(K, N)[2:] == 0)


def test_property_suite_examples(shape, rng):
    N = 4
    I = AdjointableOperator.identity(shape, N)
    K = random_theta_combination(shape, N, 1, seed=rng)
    rep = operator_property_suite(I, I, K, 2.0, 1)
    assert rep.ok and rep.subadditivity_slack >= -1e-9
    T = random_operator(shape, N, rng)
    np.testing.assert_allclose(lambda_op_profile(2.0 * T, N), 2 * lambda_op_profile(T, N), rtol=1e-12)
    e1 = ModuleVector.basis(shape, N, 1)
    K1 = AdjointableOperator.theta(e1, random_vector(shape, N, rng))
    np.testing.assert_allclose(lambda_op_profile(T + K1, N)[1:], lambda_op_profile(T, N)[1:], atol=1e-12)


def test_property_suite_random(shape, rng):
    for _ in range(10):
        N = 4
        T, S = random_operator(shape, N, rng), random_operator(shape, N, rng)
        k = int(rng.integers(0, N + 1))
        rep = operator_property_suite(T, S, random_theta_combination(shape, N, k, seed=rng),
                                      float(rng.uniform(0.1, 3)), int(rng.integers(k, N + 1)))
        assert rep.ok, rep


def test_property_suite_preconditions(shape):
    I = AdjointableOperator.identity(shape, 3)
    K = random_theta_combination(shape, 3, 2, seed=0)
    with pytest.raises(ValueError):
        operator_property_suite(I, I, K, -1.0, 2)
    with pytest.raises(ValueError):
        operator_property_suite(I, I, K, 1.0, 1)


def test_image_sampler_examples(shape):
    Z = image_ball_sampler(AdjointableOperator.zero(shape, 3), 4)
    assert all(p == ModuleVector.zeros(shape, 3) for p in Z.points)
    B = image_ball_sampler(AdjointableOperator.identity(shape, 3), 4)
    assert all(B.contains(p) for p in B.points)
    T = random_operator(shape, 5, 2)
    S = image_ball_sampler(T, 4, seed=1)
    prof = lambda_op_profile(T, 4)
    for n in range(5):
        assert max(tail_norm(p, n) for p in S.points) == pytest.approx(prof[n], abs=1e-8)


def test_operator_algebra(shape, rng):
    T, S = random_operator(shape, 3, rng), random_operator(shape, 3, rng)
    x = random_vector(shape, 3, rng)
    assert op_apply(T @ S, x).allclose(op_apply(T, op_apply(S, x)), atol=1e-10)
    assert op_apply(T - S, x).allclose(op_apply(T, x) - op_apply(S, x), atol=1e-10)
