import numpy as np
import pytest

from hilbmnc import oracle
from hilbmnc.algebra import AlgebraShape, random_state
from hilbmnc.hmodule import ModuleVector, random_vector
from hilbmnc.seminorm import basis_pair, seminorm_eval

LINE = [0.0, 1.0, 3.0]
absdiff = lambda a, b: abs(a - b)


def test_cover_oracle_examples():
    assert oracle.exact_cover_radius(LINE, 2, absdiff) == 1
    assert oracle.exact_cover_radius([4.0], 1, absdiff) == 0
    assert oracle.exact_cover_radius(LINE, 3, absdiff) == 0


def test_partition_oracle_examples():
    assert oracle.exact_partition_diameter(LINE, 2, absdiff) == 1
    assert oracle.exact_partition_diameter(LINE, 1, absdiff) == 3
    assert oracle.exact_partition_diameter(LINE, 4, absdiff) == 0


def test_separation_oracle_examples():
    assert oracle.exact_separation(LINE, 2, absdiff) == 3
    assert oracle.exact_separation(LINE, 3, absdiff) == 1


def test_partition_count_is_bell_number():
    assert [len(list(oracle.set_partitions(n, n))) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]
    assert len(list(oracle.set_partitions(4, 2))) == 8


def test_budgets_enforced():
    with pytest.raises(oracle.OracleBudgetExceeded):
        oracle.exact_cover_radius(list(range(17)), 1, absdiff)
    with pytest.raises(oracle.OracleBudgetExceeded):
        oracle.exact_partition_diameter(list(range(11)), 2, absdiff)
    with pytest.raises(ValueError):
        oracle.OracleBudget(max_points=0)


def test_spectral_reference_examples(rng):
    assert oracle.spectral_norm_reference(np.eye(3)) == pytest.approx(1)
    assert oracle.spectral_norm_reference(np.diag([3.0, -4.0])) == pytest.approx(4)
    for _ in range(20):
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        solver = np.linalg.norm(a, 2)
        assert abs(oracle.spectral_norm_reference(a, seed=rng) - solver) <= 1e-8 * solver


def test_power_iteration_budget():
    tight = oracle.OracleBudget(power_iterations=1)
    a = np.diag([1.0, 0.999, 0.5])
    with pytest.raises(oracle.PowerIterationStalled):
        oracle.spectral_norm_reference(a, budget=tight)


def test_seminorm_reference(rng):
    C = AlgebraShape.of(1)
    pair = basis_pair(C, 5)
    assert oracle.seminorm_reference(pair, ModuleVector.zeros(C, 5)) == 0
    x = random_vector(C, 5, rng)
    assert oracle.seminorm_reference(pair, x) == pytest.approx(np.linalg.norm(x.data[0]), rel=1e-12)
    shape = AlgebraShape.of(2, 3)
    worst = 0.0
    for _ in range(100):
        p = basis_pair(shape, 4, [random_state(shape, rng) for _ in range(4)])
        y = random_vector(shape, 4, rng)
        worst = max(worst, abs(oracle.seminorm_reference(p, y) - seminorm_eval(p, y)))
    assert worst <= 1e-12
