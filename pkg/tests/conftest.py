import numpy as np
import pytest

from hilbmnc.algebra import AlgebraShape

SHAPES = [AlgebraShape.of(1), AlgebraShape.of(2), AlgebraShape.of(2, 3)]


@pytest.fixture(params=SHAPES, ids=lambda s: "+".join(f"M{d}" for d in s.block_dims))
def shape(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
