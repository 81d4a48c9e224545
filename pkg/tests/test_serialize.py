import json

import numpy as np

from hilbmnc.algebra import AlgebraShape, random_state
from hilbmnc.hmodule import random_vector
from hilbmnc.seminorm import basis_pair, build_witness_system
from hilbmnc.serialize import (certificate_from_json, certificate_to_json, decode_array, dumps, encode_array,
                               pair_from_json, pair_to_json, state_from_json, state_to_json, vector_from_json,
                               vector_to_json)
from hilbmnc.setmnc import basis_set, lambda_profile


def test_complex_arrays_round_trip(rng):
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    assert np.array_equal(decode_array(json.loads(json.dumps(encode_array(a)))), a)
    assert encode_array([[1 + 2j]]) == [[[1.0, 2.0]]]


def test_objects_round_trip(shape, rng):
    x = random_vector(shape, 3, rng)
    assert vector_from_json(json.loads(dumps(vector_to_json(x)))) == x
    phi = random_state(shape, rng)
    back = state_from_json(state_to_json(phi))
    assert all(np.array_equal(p, q) for p, q in zip(back.densities, phi.densities))
    pair = basis_pair(shape, 3)
    assert pair_from_json(pair_to_json(pair))(x) == pair(x)


def test_certificate_round_trip():
    C = AlgebraShape.of(1)
    E = basis_set(C, 6)
    cert = build_witness_system(E, lambda_profile(E, 2), 0.1)
    text = dumps(certificate_to_json(cert))
    again = certificate_from_json(json.loads(text))
    assert dumps(certificate_to_json(again)) == text
    assert again.guaranteed_bound == cert.guaranteed_bound
