"""JSON encoding of vectors, states, operators and witness certificates.

Complex arrays are nested lists whose leaves are ``[re, im]`` pairs.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import AlgebraShape, State
from .hmodule import ModuleVector
from .seminorm import AdmissiblePair, WitnessCertificate

SCHEMA_VERSION = 1


def encode_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_array(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise ValueError("complex arrays must end in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_json(x: ModuleVector) -> dict:
    return {"dims": list(x.shape.block_dims), "N": x.N, "blocks": [encode_array(a) for a in x.data]}


def vector_from_json(obj: dict) -> ModuleVector:
    shape = AlgebraShape(tuple(obj["dims"]))
    return ModuleVector(shape, int(obj["N"]), [decode_array(b) for b in obj["blocks"]])


def state_to_json(phi: State) -> dict:
    return {"dims": list(phi.shape.block_dims), "densities": [encode_array(r) for r in phi.densities]}


def state_from_json(obj: dict) -> State:
    return State(AlgebraShape(tuple(obj["dims"])), [decode_array(r) for r in obj["densities"]])


def pair_to_json(pair: AdmissiblePair) -> dict:
    return {"X": [vector_to_json(x) for x in pair.X], "Phi": [state_to_json(p) for p in pair.Phi]}


def pair_from_json(obj: dict) -> AdmissiblePair:
    return AdmissiblePair([vector_from_json(x) for x in obj["X"]], [state_from_json(p) for p in obj["Phi"]])


def certificate_to_json(cert: WitnessCertificate) -> dict:
    return {
        "schema": "witness-certificate",
        "version": SCHEMA_VERSION,
        "lambda_value": cert.lambda_value,
        "epsilon": cert.epsilon,
        "guaranteed_bound": cert.guaranteed_bound,
        "block_breaks": list(cert.block_breaks),
        "provenance": list(cert.provenance),
        "pair": pair_to_json(cert.pair),
        "witnesses": [vector_to_json(z) for z in cert.witnesses],
    }


def certificate_from_json(obj: dict) -> WitnessCertificate:
    if obj.get("schema") != "witness-certificate":
        raise ValueError("not a witness certificate")
    return WitnessCertificate(
        pair=pair_from_json(obj["pair"]),
        witnesses=[vector_from_json(z) for z in obj["witnesses"]],
        lambda_value=float(obj["lambda_value"]),
        epsilon=float(obj["epsilon"]),
        block_breaks=[int(b) for b in obj["block_breaks"]],
        guaranteed_bound=float(obj["guaranteed_bound"]),
        provenance=list(obj.get("provenance", [])),
    )


def dumps(obj) -> str:
    """Deterministic JSON text (fixed key order, shortest float repr)."""
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"
