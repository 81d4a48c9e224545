"""Building and checking a separated-witness certificate.

Pick points with fat tails and cut the module into consecutive blocks, one
per chosen point.  The normalized block parts with their norming states
form an admissible pair.  Under that seminorm the points stay lambda - eps apart,
which bounds the Hausdorff measure from below.
"""
import json

from hilbmnc.algebra import AlgebraShape
from hilbmnc.seminorm import basis_pair, build_witness_system, validate_certificate
from hilbmnc.serialize import certificate_to_json, dumps
from hilbmnc.setmnc import lambda_profile, mnc_bracket, unit_ball

A = AlgebraShape.of(2)
N, window, eps = 24, 3, 0.15

E = unit_ball(A, N, count=8, seed=1)
prof = lambda_profile(E, window)
cert = build_witness_system(E, prof, eps, seed=1)
print(f"lambda = {cert.lambda_value}, {len(cert.witnesses)} witnesses, breaks {cert.block_breaks[:6]}...")

# %% Re-check from scratch.  The head values must clear lambda - eps/2 and the
# exact m-centre radius must stay above the bound for every m <= 8.
check = validate_certificate(cert, m_max=8)
print("valid:", check.valid)
print("min head value   ", round(min(check.head_values), 6), "> lambda - eps/2 =", cert.lambda_value - eps / 2)
print("m-centre floors  ", {m: round(v, 4) for m, v in check.cover_floor.items()})

# %% The bracket: upper end is lambda, lower end the certified bound.
rep = mnc_bracket(E, [basis_pair(A, N), cert.pair], window, [1, 2, 3], certificate=cert)
print(f"chi in [{rep.chi_lower:.4f}, {rep.chi_upper:.4f}]  ({rep.lower_source})")

# %% Certificates serialize to plain JSON ([re, im] leaves) and round-trip.
text = dumps(certificate_to_json(cert))
print(len(text), "bytes;", json.loads(text)["schema"])
