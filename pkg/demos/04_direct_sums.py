"""Complemented submodules and direct sums.

lambda of a set inside ran Q does not depend on whether we measure it in
ran Q or in the ambient module, and the Hausdorff measure of a set in
M_1 + M_2 sits between max(chi_1, chi_2) and chi_1 + chi_2.
"""
from hilbmnc.algebra import AlgebraShape
from hilbmnc.hmodule import DirectSumContext, random_projection, random_vector
from hilbmnc.seminorm import basis_pair
from hilbmnc.setmnc import complemented_lambda_check, direct_sum_chi_check, head_family, submodule_ball

A = AlgebraShape.of(2)
N = 5

Q = random_projection(A, N, seed=11, rank=6)
E = submodule_ball(Q, count=6, seed=11)
chk = complemented_lambda_check(E, Q, head_family(A, N, 1))
print(f"lambda in ran Q = {chk.lambda_sub:.12f}, ambient = {chk.lambda_ambient:.12f}, ok = {chk.ok}")

# %% Direct sum A^3 + A^2, five random points.
ctx = DirectSumContext(A, 3, 2)
pts = [random_vector(A, ctx.N, seed=s) for s in range(5)]
res = direct_sum_chi_check(ctx, pts, [basis_pair(A, ctx.N)], [basis_pair(A, 3)], [1, 2])
for row in res.radii[:4]:
    print(row)
print("both sides hold:", res.ok)
