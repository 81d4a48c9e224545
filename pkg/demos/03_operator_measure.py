"""The operator measure lambda_o(T) = lambda(T(B_1)).

It is bounded by the operator norm and ignores A-compact perturbations
past their support level.
"""
import numpy as np

from hilbmnc.algebra import AlgebraShape
from hilbmnc.opmnc import (AdjointableOperator, lambda_op_profile, op_norm, operator_property_suite,
                           random_operator, random_theta_combination)

A = AlgebraShape.of(1, 2)
N = 6
T = random_operator(A, N, seed=3)
S = random_operator(A, N, seed=4, scale=0.5)
K = random_theta_combination(A, N, k=2, terms=3, seed=5)   # ranges inside ran P_2

print("||T||          ", round(op_norm(T), 6))
print("profile T      ", np.round(lambda_op_profile(T, N), 6))
print("profile T + K  ", np.round(lambda_op_profile(T + K, N), 6))
# identical from n = 2 on, the finite-rank part is cut away by (I - P_2)

rep = operator_property_suite(T, S, K, c=2.5, n_eval=3)
print(rep)

# %% The identity keeps distance 1 at every level below N.
print("identity       ", lambda_op_profile(AdjointableOperator.identity(A, N), N - 1))
