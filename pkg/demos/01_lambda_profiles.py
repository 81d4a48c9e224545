"""Tail profiles of a few sets in A^N.

The lambda measure asks how far a set sits from the finitely generated
submodules.  At truncation N the head projections P_n already realize it,
so the whole story is the profile n -> sup ||(I - P_n) x||.
"""
import numpy as np

from hilbmnc.algebra import AlgebraShape
from hilbmnc.opmnc import AdjointableOperator
from hilbmnc.setmnc import basis_set, image_set, lambda_profile, unit_ball

A = AlgebraShape.of(2, 3)   # M_2 + M_3
N = 10

# %% The unit ball never gets closer than distance 1: e_N is always left over.
B = unit_ball(A, N, count=8, seed=0)
print("unit ball  ", np.round(lambda_profile(B, N - 1), 6))

# %% The basis vectors behave the same way until the window swallows them all.
E = basis_set(A, N)
print("basis      ", np.round(lambda_profile(E, N), 6))

# %% A compact-looking operator: the image of B_1 under diag(1, 1/2, ...).
# Its profile is exactly 1/(n+1), so lambda shrinks with the window.
T = AdjointableOperator.harmonic(A, N)
D = image_set(A, N, T.mats, count=8)
prof = lambda_profile(D, N - 1)
print("diag image ", np.round(prof, 6))
print("1/(n+1)    ", np.round(1 / np.arange(1, N + 1), 6))

# %% Suprema over image sets are operator norms, not sample maxima; the
# sampled points only matter later, for the covering solvers.
print("points drawn:", len(D.points))
