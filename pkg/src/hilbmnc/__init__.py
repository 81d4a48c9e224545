"""Measures of noncompactness on truncated standard Hilbert modules."""

from .algebra import AlgebraElement, AlgebraShape, State, alg_norm, norming_state, random_unitary
from .hmodule import DirectSumContext, ModuleProjection, ModuleVector, inner, vec_norm
from .opmnc import AdjointableOperator, lambda_op_profile, op_norm
from .seminorm import AdmissiblePair, WitnessCertificate, build_witness_system, seminorm_eval
from .setmnc import MncReport, SampledSet, lambda_profile, mnc_bracket

__version__ = "0.1.0"
