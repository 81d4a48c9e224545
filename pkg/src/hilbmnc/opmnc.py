"""Adjointable operators on ``A^N`` and their lambda measure.

An operator is stored as one ``(N d_k) x (N d_k)`` complex matrix per algebra
block; entry ``(i, j)`` of the ``N x N`` operator matrix over ``A`` is the
``d_k x d_k`` sub-block at rows ``i*d_k`` and columns ``j*d_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, ShapeMismatch
from .hmodule import ModuleProjection, ModuleVector, inner
from .setmnc import SampledSet, image_set


class AdjointableOperator:
    __slots__ = ("shape", "N", "mats", "kind", "support")

    def __init__(self, shape: AlgebraShape, N: int, mats: Sequence[np.ndarray], kind: str = "dense",
                 support: int | None = None):
        mats = tuple(np.array(m, dtype=complex) for m in mats)
        if len(mats) != shape.n_blocks:
            raise ShapeMismatch(f"expected {shape.n_blocks} matrices, got {len(mats)}")
        for d, m in zip(shape.block_dims, mats):
            if m.shape != (N * d, N * d):
                raise ShapeMismatch(f"operator block {m.shape} does not match N*d = {N * d}")
            m.setflags(write=False)
        self.shape, self.N, self.mats, self.kind = shape, N, mats, kind
        # for theta combinations: every term's range vector lives in ran P_support
        self.support = support

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[AlgebraElement]]) -> "AdjointableOperator":
        """From an ``N x N`` array of algebra elements acting by left multiplication."""
        N = len(blocks)
        shape = blocks[0][0].shape
        mats = []
        for k, d in enumerate(shape.block_dims):
            arr = np.array([[blocks[i][j].blocks[k] for j in range(N)] for i in range(N)])
            mats.append(arr.transpose(0, 2, 1, 3).reshape(N * d, N * d))
        return cls(shape, N, mats)

    @classmethod
    def identity(cls, shape: AlgebraShape, N: int) -> "AdjointableOperator":
        return cls(shape, N, [np.eye(N * d) for d in shape.block_dims], kind="diagonal")

    @classmethod
    def zero(cls, shape: AlgebraShape, N: int) -> "AdjointableOperator":
        return cls(shape, N, [np.zeros((N * d, N * d)) for d in shape.block_dims], kind="diagonal", support=0)

    @classmethod
    def diagonal(cls, shape: AlgebraShape, entries: Sequence) -> "AdjointableOperator":
        """Coordinatewise left multiplication; entries are algebra elements or scalars."""
        N = len(entries)
        entries = [e if isinstance(e, AlgebraElement) else shape.scalar(e) for e in entries]
        mats = []
        for k, d in enumerate(shape.block_dims):
            m = np.zeros((N * d, N * d), complex)
            for j, e in enumerate(entries):
                m[j * d:(j + 1) * d, j * d:(j + 1) * d] = e.blocks[k]
            mats.append(m)
        return cls(shape, N, mats, kind="diagonal")

    @classmethod
    def harmonic(cls, shape: AlgebraShape, N: int) -> "AdjointableOperator":
        """``diag(1, 1/2, ..., 1/N)``."""
        return cls.diagonal(shape, [1.0 / (j + 1) for j in range(N)])

    @classmethod
    def theta(cls, y: ModuleVector, z: ModuleVector) -> "AdjointableOperator":
        """``Theta_{y,z}: x -> y <z, x>``."""
        mats = [y.stacked(k) @ z.stacked(k).conj().T for k in range(y.shape.n_blocks)]
        return cls(y.shape, y.N, mats, kind="theta", support=_support(y))

    @classmethod
    def theta_combination(cls, terms: Sequence[tuple[ModuleVector, ModuleVector]]) -> "AdjointableOperator":
        ops = [cls.theta(y, z) for y, z in terms]
        out = ops[0]
        for op in ops[1:]:
            out = out + op
        return out

    @classmethod
    def projection(cls, P: ModuleProjection) -> "AdjointableOperator":
        return cls(P.shape, P.N, P.matrices(), kind="dense", support=P.head if P.is_head else None)

    @property
    def H(self) -> "AdjointableOperator":
        return AdjointableOperator(self.shape, self.N, [m.conj().T for m in self.mats], self.kind)

    def _check(self, other):
        if not isinstance(other, AdjointableOperator) or other.shape != self.shape or other.N != self.N:
            raise ShapeMismatch("operators act on different modules")

    def __add__(self, other):
        self._check(other)
        kind = self.kind if self.kind == other.kind else "dense"
        support = None
        if self.support is not None and other.support is not None:
            support = max(self.support, other.support)
        return AdjointableOperator(self.shape, self.N, [a + b for a, b in zip(self.mats, other.mats)],
                                   kind, support)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, c):
        return AdjointableOperator(self.shape, self.N, [c * m for m in self.mats], self.kind, self.support)

    def __matmul__(self, other):
        self._check(other)
        return AdjointableOperator(self.shape, self.N, [a @ b for a, b in zip(self.mats, other.mats)])

    def __call__(self, x: ModuleVector) -> ModuleVector:
        return op_apply(self, x)

    def __repr__(self):
        return f"AdjointableOperator({self.kind}, dims={self.shape.block_dims}, N={self.N})"


def _support(y: ModuleVector) -> int:
    """Smallest n with ``P_n y = y``."""
    n = 0
    for a in y.data:
        nz = np.flatnonzero(np.abs(a).reshape(y.N, -1).max(axis=1) > 0)
        if nz.size:
            n = max(n, int(nz[-1]) + 1)
    return n


def op_apply(T: AdjointableOperator, x: ModuleVector) -> ModuleVector:
    if x.shape != T.shape or x.N != T.N:
        raise ShapeMismatch("operator and vector dimensions differ")
    return ModuleVector.from_stacked(x.shape, x.N, [m @ x.stacked(k) for k, m in enumerate(T.mats)])


def op_norm(T: AdjointableOperator) -> float:
    return max(float(np.linalg.norm(m, 2)) for m in T.mats)


def tail_operator(T: AdjointableOperator, n: int) -> AdjointableOperator:
    """``(I - P_n) T``."""
    mats = []
    for d, m in zip(T.shape.block_dims, T.mats):
        t = m.copy()
        t[: n * d] = 0
        mats.append(t)
    return AdjointableOperator(T.shape, T.N, mats)


def lambda_op_profile(T: AdjointableOperator, n_max: int) -> np.ndarray:
    """``s_n = ||(I - P_n) T||`` for ``n = 0..n_max``."""
    if not 0 <= n_max <= T.N:
        raise ValueError(f"n_max = {n_max} outside 0..{T.N}")
    return np.array([op_norm(tail_operator(T, n)) for n in range(n_max + 1)])


def adjoint_defect(T: AdjointableOperator, x: ModuleVector, y: ModuleVector) -> float:
    """``||<Tx, y> - <x, T* y>||``."""
    a = inner(op_apply(T, x), y)
    b = inner(x, op_apply(T.H, y))
    return max(float(np.max(np.abs(p - q))) for p, q in zip(a.blocks, b.blocks))


@dataclass
class OperatorPropertyReport:
    n_eval: int
    subadditivity_slack: float     # lam(T) + lam(S) - lam(T+S)
    homogeneity_error: float       # |lam(cT) - c lam(T)|
    norm_slack: float              # ||T|| - lam(T)
    perturbation_error: float      # max_{n >= support} |s_n(T+K) - s_n(T)|
    ok: bool


def operator_property_suite(T: AdjointableOperator, S: AdjointableOperator, K: AdjointableOperator,
                            c: float, n_eval: int) -> OperatorPropertyReport:
    """Subadditivity, positive homogeneity, norm bound and compact-perturbation invariance.

    ``lam`` is the profile value at ``n_eval``; the perturbation check covers
    every level from the support of ``K`` up to ``N``.
    """
    if c <= 0:
        raise ValueError("homogeneity is only claimed for c > 0")
    if K.support is None or K.support > n_eval:
        raise ValueError(f"K must be supported in ran P_k with k <= n_eval = {n_eval}; got {K.support}")
    lam = lambda op: float(lambda_op_profile(op, n_eval)[-1])
    lt, ls = lam(T), lam(S)
    sub = lt + ls - lam(T + S)
    hom = abs(lam(c * T) - c * lt)
    nrm = op_norm(T) - lt
    pT = lambda_op_profile(T, T.N)
    pTK = lambda_op_profile(T + K, T.N)
    pert = float(np.max(np.abs(pTK[K.support:] - pT[K.support:])))
    ok = sub >= -1e-9 and hom <= 1e-10 and nrm >= -1e-10 and pert <= 1e-12
    return OperatorPropertyReport(n_eval, sub, hom, nrm, pert, ok)


def image_ball_sampler(T: AdjointableOperator, count: int, seed=0) -> SampledSet:
    """``T(B_1)`` sampled at tail maximizers (right singular vectors) and random unit vectors."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return image_set(T.shape, T.N, T.mats, 1.0, count, seed, label=f"image({T.kind})")


def random_operator(shape: AlgebraShape, N: int, seed=None, scale: float = 1.0) -> AdjointableOperator:
    rng = np.random.default_rng(seed)
    mats = []
    for d in shape.block_dims:
        g = rng.standard_normal((N * d, N * d)) + 1j * rng.standard_normal((N * d, N * d))
        mats.append(scale * g / np.sqrt(N * d))
    return AdjointableOperator(shape, N, mats, kind="dense")


def random_theta_combination(shape: AlgebraShape, N: int, k: int, terms: int = 2, seed=None):
    """Sum of ``Theta_{y,z}`` with every ``y`` supported in the first ``k`` coordinates."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(terms):
        ydata, zdata = [], []
        for d in shape.block_dims:
            y = rng.standard_normal((N, d, d)) + 1j * rng.standard_normal((N, d, d))
            y[k:] = 0
            ydata.append(y)
            zdata.append(rng.standard_normal((N, d, d)) + 1j * rng.standard_normal((N, d, d)))
        pairs.append((ModuleVector(shape, N, ydata), ModuleVector(shape, N, zdata)))
    K = AdjointableOperator.theta_combination(pairs)
    return AdjointableOperator(shape, N, K.mats, kind="theta", support=k)
