"""The truncated standard module ``A^N``.

A vector ``x = (xi_1, ..., xi_N)`` is stored per algebra block ``k`` as an
array of shape ``(N, d_k, d_k)``.  Reshaped to ``(N*d_k, d_k)`` it becomes a
tall matrix ``X_k`` and the module structure is plain linear algebra:

    <x, y>_k = X_k^* Y_k,    (x a)_k = X_k a_k,    (T x)_k = T_k X_k

where ``T_k`` is the ``(N*d_k, N*d_k)`` matrix of a module map.  Right
submodules of ``A^N`` that are ranges of projections correspond to subspaces
of ``C^{N d_k}``, one per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, ShapeMismatch

PROJECTION_TOL = 1e-9


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


class ModuleVector:
    __slots__ = ("shape", "N", "data")

    def __init__(self, shape: AlgebraShape, N: int, data: Sequence[np.ndarray]):
        if N < 1:
            raise ValueError("truncation N must be >= 1")
        data = tuple(_frozen(a) for a in data)
        if len(data) != shape.n_blocks:
            raise ShapeMismatch(f"expected {shape.n_blocks} blocks, got {len(data)}")
        for d, a in zip(shape.block_dims, data):
            if a.shape != (N, d, d):
                raise ShapeMismatch(f"coordinate array {a.shape} does not match (N={N}, d={d})")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    @classmethod
    def from_coords(cls, coords: Sequence[AlgebraElement]) -> "ModuleVector":
        if not coords:
            raise ValueError("need at least one coordinate")
        shape = coords[0].shape
        for c in coords:
            if c.shape != shape:
                raise ShapeMismatch("coordinates have different shapes")
        data = [np.stack([c.blocks[k] for c in coords]) for k in range(shape.n_blocks)]
        return cls(shape, len(coords), data)

    @classmethod
    def from_stacked(cls, shape: AlgebraShape, N: int, stacked: Sequence[np.ndarray]) -> "ModuleVector":
        return cls(shape, N, [np.asarray(s).reshape(N, d, d) for d, s in zip(shape.block_dims, stacked)])

    @classmethod
    def zeros(cls, shape: AlgebraShape, N: int) -> "ModuleVector":
        return cls(shape, N, [np.zeros((N, d, d), complex) for d in shape.block_dims])

    @classmethod
    def basis(cls, shape: AlgebraShape, N: int, k: int) -> "ModuleVector":
        """``e_k`` with the unit in slot ``k`` (1-based)."""
        if not 1 <= k <= N:
            raise ValueError(f"basis index {k} outside 1..{N}")
        data = []
        for d in shape.block_dims:
            a = np.zeros((N, d, d), complex)
            a[k - 1] = np.eye(d)
            data.append(a)
        return cls(shape, N, data)

    @classmethod
    def scalars(cls, values) -> "ModuleVector":
        """Vector over ``A = C`` from a list of complex numbers."""
        v = np.asarray(values, dtype=complex)
        return cls(AlgebraShape((1,)), len(v), [v.reshape(-1, 1, 1)])

    def coord(self, j: int) -> AlgebraElement:
        """Coordinate ``xi_j`` (1-based)."""
        return AlgebraElement(self.shape, [a[j - 1] for a in self.data])

    @property
    def coords(self) -> list[AlgebraElement]:
        return [self.coord(j) for j in range(1, self.N + 1)]

    def stacked(self, k: int) -> np.ndarray:
        d = self.shape.block_dims[k]
        return self.data[k].reshape(self.N * d, d)

    def _check(self, other: "ModuleVector"):
        if not isinstance(other, ModuleVector) or other.shape != self.shape or other.N != self.N:
            raise ShapeMismatch("module vectors differ in shape or truncation")

    def __add__(self, other):
        self._check(other)
        return ModuleVector(self.shape, self.N, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other):
        self._check(other)
        return ModuleVector(self.shape, self.N, [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self):
        return ModuleVector(self.shape, self.N, [-a for a in self.data])

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            return right_mul(self, c)
        return ModuleVector(self.shape, self.N, [c * a for a in self.data])

    def __rmul__(self, c):
        return ModuleVector(self.shape, self.N, [c * a for a in self.data])

    def __truediv__(self, c):
        return ModuleVector(self.shape, self.N, [a / c for a in self.data])

    def allclose(self, other: "ModuleVector", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.data, other.data))

    def __eq__(self, other):
        if not isinstance(other, ModuleVector) or other.shape != self.shape or other.N != self.N:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.data, other.data))

    __hash__ = None

    def __repr__(self):
        return f"ModuleVector(dims={self.shape.block_dims}, N={self.N})"


def inner(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """``<x, y> = sum_j xi_j^* eta_j``."""
    x._check(y)
    return AlgebraElement(x.shape, [np.einsum("jba,jbc->ac", a.conj(), b) for a, b in zip(x.data, y.data)])


def vec_norm(x: ModuleVector) -> float:
    # ||<x,x>||^{1/2} = largest singular value of the stacked blocks
    return max(float(np.linalg.norm(x.stacked(k), 2)) for k in range(x.shape.n_blocks))


def right_mul(x: ModuleVector, a: AlgebraElement) -> ModuleVector:
    if a.shape != x.shape:
        raise ShapeMismatch("scalar and vector have different algebra shapes")
    return ModuleVector(x.shape, x.N, [v @ b for v, b in zip(x.data, a.blocks)])


def apply_theta(y: ModuleVector, z: ModuleVector, x: ModuleVector) -> ModuleVector:
    """Rank-one operator ``Theta_{y,z}(x) = y <z, x>``."""
    y._check(z)
    return right_mul(y, inner(z, x))


class ModuleProjection:
    """Self-adjoint idempotent on ``A^N``: either a head ``P_n`` or per-block matrices.

    Matrix projections are validated on construction (``||Q - Q*||`` and
    ``||Q^2 - Q||`` at most ``tol``) unless ``validate=False``.
    """

    __slots__ = ("shape", "N", "head", "mats")

    def __init__(self, shape: AlgebraShape, N: int, *, head: int | None = None, mats=None,
                 tol: float = PROJECTION_TOL, validate: bool = True):
        if (head is None) == (mats is None):
            raise ValueError("give exactly one of head= or mats=")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "head", head)
        if head is not None:
            if not 0 <= head <= N:
                raise ValueError(f"head projection index {head} outside 0..{N}")
            object.__setattr__(self, "mats", None)
            return
        mats = tuple(_frozen(m) for m in mats)
        if len(mats) != shape.n_blocks:
            raise ShapeMismatch(f"expected {shape.n_blocks} matrices, got {len(mats)}")
        for d, m in zip(shape.block_dims, mats):
            if m.shape != (N * d, N * d):
                raise ShapeMismatch(f"projection block {m.shape} does not match N*d = {N * d}")
        object.__setattr__(self, "mats", mats)
        if validate:
            sa, idem = self.defects()
            if sa > tol or idem > tol:
                raise ValueError(f"not a projection: ||Q-Q*|| = {sa:.3e}, ||Q^2-Q|| = {idem:.3e}")

    def __setattr__(self, name, value):
        raise AttributeError("ModuleProjection is immutable")

    @classmethod
    def head_projection(cls, shape: AlgebraShape, N: int, n: int) -> "ModuleProjection":
        return cls(shape, N, head=n)

    @classmethod
    def onto_columns(cls, shape: AlgebraShape, N: int, bases: Sequence[np.ndarray], rtol: float = 1e-10):
        """Orthogonal projection onto the column span of ``bases[k]`` in each block."""
        mats = []
        for d, b in zip(shape.block_dims, bases):
            b = np.asarray(b, dtype=complex).reshape(N * d, -1)
            if b.shape[1] == 0:
                mats.append(np.zeros((N * d, N * d), complex))
                continue
            u, s, _ = np.linalg.svd(b, full_matrices=False)
            r = int(np.sum(s > rtol * max(s[0], 1.0))) if s.size else 0
            u = u[:, :r]
            mats.append(u @ u.conj().T)
        return cls(shape, N, mats=mats)

    @property
    def is_head(self) -> bool:
        return self.head is not None

    def matrices(self) -> tuple[np.ndarray, ...]:
        if self.mats is not None:
            return self.mats
        out = []
        for d in self.shape.block_dims:
            diag = np.zeros(self.N * d)
            diag[: self.head * d] = 1.0
            out.append(np.diag(diag).astype(complex))
        return tuple(out)

    def defects(self) -> tuple[float, float]:
        if self.mats is None:
            return 0.0, 0.0
        sa = max(float(np.linalg.norm(m - m.conj().T, 2)) for m in self.mats)
        idem = max(float(np.linalg.norm(m @ m - m, 2)) for m in self.mats)
        return sa, idem

    def complement(self) -> "ModuleProjection":
        """``I - Q`` (matrix form)."""
        return ModuleProjection(self.shape, self.N, mats=[np.eye(m.shape[0]) - m for m in self.matrices()],
                                validate=False)

    def __repr__(self):
        kind = f"head={self.head}" if self.is_head else "matrix"
        return f"ModuleProjection(dims={self.shape.block_dims}, N={self.N}, {kind})"


def apply_projection(P: ModuleProjection, x: ModuleVector) -> ModuleVector:
    if P.shape != x.shape or P.N != x.N:
        raise ShapeMismatch("projection and vector dimensions differ")
    if P.is_head:
        data = []
        for a in x.data:
            b = a.copy()
            b[P.head:] = 0
            data.append(b)
        return ModuleVector(x.shape, x.N, data)
    return ModuleVector.from_stacked(x.shape, x.N, [m @ x.stacked(k) for k, m in enumerate(P.mats)])


def distance_to_range(P: ModuleProjection, x: ModuleVector) -> float:
    """``||x - Px||``, the exact distance from ``x`` to ``ran P``."""
    return vec_norm(x - apply_projection(P, x))


def tail_norm(x: ModuleVector, n: int) -> float:
    """``||(I - P_n) x||``."""
    if not 0 <= n <= x.N:
        raise ValueError(f"head index {n} outside 0..{x.N}")
    return max((float(np.linalg.norm(a[n:].reshape(-1, a.shape[2]), 2)) if n < x.N else 0.0)
               for a in x.data)


def head(x: ModuleVector, n: int) -> ModuleVector:
    return apply_projection(ModuleProjection(x.shape, x.N, head=n), x)


def block_part(x: ModuleVector, lo: int, hi: int) -> ModuleVector:
    """``P_hi (I - P_lo) x``: coordinates ``lo+1..hi`` kept, the rest zeroed."""
    data = []
    for a in x.data:
        b = np.zeros_like(a)
        b[lo:hi] = a[lo:hi]
        data.append(b)
    return ModuleVector(x.shape, x.N, data)


@dataclass(frozen=True)
class DirectSumContext:
    """``A^{N1} + A^{N2}`` identified with ``A^{N1+N2}`` by concatenation."""

    shape: AlgebraShape
    N1: int
    N2: int

    def __post_init__(self):
        if self.N1 < 1 or self.N2 < 1:
            raise ValueError("both summands need truncation >= 1")

    @property
    def N(self) -> int:
        return self.N1 + self.N2

    def _span(self, side: int) -> slice:
        if side == 1:
            return slice(0, self.N1)
        if side == 2:
            return slice(self.N1, self.N)
        raise ValueError(f"side must be 1 or 2, got {side!r}")

    def summand_size(self, side: int) -> int:
        return self.N1 if side == 1 else self.N2


def direct_sum_embed(ctx: DirectSumContext, side: int, x: ModuleVector) -> ModuleVector:
    """Inclusion ``J_side``."""
    span = ctx._span(side)
    if x.shape != ctx.shape or x.N != ctx.summand_size(side):
        raise ShapeMismatch("vector does not belong to this summand")
    data = []
    for d, a in zip(ctx.shape.block_dims, x.data):
        b = np.zeros((ctx.N, d, d), complex)
        b[span] = a
        data.append(b)
    return ModuleVector(ctx.shape, ctx.N, data)


def direct_sum_part(ctx: DirectSumContext, side: int, x: ModuleVector) -> ModuleVector:
    """Projection ``p_side`` onto a summand."""
    span = ctx._span(side)
    if x.shape != ctx.shape or x.N != ctx.N:
        raise ShapeMismatch("vector does not belong to the direct sum")
    return ModuleVector(ctx.shape, ctx.summand_size(side), [a[span] for a in x.data])


def random_vector(shape: AlgebraShape, N: int, seed=None, norm: float | None = None) -> ModuleVector:
    rng = np.random.default_rng(seed)
    data = [rng.standard_normal((N, d, d)) + 1j * rng.standard_normal((N, d, d)) for d in shape.block_dims]
    x = ModuleVector(shape, N, data)
    if norm is not None:
        x = x * (norm / vec_norm(x))
    return x


def random_projection(shape: AlgebraShape, N: int, seed=None, rank: int | Sequence[int] | None = None):
    """Projection onto a random subspace of each block space ``C^{N d_k}``."""
    rng = np.random.default_rng(seed)
    bases = []
    for k, d in enumerate(shape.block_dims):
        if rank is None:
            r = int(rng.integers(1, N * d))
        elif isinstance(rank, int):
            r = rank
        else:
            r = rank[k]
        bases.append(rng.standard_normal((N * d, r)) + 1j * rng.standard_normal((N * d, r)))
    return ModuleProjection.onto_columns(shape, N, bases)

