"""Finite-dimensional C*-algebras ``M_{d_1} + ... + M_{d_K}``.

Elements are stored as tuples of complex square blocks.  States are block
density matrices, so ``phi(a) = sum_k tr(rho_k a_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class ShapeMismatch(ValueError):
    pass


class NotNormal(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraShape:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"block dims must be a nonempty list of positive ints, got {self.block_dims!r}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def of(cls, *dims: int) -> "AlgebraShape":
        return cls(tuple(dims))

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dimension(self) -> int:
        """Complex dimension of the algebra."""
        return sum(d * d for d in self.block_dims)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((d, d), complex) for d in self.block_dims))

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(d, dtype=complex) for d in self.block_dims))

    def scalar(self, c: complex) -> "AlgebraElement":
        return AlgebraElement(self, tuple(c * np.eye(d, dtype=complex) for d in self.block_dims))


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


class AlgebraElement:
    """Element of a block-diagonal matrix algebra.  Immutable."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape, blocks: Sequence[np.ndarray]):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != shape.n_blocks:
            raise ShapeMismatch(f"expected {shape.n_blocks} blocks, got {len(blocks)}")
        for d, b in zip(shape.block_dims, blocks):
            if b.shape != (d, d):
                raise ShapeMismatch(f"block of shape {b.shape} does not fit dimension {d}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def scalar(cls, value: complex) -> "AlgebraElement":
        """Element of the one-dimensional algebra C."""
        return cls(AlgebraShape((1,)), (np.array([[value]]),))

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            raise ShapeMismatch("algebra elements have different shapes")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return alg_mul(self, other)
        return AlgebraElement(self.shape, [other * a for a in self.blocks])

    def __rmul__(self, c):
        return AlgebraElement(self.shape, [c * a for a in self.blocks])

    @property
    def H(self) -> "AlgebraElement":
        return alg_adjoint(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        return f"AlgebraElement(dims={self.shape.block_dims}, blocks={[b.tolist() for b in self.blocks]})"


def element(shape: AlgebraShape, *blocks) -> AlgebraElement:
    return AlgebraElement(shape, [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks])


def alg_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.shape, [x @ y for x, y in zip(a.blocks, b.blocks)])


def alg_adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.shape, [x.conj().T for x in a.blocks])


def alg_norm(a: AlgebraElement) -> float:
    """C*-norm: largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in a.blocks)


def is_hermitian(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    return all(np.max(np.abs(b - b.conj().T), initial=0.0) <= tol for b in a.blocks)


def min_eigenvalue(a: AlgebraElement) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    return min(float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in a.blocks)


def is_positive(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    return is_hermitian(a, tol) and min_eigenvalue(a) >= -tol


def normality_defect(a: AlgebraElement) -> float:
    return max(float(np.max(np.abs(b @ b.conj().T - b.conj().T @ b), initial=0.0)) for b in a.blocks)


def is_unitary(u: AlgebraElement, tol: float = 1e-10) -> bool:
    for b in u.blocks:
        eye = np.eye(b.shape[0])
        if np.max(np.abs(b.conj().T @ b - eye)) > tol or np.max(np.abs(b @ b.conj().T - eye)) > tol:
            return False
    return True


class State:
    """Positive unit-trace functional ``a -> sum_k tr(rho_k a_k)``."""

    __slots__ = ("shape", "densities")

    def __init__(self, shape: AlgebraShape, densities: Sequence[np.ndarray], tol: float = DEFAULT_TOL):
        dens = tuple(_frozen(r) for r in densities)
        if len(dens) != shape.n_blocks:
            raise ShapeMismatch(f"expected {shape.n_blocks} densities, got {len(dens)}")
        total = 0.0
        for d, r in zip(shape.block_dims, dens):
            if r.shape != (d, d):
                raise ShapeMismatch(f"density of shape {r.shape} does not fit dimension {d}")
            if np.max(np.abs(r - r.conj().T)) > tol:
                raise ValueError("density is not Hermitian")
            if np.linalg.eigvalsh((r + r.conj().T) / 2)[0] < -tol:
                raise ValueError("density is not positive semidefinite")
            total += np.trace(r).real
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"densities have total trace {total!r}, expected 1")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "densities", dens)

    def __setattr__(self, name, value):
        raise AttributeError("State is immutable")

    def __call__(self, a: AlgebraElement) -> complex:
        if a.shape != self.shape:
            raise ShapeMismatch("state and element have different shapes")
        # tr(rho a) = sum_ij rho_ij a_ji
        return complex(sum(np.sum(r * b.T) for r, b in zip(self.densities, a.blocks)))

    @classmethod
    def vector(cls, shape: AlgebraShape, block: int, v) -> "State":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        dens = [np.zeros((d, d), complex) for d in shape.block_dims]
        dens[block] = np.outer(v, v.conj())
        return cls(shape, _unit_trace(dens))

    @classmethod
    def tracial(cls, shape: AlgebraShape) -> "State":
        """Normalized trace over the whole algebra."""
        n = sum(shape.block_dims)
        return cls(shape, _unit_trace([np.eye(d, dtype=complex) / n for d in shape.block_dims]))

    def __repr__(self):
        return f"State(dims={self.shape.block_dims})"


def _unit_trace(dens):
    # exact renormalization so the 1e-12 trace contract holds after rounding
    total = sum(np.trace(r).real for r in dens)
    return [r / total for r in dens]


def random_state(shape: AlgebraShape, seed=None, rank: int | None = None) -> State:
    rng = np.random.default_rng(seed)
    dens = []
    for d in shape.block_dims:
        k = d if rank is None else min(rank, d)
        g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
        dens.append(g @ g.conj().T)
    return State(shape, _unit_trace(dens))


def norming_state(a: AlgebraElement, tol: float = DEFAULT_TOL) -> State:
    """Vector state attaining the norm of a normal element.

    Eigendecomposes the block attaining ``alg_norm(a)`` and takes the
    eigenvector of largest-modulus eigenvalue.  Ties go to the lowest block,
    then the lowest eigenvector index.
    """
    defect = normality_defect(a)
    if defect > tol:
        raise NotNormal(f"element is not normal: ||aa* - a*a|| = {defect:.3e} > {tol:.1e}")
    best = None
    for k, b in enumerate(a.blocks):
        if is_hermitian_block(b, tol):
            vals, vecs = np.linalg.eigh((b + b.conj().T) / 2)
        else:
            vals, vecs = _normal_eig(b)
        mods = np.abs(vals)
        j = int(np.argmax(mods))
        if best is None or mods[j] > best[0] + tol:
            best = (float(mods[j]), k, vecs[:, j])
    _, k, v = best
    return State.vector(a.shape, k, v)


def is_hermitian_block(b: np.ndarray, tol: float) -> bool:
    return np.max(np.abs(b - b.conj().T), initial=0.0) <= tol


def _normal_eig(b: np.ndarray):
    # Schur form of a normal matrix is diagonal with unitary Schur vectors,
    # which keeps eigenvectors orthonormal even for repeated eigenvalues.
    import scipy.linalg

    t, z = scipy.linalg.schur(b, output="complex")
    return np.diag(t), z


def random_element(shape: AlgebraShape, seed=None, scale: float = 1.0) -> AlgebraElement:
    rng = np.random.default_rng(seed)
    return AlgebraElement(
        shape,
        [scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) for d in shape.block_dims],
    )


def random_hermitian(shape: AlgebraShape, seed=None) -> AlgebraElement:
    a = random_element(shape, seed)
    return AlgebraElement(shape, [(b + b.conj().T) / 2 for b in a.blocks])


def random_unitary(shape: AlgebraShape, seed=None) -> AlgebraElement:
    """Haar-random unitary in each block (QR with phase correction)."""
    rng = np.random.default_rng(seed)
    blocks = []
    for d in shape.block_dims:
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(z)
        ph = np.diag(r) / np.abs(np.diag(r))
        blocks.append(q * ph)
    return AlgebraElement(shape, blocks)


def random_normal(shape: AlgebraShape, seed=None) -> AlgebraElement:
    """Normal element ``U diag(z) U*`` with random complex spectrum."""
    rng = np.random.default_rng(seed)
    u = random_unitary(shape, rng)
    blocks = []
    for d, q in zip(shape.block_dims, u.blocks):
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        blocks.append((q * z) @ q.conj().T)
    return AlgebraElement(shape, blocks)
