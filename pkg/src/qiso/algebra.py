"""Direct sums of complex matrix blocks: elements, states, positivity.

An element is a tuple of complex block matrices.  The canonical basis is
the family of matrix units, enumerated block by block in row-major order;
an element's coefficient vector with respect to that basis is just its
entries flattened, which keeps conversions trivial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .errors import QisoError, ShapeMismatch


class BadVector(QisoError):
    pass


@dataclass(frozen=True)
class FinDimCStarAlgebra:
    """A direct sum of full matrix blocks of the given sizes."""

    blocks: Tuple[int, ...]

    def __post_init__(self):
        if not self.blocks or any(b < 1 for b in self.blocks):
            raise ShapeMismatch("block sizes must be positive")

    @property
    def dim(self) -> int:
        return sum(b * b for b in self.blocks)

    @property
    def offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for b in self.blocks:
            out.append(acc)
            acc += b * b
        return tuple(out)

    def index_of(self, k: int, i: int, j: int) -> int:
        """Basis index of the matrix unit E_ij in block k."""
        return self.offsets[k] + i * self.blocks[k] + j

    def zero(self) -> "AlgElement":
        return AlgElement(self, tuple(np.zeros((b, b), dtype=complex)
                                      for b in self.blocks))

    def unit(self) -> "AlgElement":
        return AlgElement(self, tuple(np.eye(b, dtype=complex)
                                      for b in self.blocks))

    def from_vec(self, vec) -> "AlgElement":
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (self.dim,):
            raise ShapeMismatch(f"vector of length {vec.shape}, need {self.dim}")
        data = []
        for off, b in zip(self.offsets, self.blocks):
            data.append(vec[off:off + b * b].reshape(b, b).copy())
        return AlgElement(self, tuple(data))

    def basis_element(self, idx: int) -> "AlgElement":
        vec = np.zeros(self.dim, dtype=complex)
        vec[idx] = 1.0
        return self.from_vec(vec)


class AlgElement:
    """An element of a block algebra; immutable by convention."""

    __slots__ = ("owner", "data")

    def __init__(self, owner: FinDimCStarAlgebra, data: Sequence[np.ndarray]):
        if len(data) != len(owner.blocks):
            raise ShapeMismatch("wrong number of blocks")
        for m, b in zip(data, owner.blocks):
            if m.shape != (b, b):
                raise ShapeMismatch(f"block shape {m.shape}, need ({b},{b})")
        self.owner = owner
        self.data = tuple(np.asarray(m, dtype=complex) for m in data)

    def vec(self) -> np.ndarray:
        return np.concatenate([m.ravel() for m in self.data])

    def __add__(self, other: "AlgElement") -> "AlgElement":
        return AlgElement(self.owner, tuple(a + b for a, b in zip(self.data, other.data)))

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        return AlgElement(self.owner, tuple(a - b for a, b in zip(self.data, other.data)))

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            return AlgElement(self.owner, tuple(a @ b for a, b in zip(self.data, other.data)))
        return AlgElement(self.owner, tuple(complex(other) * a for a in self.data))

    def __rmul__(self, scalar) -> "AlgElement":
        return AlgElement(self.owner, tuple(complex(scalar) * a for a in self.data))

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.owner, tuple(-a for a in self.data))

    def star(self) -> "AlgElement":
        return AlgElement(self.owner, tuple(a.conj().T for a in self.data))

    def norm(self) -> float:
        """Operator norm: the largest block spectral norm."""
        out = 0.0
        for m in self.data:
            if m.shape == (1, 1):
                out = max(out, abs(m[0, 0]))
            else:
                out = max(out, float(np.linalg.norm(m, 2)))
        return out

    def is_projection(self, tol: float = 1e-9) -> bool:
        return ((self * self) - self).norm() <= tol and (self.star() - self).norm() <= tol

    def min_eig(self) -> float:
        """Smallest eigenvalue over blocks; meaningful for self-adjoint elements."""
        return min(float(np.linalg.eigvalsh(m)[0]) for m in self.data)

    def max_eig(self) -> float:
        return max(float(np.linalg.eigvalsh(m)[-1]) for m in self.data)


def hermitian_max_eig(mat: np.ndarray) -> float:
    if mat.shape == (1, 1):
        return float(mat[0, 0].real)
    return float(np.linalg.eigvalsh(mat)[-1])


# ---------------------------------------------------------------------------
# exact positivity for rational self-adjoint blocks

def _det_fraction(M) -> Fraction:
    """Fraction-exact determinant by Gaussian elimination."""
    M = [row[:] for row in M]
    m = len(M)
    det = Fraction(1)
    for col in range(m):
        pivot = next((r for r in range(col, m) if M[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, m):
            factor = M[r][col] / M[col][col]
            for c in range(col, m):
                M[r][c] -= factor * M[col][c]
    return det


def exact_psd(elem: AlgElement) -> bool:
    """Exact semidefiniteness test for elements with rational entries.

    Complex Hermitian blocks embed into real symmetric ones of doubled
    size; a symmetric matrix is PSD iff all principal minors are >= 0.
    Floats are converted exactly (every float is a binary rational), so
    this decides positivity of the stored matrices with no tolerance.
    """
    for mat in elem.data:
        b = mat.shape[0]
        if np.allclose(mat.imag, 0.0, atol=0.0):
            real = [[Fraction(float(mat[i, j].real)) for j in range(b)]
                    for i in range(b)]
        else:
            real = [[Fraction(0)] * (2 * b) for _ in range(2 * b)]
            for i in range(b):
                for j in range(b):
                    re = Fraction(float(mat[i, j].real))
                    im = Fraction(float(mat[i, j].imag))
                    real[i][j] = re
                    real[b + i][b + j] = re
                    real[i][b + j] = -im
                    real[b + i][j] = im
        m = len(real)
        for size in range(1, m + 1):
            for subset in itertools.combinations(range(m), size):
                minor = [[real[i][j] for j in subset] for i in subset]
                if _det_fraction(minor) < 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# states and general functionals

class StateFunctional:
    """A linear functional a -> sum_k tr(rho_k a_k); a state when every
    rho_k is PSD and the traces sum to 1."""

    __slots__ = ("owner", "densities")

    def __init__(self, owner: FinDimCStarAlgebra, densities: Sequence[np.ndarray]):
        if len(densities) != len(owner.blocks):
            raise ShapeMismatch("wrong number of density blocks")
        self.owner = owner
        self.densities = tuple(np.asarray(m, dtype=complex) for m in densities)

    def value(self, elem: AlgElement) -> complex:
        return complex(sum(np.trace(rho @ a) for rho, a in
                           zip(self.densities, elem.data)))

    def as_vector(self) -> np.ndarray:
        """psi(b_alpha) over the matrix-unit basis: tr(rho E_ij) = rho[j, i]."""
        return np.concatenate([rho.T.ravel() for rho in self.densities])

    @staticmethod
    def from_vector(owner: FinDimCStarAlgebra, vec) -> "StateFunctional":
        vec = np.asarray(vec, dtype=complex)
        densities = []
        for off, b in zip(owner.offsets, owner.blocks):
            densities.append(vec[off:off + b * b].reshape(b, b).T.copy())
        return StateFunctional(owner, tuple(densities))

    def is_state(self, tol: float = 1e-9) -> bool:
        total = 0.0
        for rho in self.densities:
            if np.linalg.norm(rho - rho.conj().T) > tol:
                return False
            if np.linalg.eigvalsh(rho)[0] < -tol:
                return False
            total += float(np.trace(rho).real)
        return abs(total - 1.0) <= tol


def random_state(algebra: FinDimCStarAlgebra, seed: int) -> StateFunctional:
    """Full-support sampler: Ginibre-normalized block densities with
    Dirichlet block weights.  Deterministic in the seed."""
    rng = np.random.default_rng(seed)
    weights = rng.gamma(1.0, size=len(algebra.blocks))
    weights /= weights.sum()
    densities = []
    for w, b in zip(weights, algebra.blocks):
        G = rng.normal(size=(b, b)) + 1j * rng.normal(size=(b, b))
        rho = G @ G.conj().T
        densities.append(w * rho / np.trace(rho))
    return StateFunctional(algebra, tuple(densities))


def extreme_state(algebra: FinDimCStarAlgebra, block: int, xi) -> StateFunctional:
    """The vector state on one block; on a 1x1 block, its character."""
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (algebra.blocks[block],):
        raise BadVector(f"vector length {xi.shape} for block size "
                        f"{algebra.blocks[block]}")
    if abs(np.linalg.norm(xi) - 1.0) > 1e-9:
        raise BadVector("vector state needs a unit vector")
    densities = [np.zeros((b, b), dtype=complex) for b in algebra.blocks]
    densities[block] = np.outer(xi, xi.conj())
    return StateFunctional(algebra, tuple(densities))
