"""Finite-dimensional complex linear algebra: states, density matrices,
tensor structure, partial operations, Schmidt decomposition, norms.

Conventions
-----------
State vectors are plain 1-D complex numpy arrays.  A bipartite state on
C^{d1} (x) C^{d2} stores its amplitudes row-major: ``amplitude(i, j) =
amplitudes[i * d2 + j]`` with ``i`` indexing system 1 and ``j`` system 2,
i.e. ``amplitudes.reshape(d1, d2)`` has system-1 rows.  Collections of
vectors (bases, orthonormal systems, sample batches) are 2-D arrays whose
ROWS are the vectors.

All operations are pure; returned objects are never mutated afterwards and
may be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedShapeError

__all__ = [
    "NORM_ATOL",
    "HERMITIAN_ATOL",
    "EIGENVALUE_FLOOR",
    "DensityMatrix",
    "BipartiteState",
    "SchmidtDecomposition",
    "normalize",
    "partial_inner",
    "reduced_density_matrix",
    "schmidt",
    "trace_norm",
    "canonical_density",
]

NORM_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10
# Eigenvalues in [-EIGENVALUE_FLOOR, 0) are treated as roundoff and clipped
# to zero; anything more negative is a hard error.
EIGENVALUE_FLOOR = 1e-10
# Below this an eigenvalue counts as an exact zero (kernel direction).
KERNEL_CUTOFF = 1e-12


def normalize(v: np.ndarray) -> np.ndarray:
    """v / ||v||, raising on the zero vector."""
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DomainError("cannot normalize the zero vector")
    return np.asarray(v, dtype=complex) / n


class DensityMatrix:
    """Hermitian positive-semidefinite trace-one complex matrix.

    Validation: Hermiticity and unit trace within 1e-10 are required;
    eigenvalues in [-1e-10, 0) are clipped to zero and the spectrum is
    renormalized, while larger violations raise.  The eigendecomposition is
    computed once and cached, so repeated sampling against the same matrix
    always uses one fixed eigenbasis.
    """

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] < 1:
            raise DimensionError("density matrix must have positive dimension")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_ATOL:
            raise DomainError("matrix is not Hermitian within 1e-10")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_ATOL:
            raise DomainError(f"trace must be 1 within 1e-10, got {tr!r}")
        self._matrix = (m + m.conj().T) / 2.0
        self._matrix.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @cached_property
    def _eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        p, v = np.linalg.eigh(self._matrix)
        if p[0] < -EIGENVALUE_FLOOR:
            raise DomainError(f"eigenvalue {p[0]!r} below -1e-10; matrix is not PSD")
        p = np.where(p < KERNEL_CUTOFF, 0.0, p)
        p = p / p.sum()
        order = np.argsort(-p, kind="stable")  # descending, ties keep eigh order
        return p[order], v[:, order]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, descending, clipped to [0, 1] and summing to 1."""
        return self._eigensystem[0]

    def eigenbasis(self) -> np.ndarray:
        """Unitary whose COLUMNS are eigenvectors matching ``spectrum()``."""
        return self._eigensystem[1]

    @property
    def support_rank(self) -> int:
        return int(np.count_nonzero(self.spectrum() > 0.0))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.spectrum()[-1])

    @classmethod
    def from_spectrum(cls, spectrum, basis: np.ndarray | None = None) -> "DensityMatrix":
        """Density matrix with the given eigenvalues; ``basis`` columns are the
        eigenvectors (computational basis if omitted)."""
        p = np.asarray(spectrum, dtype=float)
        if basis is None:
            return cls(np.diag(p).astype(complex))
        return cls(basis @ np.diag(p).astype(complex) @ basis.conj().T)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=complex) / d)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class BipartiteState:
    """Normalized state on C^{d1} (x) C^{d2} with row-major amplitudes."""

    d1: int
    d2: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if self.d1 < 1 or self.d2 < 1:
            raise DimensionError("factor dimensions must be positive")
        if amps.shape != (self.d1 * self.d2,):
            raise DimensionError(
                f"amplitudes must have shape ({self.d1 * self.d2},), got {amps.shape}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > NORM_ATOL:
            raise DomainError("bipartite state must be normalized within 1e-10")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.d1 * self.d2

    def as_matrix(self) -> np.ndarray:
        """(d1, d2) coefficient matrix M with M[i, j] = amplitude(i, j)."""
        return self.amplitudes.reshape(self.d1, self.d2)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "BipartiteState":
        m = np.asarray(m, dtype=complex)
        return cls(m.shape[0], m.shape[1], m.reshape(-1))

    @classmethod
    def product(cls, chi: np.ndarray, phi: np.ndarray) -> "BipartiteState":
        """The product state chi (x) phi."""
        return cls.from_matrix(np.outer(chi, phi))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """psi = sum_i coefficients[i] * left_vectors[i] (x) right_vectors[i],
    with nonnegative coefficients in descending order and orthonormal rows
    on both sides."""

    coefficients: np.ndarray
    left_vectors: np.ndarray   # (k, d1) rows
    right_vectors: np.ndarray  # (k, d2) rows

    def reconstruct(self) -> BipartiteState:
        m = (self.left_vectors.T * self.coefficients) @ self.right_vectors
        return BipartiteState.from_matrix(m)


def partial_inner(psi: BipartiteState, b: np.ndarray) -> np.ndarray:
    """Partial inner product <b|psi> taken in the second factor.

    Returns the (generally unnormalized) vector v in C^{d1} with
    v[i] = sum_j conj(b[j]) * amplitude(i, j).
    """
    b = np.asarray(b, dtype=complex)
    if b.shape != (psi.d2,):
        raise DimensionError(f"basis vector has shape {b.shape}, expected ({psi.d2},)")
    return psi.as_matrix() @ b.conj()


def reduced_density_matrix(psi: BipartiteState) -> DensityMatrix:
    """Partial trace over the second factor, as a validated DensityMatrix."""
    m = psi.as_matrix()
    return DensityMatrix(m @ m.conj().T)


def schmidt(psi: BipartiteState) -> SchmidtDecomposition:
    """Schmidt decomposition via SVD of the coefficient matrix.

    Requires d1 <= d2.  The squared coefficients are the eigenvalues of the
    reduced density matrix; ties are resolved by the deterministic SVD
    output order.
    """
    if psi.d1 > psi.d2:
        raise UnsupportedShapeError(
            f"schmidt requires d1 <= d2, got d1={psi.d1}, d2={psi.d2}"
        )
    u, s, vh = np.linalg.svd(psi.as_matrix(), full_matrices=False)
    return SchmidtDecomposition(coefficients=s, left_vectors=u.T, right_vectors=vh)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values of a square complex matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"trace norm needs a square matrix, got shape {m.shape}")
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def canonical_density(h1_eigenvalues, beta: float) -> DensityMatrix:
    """Thermal density matrix diag(exp(-beta*E_i) / Z) in the given eigenbasis.

    Exponentials are max-shifted so that inverse temperatures up to ~1e3 do
    not overflow.
    """
    energies = np.asarray(h1_eigenvalues, dtype=float)
    if energies.size == 0:
        raise DomainError("eigenvalue list must be nonempty")
    if not np.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    logw = -beta * energies
    logw -= logw.max()
    w = np.exp(logw)
    return DensityMatrix(np.diag(w / w.sum()).astype(complex))
