"""The GAP measure family on a finite-dimensional Hilbert space.

For a density matrix rho, three measures are built on top of each other:

* ``G(rho)`` -- the mean-zero complex Gaussian measure with covariance rho.
  In an eigenbasis of rho the coefficients are independent complex
  Gaussians with variances given by the eigenvalues; coefficients along
  the kernel vanish identically.
* ``GA(rho)`` -- the adjusted Gaussian, G(rho) reweighted by the squared
  norm: GA(dpsi) = ||psi||^2 G(dpsi).  Because the Gaussian's expected
  squared norm equals tr(rho) = 1, GA is again a probability measure.
* ``GAP(rho)`` -- the law of a GA sample projected to the unit sphere.
  Its covariance matrix is again rho.

GA is sampled exactly by a size-biased mixture: pick an eigendirection i
with probability p_i, draw coordinate i from the norm-square-biased complex
Gaussian of variance p_i (squared radius ~ Gamma(shape 2, scale p_i),
uniform phase), and draw every other coordinate unbiased.  This is O(d) per
draw with no rejection step; a rejection sampler is kept in the test suite
as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainccinv, gammaln

from .errors import DimensionError, DomainError, SingularDensityError
from .hilbert import DensityMatrix

__all__ = [
    "TailRadius",
    "sample_gaussian",
    "gaussian_density",
    "sample_adjusted_gaussian",
    "sample_gap",
    "gap_sphere_density",
    "tail_radius",
    "covariance_estimate",
    "log_sphere_area",
]

# Squared-norm component below this counts as lying outside the support.
SUPPORT_ATOL = 1e-8


@dataclass(frozen=True)
class TailRadius:
    """Radius R such that the Gaussian ball {||psi|| < R} carries all but
    epsilon of the adjusted mass, uniformly over covariances of trace one."""

    epsilon: float
    dim: int
    radius: float


def _gaussian_coefficients(rng, p: np.ndarray, n: int) -> np.ndarray:
    """(n, d) eigenbasis coefficients of G(rho) draws; kernel columns are 0."""
    scale = np.sqrt(p / 2.0)
    z = rng.standard_normal((n, p.size)) + 1j * rng.standard_normal((n, p.size))
    return z * scale


def sample_gaussian(rng: np.random.Generator, rho: DensityMatrix, size: int | None = None):
    """Draw from the complex Gaussian with mean 0 and covariance rho.

    Returns shape (d,) for size=None, else (size, d).  Draws are generally
    unnormalized; E||psi||^2 = 1.
    """
    n = 1 if size is None else int(size)
    p, v = rho.spectrum(), rho.eigenbasis()
    psi = _gaussian_coefficients(rng, p, n) @ v.T
    return psi[0] if size is None else psi


def gaussian_density(rho: DensityMatrix, psi: np.ndarray) -> float:
    """Lebesgue density of G(rho) on its support subspace, evaluated at psi.

    With d' the rank and rho+ the restriction of rho to its support, the
    value is exp(-<psi|rho+^{-1}|psi>) / (pi^{d'} det rho+).  Points with a
    component of squared norm above 1e-8 outside the support have density 0.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (rho.dim,):
        raise DimensionError(f"psi has shape {psi.shape}, expected ({rho.dim},)")
    p, v = rho.spectrum(), rho.eigenbasis()
    coeff = v.conj().T @ psi
    on = p > 0.0
    off_mass = float(np.sum(np.abs(coeff[~on]) ** 2))
    if off_mass > SUPPORT_ATOL:
        return 0.0
    quad = float(np.sum(np.abs(coeff[on]) ** 2 / p[on]))
    log_norm = rho.support_rank * np.log(np.pi) + np.sum(np.log(p[on]))
    return float(np.exp(-quad - log_norm))


def sample_adjusted_gaussian(rng: np.random.Generator, rho: DensityMatrix,
                             size: int | None = None):
    """Draw from the size-biased Gaussian GA(rho) = ||psi||^2 G(rho)(dpsi)."""
    n = 1 if size is None else int(size)
    p, v = rho.spectrum(), rho.eigenbasis()
    z = _gaussian_coefficients(rng, p, n)

    on = np.flatnonzero(p > 0.0)
    biased = on[rng.choice(on.size, size=n, p=p[on] / p[on].sum())]
    # Gamma(shape 2, scale p) as a sum of two exponentials: exact, and the
    # draw count per sample stays fixed.
    u = rng.random((n, 2))
    radius_sq = -np.log(u[:, 0] * u[:, 1]) * p[biased]
    phase = rng.random(n) * (2.0 * np.pi)
    z[np.arange(n), biased] = np.sqrt(radius_sq) * np.exp(1j * phase)

    psi = z @ v.T
    return psi[0] if size is None else psi


def sample_gap(rng: np.random.Generator, rho: DensityMatrix, size: int | None = None):
    """Draw unit vectors distributed according to GAP(rho)."""
    psi = sample_adjusted_gaussian(rng, rho, size=size)
    return psi / np.linalg.norm(psi, axis=-1, keepdims=size is not None)


def gap_sphere_density(rho: DensityMatrix, psi: np.ndarray):
    """Density of GAP(rho) at unit vector(s) psi, relative to the NORMALIZED
    uniform measure on the sphere.

    The value is d * <psi|rho^{-1}|psi>^{-(d+1)} / det(rho); it is constant 1
    when rho = I/d.  The same power law divided by the sphere surface area
    2 pi^d / (d-1)! is the density with respect to the unnormalized surface
    measure.  Requires all eigenvalues of rho strictly positive.

    Accepts a single vector (d,) or a batch (n, d); returns float or (n,).
    """
    p, v = rho.spectrum(), rho.eigenbasis()
    if rho.support_rank < rho.dim:
        raise SingularDensityError(
            "GAP sphere density requires a strictly positive spectrum"
        )
    psi = np.asarray(psi, dtype=complex)
    single = psi.ndim == 1
    batch = psi[None, :] if single else psi
    if batch.shape[-1] != rho.dim:
        raise DimensionError(f"psi dimension {batch.shape[-1]} != {rho.dim}")
    coeff = batch @ v.conj()
    quad = np.sum(np.abs(coeff) ** 2 / p, axis=-1)
    d = rho.dim
    log_val = np.log(d) - np.sum(np.log(p)) - (d + 1) * np.log(quad)
    out = np.exp(log_val)
    return float(out[0]) if single else out


def tail_radius(epsilon: float, d: int) -> TailRadius:
    """Smallest R with E[S ; S < R^2] > d - epsilon for S ~ Gamma(d, 1).

    S is the squared norm of a standard complex Gaussian vector in C^d, the
    worst case over all trace-one covariances; hence for every density
    matrix rho the adjusted mass of {||psi|| < R} under G(rho) exceeds
    1 - epsilon.  Solved on the regularized upper incomplete gamma.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    # E[S ; S < x] = d * P(d+1, x), so the condition is Q(d+1, x) < eps/d.
    x = float(gammainccinv(d + 1, epsilon / d))
    return TailRadius(epsilon=epsilon, dim=d, radius=float(np.sqrt(x)))


def covariance_estimate(samples) -> np.ndarray:
    """Empirical covariance (1/N) sum |psi><psi| of a batch of vectors.

    ``samples`` is an (N, d) array or a sequence of length-d vectors.  The
    result is Hermitian by construction; it has trace 1 when the samples are
    normalized.
    """
    arr = np.asarray(samples, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("need a nonempty batch of equal-length vectors")
    return arr.T @ arr.conj() / arr.shape[0]


def log_sphere_area(d: int) -> float:
    """log of the surface area 2 pi^d / (d-1)! of the unit sphere in C^d."""
    return float(np.log(2.0) + d * np.log(np.pi) - gammaln(d))
