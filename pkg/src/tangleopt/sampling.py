"""Random pure states with an exactly prescribed tangle.

Schmidt coefficients with tangle tau0 live on the intersection of the
probability simplex with the sphere sum(lambda^2) = 1 - tau0/2.  The
sampler draws an isotropic direction u in the zero-sum hyperplane, solves
lambda = centroid + t*u with t >= 0 for the sphere radius, and rejects
draws with a negative component.  This "isotropic-direction, radial-solve"
ensemble is fixed for reproducibility; it is *not* claimed uniform on the
constraint manifold.

Rejection cannot occur once the sphere slice lies inside the simplex
(tau0 >= 2(d-2)/(d-1)); for smaller tau0 the loop is capped at 10^4 draws
per sample.  tau0 = 0 degenerates the slice to the simplex vertices, so a
vertex is drawn directly.
"""

from __future__ import annotations

import numpy as np

from .linalg import as_rng, check_dim, haar_unitary, pure_from_schmidt
from .tangle import tangle_max

__all__ = [
    "SamplingError",
    "InfeasibleTangle",
    "schmidt_with_tangle",
    "schmidt_with_tangle_batch",
    "state_with_tangle",
]

MAX_TRIES = 10_000


class SamplingError(RuntimeError):
    """Raised when the rejection loop exhausts its cap."""


class InfeasibleTangle(ValueError):
    """tau0 outside [0, 2(d-1)/d] cannot be realized at dimension d."""


def _radius(tau0: float, d: int) -> float:
    if tau0 < -1e-12:
        raise InfeasibleTangle(f"tangle must be >= 0, got {tau0}")
    if tau0 > tangle_max(d) + 1e-12:
        raise InfeasibleTangle(
            f"tangle {tau0} exceeds the pure-state maximum {tangle_max(d)} at d={d}")
    t2 = (1.0 - tau0 / 2.0) - 1.0 / d
    return float(np.sqrt(max(t2, 0.0)))


def schmidt_with_tangle(tau0: float, d: int, rng) -> np.ndarray:
    """One Schmidt vector with tangle_pure(lambda) = tau0 exactly."""
    d = check_dim(d)
    rng = as_rng(rng)
    t = _radius(tau0, d)
    if tau0 <= 1e-14:
        # Zero tangle: the sphere slice touches the simplex only at its
        # vertices, so draw one directly instead of rejecting forever.
        lam = np.zeros(d)
        lam[rng.integers(d)] = 1.0
        return lam
    centroid = np.full(d, 1.0 / d)
    if t == 0.0:
        return centroid
    for _ in range(MAX_TRIES):
        w = rng.standard_normal(d)
        u = w - w.mean()
        nrm = np.linalg.norm(u)
        if nrm < 1e-12:
            continue
        lam = centroid + (t / nrm) * u
        if lam.min() >= 0.0:
            return lam
    raise SamplingError(
        f"no admissible sample within {MAX_TRIES} draws (tau0={tau0}, d={d})")


def schmidt_with_tangle_batch(tau0: float, d: int, rng, count: int) -> np.ndarray:
    """``count`` samples at once, with vectorized rejection (same ensemble)."""
    d = check_dim(d)
    rng = as_rng(rng)
    if count < 1:
        raise ValueError("count must be >= 1")
    t = _radius(tau0, d)
    if tau0 <= 1e-14:
        out = np.zeros((count, d))
        out[np.arange(count), rng.integers(d, size=count)] = 1.0
        return out
    if t == 0.0:
        return np.full((count, d), 1.0 / d)
    rows = []
    have = 0
    draws = 0
    while have < count:
        m = max(256, 2 * (count - have))
        if draws > MAX_TRIES * count + m:
            raise SamplingError(
                f"no admissible batch within {draws} draws (tau0={tau0}, d={d})")
        draws += m
        w = rng.standard_normal((m, d))
        u = w - w.mean(axis=1, keepdims=True)
        nrm = np.linalg.norm(u, axis=1)
        ok = nrm > 1e-12
        lam = 1.0 / d + (t / nrm[ok, None]) * u[ok]
        lam = lam[lam.min(axis=1) >= 0.0]
        if lam.size:
            rows.append(lam[: count - have])
            have += rows[-1].shape[0]
    return np.vstack(rows)


def state_with_tangle(tau0: float, d: int, rng) -> np.ndarray:
    """Random pure state of exact tangle tau0 in Haar-random local bases.

    Consumes the stream in a fixed order: Schmidt coefficients, then the
    A-side basis, then the B-side basis.
    """
    rng = as_rng(rng)
    lam = schmidt_with_tangle(tau0, d, rng)
    basis_a = haar_unitary(d, rng)
    basis_b = haar_unitary(d, rng)
    return pure_from_schmidt(lam, basis_a, basis_b)
