"""Bipartite state utilities: index convention, Schmidt machinery, reductions.

Both subsystems have the same local dimension ``d``.  The composite basis
label is ``k = a*d + b`` for the product vector |a>_A |b>_B (A-major
ordering).  Every module in this package relies on this single convention;
in particular ``np.kron(op_A, op_B)`` matches it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NORM_TOL",
    "HERM_TOL",
    "TRACE_TOL",
    "MIN_EIG_TOL",
    "SchmidtDecomposition",
    "as_rng",
    "check_dim",
    "check_state",
    "check_density",
    "pure_from_schmidt",
    "schmidt_of",
    "density_of",
    "partial_trace",
    "purity",
    "haar_unitary",
    "haar_state",
    "overlap_phase_free",
]

NORM_TOL = 1e-12      # pure-state normalization
HERM_TOL = 1e-12      # hermiticity of density matrices
TRACE_TOL = 1e-10     # unit trace of density matrices
MIN_EIG_TOL = -1e-8   # smallest admissible eigenvalue of a density matrix

_SIDES = ("A", "B")


def as_rng(rng) -> np.random.Generator:
    """Coerce an int seed / None / Generator into a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def check_dim(d) -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 2:
        raise ValueError(f"local dimension must be an integer >= 2, got {d!r}")
    return int(d)


def _infer_dim(n: int) -> int:
    d = round(np.sqrt(n))
    if d * d != n:
        raise ValueError(f"length {n} is not a perfect square d*d")
    return check_dim(d)


def check_state(psi, d: int | None = None) -> tuple[np.ndarray, int]:
    """Validate a pure-state amplitude vector, return (amps, d)."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    d = _infer_dim(psi.size) if d is None else check_dim(d)
    if psi.size != d * d:
        raise ValueError(f"state has length {psi.size}, expected {d * d}")
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ValueError("zero vector is not a state")
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"state norm {nrm} deviates from 1 beyond {NORM_TOL}")
    return psi, d


def check_density(rho, d: int | None = None, psd: bool = False) -> tuple[np.ndarray, int]:
    """Validate a density matrix (hermitian, unit trace, optionally PSD)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    d = _infer_dim(rho.shape[0]) if d is None else check_dim(d)
    if rho.shape[0] != d * d:
        raise ValueError(f"density matrix has size {rho.shape[0]}, expected {d * d}")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > HERM_TOL:
        raise ValueError(f"density matrix not hermitian (error {herm_err:.3e})")
    tr_err = abs(np.trace(rho).real - 1.0)
    if tr_err > TRACE_TOL:
        raise ValueError(f"density matrix trace deviates from 1 by {tr_err:.3e}")
    if psd:
        lo = float(np.linalg.eigvalsh(rho)[0])
        if lo < MIN_EIG_TOL:
            raise ValueError(f"density matrix min eigenvalue {lo:.3e} below {MIN_EIG_TOL}")
    return rho, d


def _check_unitary(u: np.ndarray, d: int, what: str) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (d, d):
        raise ValueError(f"{what} must be {d}x{d}, got {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if err > 1e-10:
        raise ValueError(f"{what} is not unitary (error {err:.3e})")
    return u


def check_simplex(lambdas, d: int | None = None) -> np.ndarray:
    """Validate a probability vector of Schmidt coefficients."""
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if d is not None and lam.size != d:
        raise ValueError(f"expected {d} coefficients, got {lam.size}")
    if lam.size < 1:
        raise ValueError("empty coefficient vector")
    if lam.min() < -1e-12:
        raise ValueError(f"negative Schmidt coefficient {lam.min():.3e}")
    if abs(lam.sum() - 1.0) > 1e-10:
        raise ValueError(f"coefficients sum to {lam.sum()}, expected 1")
    return np.clip(lam, 0.0, None)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt data of a bipartite pure state.

    ``lambdas`` are the squared singular values in descending order (they
    sum to one); ``basis_a[:, i]`` / ``basis_b[:, i]`` are the local basis
    vectors of the i-th Schmidt pair.  Downstream code must depend only on
    ``lambdas``: for degenerate coefficients the bases are not unique.
    """

    lambdas: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    @property
    def dim(self) -> int:
        return self.lambdas.size


def pure_from_schmidt(lambdas, basis_a, basis_b) -> np.ndarray:
    """Assemble sum_i sqrt(lambda_i) |basis_a_i> ⊗ |basis_b_i>, normalized."""
    lam = check_simplex(lambdas)
    d = lam.size
    check_dim(d)
    ua = _check_unitary(basis_a, d, "basis_a")
    ub = _check_unitary(basis_b, d, "basis_b")
    psi = np.einsum("i,ai,bi->ab", np.sqrt(lam), ua, ub).reshape(-1)
    return psi / np.linalg.norm(psi)


def schmidt_of(psi, d: int | None = None) -> SchmidtDecomposition:
    """Schmidt decomposition via SVD of the d x d amplitude matrix."""
    psi, d = check_state(psi, d)
    u, s, vh = np.linalg.svd(psi.reshape(d, d))
    # psi_ab = sum_i u[a,i] s_i vh[i,b]: the B-side basis vectors are the
    # rows of vh (not conjugated).
    return SchmidtDecomposition(lambdas=s * s, basis_a=u, basis_b=vh.T)


def density_of(psi, d: int | None = None) -> np.ndarray:
    """Rank-one projector |psi><psi|."""
    psi, _ = check_state(psi, d)
    return np.outer(psi, psi.conj())


def partial_trace(rho, side: str, d: int | None = None) -> np.ndarray:
    """Reduced d x d state of the kept subsystem (``side`` in {"A", "B"})."""
    rho, d = check_density(rho, d)
    t = rho.reshape(d, d, d, d)
    if side == "A":
        return np.einsum("abcb->ac", t)
    if side == "B":
        return np.einsum("abae->be", t)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def purity(rho, d: int | None = None) -> float:
    """Tr rho^2."""
    rho, _ = check_density(rho, d)
    return float(np.einsum("ij,ji->", rho, rho).real)


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed d x d unitary (QR of a Ginibre matrix, phase-fixed)."""
    d = check_dim(d)
    rng = as_rng(rng)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_state(n: int, rng) -> np.ndarray:
    """Haar-random pure state on an n-dimensional space (normalized Ginibre)."""
    rng = as_rng(rng)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def overlap_phase_free(psi, phi) -> float:
    """|<psi|phi>|, the global-phase-insensitive overlap."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    return float(abs(np.vdot(psi, phi)))
