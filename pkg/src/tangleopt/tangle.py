"""Duplicated-space tangle estimator and its time derivative.

The estimator acts on two copies of the bipartite system, stored in the
order (A, B, A', B') with the flat index ``k = ((a*d + b)*d + a2)*d + b2``.
It is assembled from the projectors onto the antisymmetric / symmetric
subspaces of the copy pairs (A, A') and (B, B') and normalized so that

    estimate(|psi><psi|) = 2 * (1 - sum_i lambda_i^2)

equals the pure-state tangle exactly.  Without the factor of four applied
here the raw projector combination would return a quarter of that value on
pure states.  On mixed states the estimate is a lower bound of the tangle
and may go negative; trajectory reports clamp it at zero.

The witness obeys the operator identity

    W = 2 * S_A S_B - S_A - S_B

with S_A, S_B the permutations that swap one subsystem between the two
copies.  Taking expectations of copy swaps turns every contraction into
purities of reduced states, which is what the ``*_fast`` routines and
``tangle_rate`` use; the dense construction is kept as the reference path.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .linalg import check_density, check_simplex

__all__ = [
    "build_projectors",
    "copy_swaps",
    "build_witness",
    "tangle_pure",
    "tangle_max",
    "tangle_bound",
    "tangle_bound_fast",
    "tangle_rate",
]


def _swap_matrix(d: int) -> np.ndarray:
    """Swap operator on H_d ⊗ H_d."""
    n = d * d
    s = np.zeros((n, n))
    idx = np.arange(n).reshape(d, d)
    s[np.arange(n), idx.T.reshape(-1)] = 1.0
    return s


@lru_cache(maxsize=8)
def build_projectors(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Projectors (P_minus, P_plus) onto the antisymmetric / symmetric
    subspaces of the doubled single-subsystem space H_d ⊗ H_d."""
    s = _swap_matrix(d)
    eye = np.eye(d * d)
    p_minus = (eye - s) / 2.0
    p_plus = (eye + s) / 2.0
    p_minus.flags.writeable = False
    p_plus.flags.writeable = False
    return p_minus, p_plus


@lru_cache(maxsize=8)
def copy_swaps(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Permutations (S_A, S_B) exchanging one subsystem between the copies.

    Both act on the doubled space ordered (A, B, A', B'); they are
    involutions and commute with each other.
    """
    n = d * d * d * d
    idx = np.arange(n).reshape(d, d, d, d)  # (a, b, a2, b2)
    s_a = np.zeros((n, n))
    s_a[np.arange(n), idx.transpose(2, 1, 0, 3).reshape(-1)] = 1.0
    s_b = np.zeros((n, n))
    s_b[np.arange(n), idx.transpose(0, 3, 2, 1).reshape(-1)] = 1.0
    s_a.flags.writeable = False
    s_b.flags.writeable = False
    return s_a, s_b


def _pairs_to_copies(mat: np.ndarray, d: int) -> np.ndarray:
    """Regroup a doubled-space operator from (A, A', B, B') to (A, B, A', B').

    This is the only place where the pair-grouping permutation is written.
    """
    t = mat.reshape((d,) * 8)
    return t.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(d**4, d**4)


@lru_cache(maxsize=8)
def build_witness(d: int) -> np.ndarray:
    """Dense tangle witness on the doubled space, ordered (A, B, A', B')."""
    p_minus, p_plus = build_projectors(d)
    raw = np.kron(p_minus, p_minus) - 0.5 * (
        np.kron(p_minus, p_plus) + np.kron(p_plus, p_minus)
    )
    w = 4.0 * _pairs_to_copies(raw, d)
    w.flags.writeable = False
    return w


def tangle_pure(lambdas) -> float:
    """Pure-state tangle 2 (1 - sum_i lambda_i^2) from Schmidt coefficients."""
    lam = check_simplex(lambdas)
    return float(2.0 * (1.0 - np.dot(lam, lam)))


def tangle_max(d: int) -> float:
    """Largest pure-state tangle at local dimension d: 2 (d - 1) / d."""
    return 2.0 * (d - 1) / d


def tangle_bound(rho, d: int | None = None) -> float:
    """Tangle estimate Tr[(rho ⊗ rho) W] via the dense witness."""
    rho, d = check_density(rho, d)
    w = build_witness(d)
    return float(np.einsum("ij,ji->", np.kron(rho, rho), w).real)


def _pair_trace(x: np.ndarray, y: np.ndarray, d: int) -> float:
    """Tr[(x ⊗ y) W] by index contraction, without materializing x ⊗ y.

    Expanding W through the copy-swap identity gives
    2 Tr(x y) - Tr(x_A y_A) - Tr(x_B y_B) with x_A = Tr_B x etc.
    """
    t_x = x.reshape(d, d, d, d)
    t_y = y.reshape(d, d, d, d)
    x_a = np.trace(t_x, axis1=1, axis2=3)
    y_a = np.trace(t_y, axis1=1, axis2=3)
    x_b = np.trace(t_x, axis1=0, axis2=2)
    y_b = np.trace(t_y, axis1=0, axis2=2)
    full = (x * y.T).sum()
    return float((2.0 * full - (x_a * y_a.T).sum() - (x_b * y_b.T).sum()).real)


def _pair_trace_batch(x: np.ndarray, y: np.ndarray, d: int) -> np.ndarray:
    """Stacked version of :func:`_pair_trace` over (m, n, n) inputs."""
    t_x = x.reshape(-1, d, d, d, d)
    t_y = y.reshape(-1, d, d, d, d)
    x_a = np.einsum("mabcb->mac", t_x)
    y_a = np.einsum("mabcb->mac", t_y)
    x_b = np.einsum("mabae->mbe", t_x)
    y_b = np.einsum("mabae->mbe", t_y)
    val = (2.0 * np.einsum("mij,mji->m", x, y)
           - np.einsum("mij,mji->m", x_a, y_a)
           - np.einsum("mij,mji->m", x_b, y_b))
    return val.real


def tangle_bound_fast(rho, d: int | None = None) -> float:
    """Same value as :func:`tangle_bound`, via reduced-state purities."""
    rho, d = check_density(rho, d)
    return _pair_trace(rho, rho, d)


def tangle_rate(rho_dot, rho, d: int | None = None) -> float:
    """Temporal increment 2 Tr[(rho_dot ⊗ rho) W] of the tangle estimate.

    ``rho_dot`` must be hermitian and traceless; the result is the exact
    time derivative of :func:`tangle_bound` along rho(t).
    """
    rho, d = check_density(rho, d)
    rd = np.asarray(rho_dot, dtype=complex)
    if rd.shape != rho.shape:
        raise ValueError(f"rho_dot shape {rd.shape} does not match rho {rho.shape}")
    herm_err = np.max(np.abs(rd - rd.conj().T))
    if herm_err > 1e-10:
        raise ValueError(f"rho_dot not hermitian (error {herm_err:.3e})")
    tr = abs(np.trace(rd))
    if tr > 1e-10:
        raise ValueError(f"rho_dot has trace {tr:.3e}, expected 0")
    return 2.0 * _pair_trace(rd, rho, d)
