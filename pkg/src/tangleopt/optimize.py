"""Maximization of the tangle increment at fixed initial tangle.

Three routes are provided and cross-check each other:

* :func:`optimize_schmidt` restricts to states whose Schmidt basis is the
  pointer (computational) basis and maximizes over the Schmidt
  coefficients.  Supports (sets of occupied levels) are enumerated
  exhaustively; on each support the two-multiplier stationarity system

      grad(rate) = mu * grad(tangle) + nu * 1,   sum lam = 1,   tangle = tau0

  is solved by damped Newton from multistart points on the constraint
  manifold, and the best stationary point wins.
* :func:`optimize_general` climbs the rate over arbitrary complex
  amplitude vectors (augmented-Lagrangian handling of the tangle
  constraint, projection onto the unit sphere), used to confirm that the
  Schmidt-restricted optimum is not beaten.
* :func:`oracle_random_search` brute-forces the Schmidt-restricted
  problem with fixed-tangle samples on every feasible support, as an
  optimizer-independent floor.

On pointer-basis states the rate functional is an exact quadratic
polynomial in the Schmidt coefficients (the square roots always pair up
for both coupling families).  The Newton solver runs on that polynomial,
extracted by interpolation from the dense matrix evaluator and verified
against it at random probe points on construction; the public
:func:`rate_of_schmidt` and the oracle keep using the dense route.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .channels import ChannelSpec, _generator_ops
from .linalg import as_rng, check_dim, check_simplex
from .sampling import (InfeasibleTangle, schmidt_with_tangle_batch,
                       state_with_tangle)
from .tangle import _pair_trace, _pair_trace_batch, tangle_max

__all__ = [
    "OptimizationResult",
    "GeneralOptimum",
    "feasible_tau",
    "rate_of_schmidt",
    "rate_grad",
    "optimize_schmidt",
    "optimize_general",
    "oracle_random_search",
    "sweep_tau",
]

SUPPORT_EPS = 1e-7      # occupied-level threshold in reported supports
NEWTON_TOL = 1e-12      # accept stationary points below this residual
INTERIOR_EPS = 1e-10    # Newton iterates closer to the boundary belong to a
                        # smaller support and are rejected
DEGENERATE_EPS = 1e-11  # |tau0 - support max| below this: unique feasible orbit


@dataclass(frozen=True)
class OptimizationResult:
    """Schmidt-restricted optimum with its first-order certificate."""

    lambdas: np.ndarray            # full-length coefficient vector
    rate_value: float              # achieved tangle increment
    support: tuple[int, ...]       # levels with lambda > SUPPORT_EPS
    multipliers: tuple[float, float]   # (mu, nu) of the stationarity system
    kkt_residual: float
    n_restarts_used: int


@dataclass(frozen=True)
class GeneralOptimum:
    """Best state found by the unrestricted amplitude-space ascent."""

    psi: np.ndarray
    rate_value: float
    constraint_residual: float


def feasible_tau(tau0: float, d: int) -> tuple[bool, int]:
    """Whether tau0 is reachable at dimension d, and the smallest number of
    positive Schmidt coefficients any realization needs.

    For tau0 >= 2 no finite support suffices and min_support is reported
    as 0.
    """
    d = check_dim(d)
    if tau0 < -1e-12:
        raise ValueError(f"tangle must be >= 0, got {tau0}")
    feasible = tau0 <= tangle_max(d) + 1e-12
    if tau0 >= 2.0 - 1e-12:
        return False, 0
    k = 1
    while tau0 > 2.0 * (k - 1) / k + 1e-12:
        k += 1
    return feasible, k


# ---------------------------------------------------------------------------
# rate functional on pointer-basis states
# ---------------------------------------------------------------------------

def _pointer_indices(d: int) -> np.ndarray:
    return np.arange(d) * d + np.arange(d)


def _raw_rate_batch(lams: np.ndarray, gen, d: int) -> np.ndarray:
    """Dense rate evaluation for a batch of (possibly unnormalized,
    nonnegative) coefficient rows, shape (m, d) -> (m,)."""
    lams = np.atleast_2d(np.asarray(lams, dtype=float))
    m = lams.shape[0]
    psi = np.zeros((m, d * d), dtype=complex)
    psi[:, _pointer_indices(d)] = np.sqrt(np.clip(lams, 0.0, None))
    rho = np.einsum("mi,mj->mij", psi, psi.conj())
    rd = gen.apply_batch(rho)
    return 2.0 * _pair_trace_batch(rd, rho, d)


def _raw_rate(lam, gen, d: int) -> float:
    return float(_raw_rate_batch(np.asarray(lam, float)[None, :], gen, d)[0])


def rate_of_schmidt(lambdas, spec: ChannelSpec) -> float:
    """Tangle increment of the pointer-basis state with coefficients
    ``lambdas`` under the given channel."""
    lam = check_simplex(lambdas)
    d = check_dim(lam.size)
    return _raw_rate(lam, _generator_ops(spec, d), d)


def rate_grad(lambdas, spec: ChannelSpec, *, return_boundary_mask: bool = False):
    """Gradient of :func:`rate_of_schmidt` with respect to the coefficients.

    Interior entries are computed analytically through the state
    derivative d rho / d lambda_i and the bilinearity of the functional.
    Entries with lambda_i = 0 carry the one-sided (forward-difference)
    derivative instead and are flagged in the optional boundary mask.
    """
    lam = check_simplex(lambdas)
    d = check_dim(lam.size)
    gen = _generator_ops(spec, d)
    idx = _pointer_indices(d)
    psi = np.zeros(d * d, dtype=complex)
    psi[idx] = np.sqrt(lam)
    rho = np.outer(psi, psi.conj())
    l_rho = gen.apply(rho)
    boundary = lam < 1e-13
    grad = np.empty(d)
    f0 = None
    for i in range(d):
        if boundary[i]:
            if f0 is None:
                f0 = _raw_rate(lam, gen, d)
            h = 1e-7
            lam_h = lam.copy()
            lam_h[i] += h
            grad[i] = (_raw_rate(lam_h, gen, d) - f0) / h
        else:
            basis = np.zeros(d * d, dtype=complex)
            basis[idx[i]] = 1.0
            d_rho = (np.outer(basis, psi.conj()) + np.outer(psi, basis.conj())) \
                / (2.0 * np.sqrt(lam[i]))
            l_drho = gen.apply(d_rho)
            grad[i] = 2.0 * (_pair_trace(l_drho, rho, d) + _pair_trace(l_rho, d_rho, d))
    if return_boundary_mask:
        return grad, boundary
    return grad


class _QuadraticRate:
    """Exact quadratic form a.lam + lam.B.lam of the pointer-state rate.

    Extracted by interpolation from the dense evaluator and checked
    against it at random probes; construction fails loudly if the channel
    ever stops being quadratic in the coefficients.
    """

    def __init__(self, spec: ChannelSpec, d: int):
        self.d = d = check_dim(d)
        gen = _generator_ops(spec, d)
        eye = np.eye(d)
        f1 = _raw_rate_batch(eye, gen, d)
        f2 = _raw_rate_batch(2.0 * eye, gen, d)
        a = 2.0 * f1 - 0.5 * f2
        b = np.diag(0.5 * (f2 - 2.0 * f1))
        pairs = list(itertools.combinations(range(d), 2))
        probes = np.array([eye[i] + eye[j] for i, j in pairs])
        f12 = _raw_rate_batch(probes, gen, d)
        for (i, j), fij in zip(pairs, f12):
            b[i, j] = b[j, i] = 0.5 * (fij - a[i] - a[j] - b[i, i] - b[j, j])
        self.a = a
        self.b = b
        rng = np.random.default_rng(1234)
        check = rng.dirichlet(np.ones(d), size=3) * rng.uniform(0.5, 1.5, size=(3, 1))
        dense = _raw_rate_batch(check, gen, d)
        quad = self.value_batch(check)
        err = np.max(np.abs(dense - quad))
        if err > 1e-9 * max(1.0, np.max(np.abs(dense))):
            raise AssertionError(
                f"pointer-state rate is not quadratic for {spec} (probe error {err:.3e})")

    def value(self, lam: np.ndarray) -> float:
        return float(self.a @ lam + lam @ self.b @ lam)

    def value_batch(self, lams: np.ndarray) -> np.ndarray:
        return lams @ self.a + np.einsum("ni,ij,nj->n", lams, self.b, lams)

    def grad(self, lam: np.ndarray) -> np.ndarray:
        return self.a + 2.0 * (self.b @ lam)


# ---------------------------------------------------------------------------
# Schmidt-restricted optimizer
# ---------------------------------------------------------------------------

def _embed(x: np.ndarray, support: tuple[int, ...], d: int) -> np.ndarray:
    lam = np.zeros(d)
    lam[list(support)] = x
    return lam


def _newton_on_support(model: _QuadraticRate, tau0: float,
                       support: tuple[int, ...], starts: list[np.ndarray]):
    """Damped Newton on the stationarity-plus-constraints system restricted
    to one support.  Returns interior converged points."""
    k = len(support)
    sub = np.ix_(list(support), list(support))
    a_s = model.a[list(support)]
    b_s = model.b[sub]
    ones = np.ones(k)

    def residual(z):
        x, mu, nu = z[:k], z[k], z[k + 1]
        g = a_s + 2.0 * (b_s @ x)
        return np.concatenate([
            g + 4.0 * mu * x - nu * ones,
            [x.sum() - 1.0, 2.0 * (1.0 - x @ x) - tau0],
        ])

    def jacobian(z):
        x, mu = z[:k], z[k]
        jac = np.zeros((k + 2, k + 2))
        jac[:k, :k] = 2.0 * b_s + 4.0 * mu * np.eye(k)
        jac[:k, k] = 4.0 * x
        jac[:k, k + 1] = -1.0
        jac[k, :k] = 1.0
        jac[k + 1, :k] = -4.0 * x
        return jac

    found = []
    for x0 in starts:
        g0 = a_s + 2.0 * (b_s @ x0)
        design = np.column_stack([-4.0 * x0, ones])
        mn, *_ = np.linalg.lstsq(design, g0, rcond=None)
        z = np.concatenate([x0, mn])
        ok = False
        for _ in range(80):
            f_val = residual(z)
            nf = np.linalg.norm(f_val)
            if nf < NEWTON_TOL:
                ok = True
                break
            try:
                step = np.linalg.solve(jacobian(z), -f_val)
            except np.linalg.LinAlgError:
                break
            for damp in (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625):
                z_try = z + damp * step
                if np.linalg.norm(residual(z_try)) < (1.0 - 1e-4 * damp) * nf:
                    z = z_try
                    break
            else:
                break
        if ok and z[:k].min() > INTERIOR_EPS:
            found.append(z[:k].copy())
    unique = {}
    for x in found:
        unique[tuple(np.round(x, 10))] = x
    return list(unique.values())


def _manifold_starts(tau0: float, k: int, rng, count: int) -> list[np.ndarray]:
    """Multistart points on {sum lam = 1, tangle = tau0, lam >= 0}.

    Tries the isotropic-direction sampler first; for small tau0 at k >= 3
    its acceptance collapses, so the remainder is generated as
    vertex/Dirichlet mixtures rescaled onto the tangle sphere (also exact
    manifold points, just a different start distribution).
    """
    r2 = 1.0 - tau0 / 2.0
    t = np.sqrt(max(r2 - 1.0 / k, 0.0))
    starts: list[np.ndarray] = []
    budget = 400 * count
    while len(starts) < count and budget > 0:
        m = min(budget, max(64, 4 * (count - len(starts))))
        budget -= m
        w = rng.standard_normal((m, k))
        u = w - w.mean(axis=1, keepdims=True)
        nrm = np.linalg.norm(u, axis=1)
        ok = nrm > 1e-12
        lam = 1.0 / k + (t / nrm[ok, None]) * u[ok]
        for row in lam[lam.min(axis=1) >= 0.0]:
            starts.append(row)
            if len(starts) == count:
                break
    guard = 0
    while len(starts) < count and guard < 100_000:
        guard += 1
        v = int(rng.integers(k))
        y = rng.dirichlet(np.ones(k))
        e_v = np.zeros(k)
        e_v[v] = 1.0
        a = float(np.sum((y - e_v) ** 2))
        b = 1.0 - y[v]
        disc = b * b - a * (1.0 - r2)
        if disc < 0.0 or a < 1e-14:
            continue
        s = (b - np.sqrt(disc)) / a
        if not 0.0 < s <= 1.0 + 1e-12:
            continue
        starts.append(np.clip((1.0 - s) * e_v + s * y, 0.0, None))
    return starts


def _support_candidates(model: _QuadraticRate, tau0: float, support: tuple[int, ...],
                        n_starts: int, seed: int, warm: np.ndarray | None):
    """Feasible stationary candidates on one support, plus the number of
    Newton starts consumed."""
    d = model.d
    k = len(support)
    tmax_k = 2.0 * (k - 1) / k
    if tau0 > tmax_k + 1e-12:
        return [], 0
    if abs(tau0 - tmax_k) <= DEGENERATE_EPS:
        # The constraint set collapses to the uniform orbit on this support.
        return [_embed(np.full(k, 1.0 / k), support, d)], 0
    if k == 1:
        return [], 0
    if k == 2:
        r = np.sqrt(1.0 - tau0)
        hi, lo = (1.0 + r) / 2.0, (1.0 - r) / 2.0
        return ([_embed(np.array([hi, lo]), support, d),
                 _embed(np.array([lo, hi]), support, d)], 0)
    rng = np.random.default_rng((seed, *support))
    starts = _manifold_starts(tau0, k, rng, n_starts)
    if warm is not None:
        w = np.clip(warm[list(support)], 1e-6, None)
        starts.append(w / w.sum())
    solutions = _newton_on_support(model, tau0, support, starts)
    return [_embed(x, support, d) for x in solutions], len(starts)


def _beats(lam1, rate1, lam2, rate2) -> bool:
    """Deterministic candidate order: larger rate wins; exact-symmetry ties
    fall back to the lexicographically largest sorted, then unsorted,
    coefficient vector."""
    tol = 1e-10 * max(1.0, abs(rate1), abs(rate2))
    if rate1 > rate2 + tol:
        return True
    if rate2 > rate1 + tol:
        return False
    for v1, v2 in zip(np.sort(lam1)[::-1], np.sort(lam2)[::-1]):
        if v1 > v2 + 1e-12:
            return True
        if v2 > v1 + 1e-12:
            return False
    for v1, v2 in zip(lam1, lam2):
        if v1 > v2 + 1e-12:
            return True
        if v2 > v1 + 1e-12:
            return False
    return False


def _kkt_report(model: _QuadraticRate, tau0: float, lam: np.ndarray,
                support: tuple[int, ...]):
    """Multipliers and first-order residual at a feasible point.

    The residual aggregates: stationarity on the support, both equality
    constraints, and one-sided ascent available on the inactive bounds.
    When tau0 sits exactly at the support's tangle maximum the feasible
    set is zero-dimensional and the stationarity part is vacuous.
    """
    g = model.grad(lam)
    sup = list(support)
    x = lam[sup]
    design = np.column_stack([-4.0 * x, np.ones(len(sup))])
    mn, *_ = np.linalg.lstsq(design, g[sup], rcond=None)
    mu, nu = float(mn[0]), float(mn[1])
    k = len(sup)
    degenerate = abs(tau0 - 2.0 * (k - 1) / k) <= DEGENERATE_EPS
    stat = 0.0 if degenerate else float(np.max(np.abs(g[sup] - design @ mn)))
    cons = max(abs(lam.sum() - 1.0), abs(2.0 * (1.0 - lam @ lam) - tau0))
    off = [i for i in range(model.d) if i not in support]
    ascent = max(0.0, float(np.max(g[off] - nu))) if off else 0.0
    return mu, nu, max(stat, cons, ascent)


def optimize_schmidt(tau0: float, spec: ChannelSpec, d: int, *,
                     n_starts: int = 32, seed: int = 0,
                     warm_lambdas: np.ndarray | None = None) -> OptimizationResult:
    """Maximize the tangle increment over pointer-basis Schmidt coefficients
    at fixed tangle tau0.

    Parameters
    ----------
    tau0 : target tangle, must satisfy ``feasible_tau(tau0, d)``.
    spec : channel under which the increment is evaluated.
    d : local dimension.
    n_starts : Newton multistarts per support of size >= 3.
    seed : base seed for the deterministic multistart streams.
    warm_lambdas : optional previous solution injected as an extra start
        (used by :func:`sweep_tau`).

    Raises
    ------
    InfeasibleTangle : if tau0 exceeds the pure-state maximum.
    RuntimeError : if no support yields a converged stationary point
        (does not occur for the built-in channel families).
    """
    d = check_dim(d)
    ok, kmin = feasible_tau(tau0, d)
    if not ok:
        raise InfeasibleTangle(
            f"tangle {tau0} is not reachable at d={d} (max {tangle_max(d)})")
    model = _QuadraticRate(spec, d)
    best_lam = None
    best_rate = -np.inf
    used = 0
    for size in range(max(kmin, 1), d + 1):
        for support in itertools.combinations(range(d), size):
            cands, n_used = _support_candidates(model, tau0, support, n_starts,
                                                seed, warm_lambdas)
            used += n_used
            for lam in cands:
                r = model.value(lam)
                if best_lam is None or _beats(lam, r, best_lam, best_rate):
                    best_lam, best_rate = lam, r
    if best_lam is None:
        raise RuntimeError(
            f"no stationary point converged for tau0={tau0}, d={d}, {spec}; "
            f"{used} starts attempted")
    support = tuple(int(i) for i in np.flatnonzero(best_lam > SUPPORT_EPS))
    mu, nu, resid = _kkt_report(model, tau0, best_lam, support)
    return OptimizationResult(lambdas=best_lam, rate_value=best_rate,
                              support=support, multipliers=(mu, nu),
                              kkt_residual=resid, n_restarts_used=used)


def sweep_tau(tau_grid, spec: ChannelSpec, d: int, *,
              n_starts: int = 32, seed: int = 0) -> list[OptimizationResult]:
    """Run :func:`optimize_schmidt` over a tangle grid, warm-starting each
    point from the previous solution (fresh multistarts still run, so
    branch switches are not missed)."""
    grid = np.asarray(tau_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("empty tangle grid")
    for tau0 in grid:
        ok, _ = feasible_tau(float(tau0), d)
        if not ok:
            raise InfeasibleTangle(
                f"grid value {tau0} exceeds the pure-state maximum {tangle_max(d)}")
    results: list[OptimizationResult] = []
    warm = None
    for tau0 in grid:
        res = optimize_schmidt(float(tau0), spec, d, n_starts=n_starts,
                               seed=seed, warm_lambdas=warm)
        results.append(res)
        warm = res.lambdas
    return results


def oracle_random_search(tau0: float, spec: ChannelSpec, d: int, n: int,
                         rng) -> tuple[np.ndarray, float]:
    """Brute-force floor for :func:`optimize_schmidt`.

    The budget of ``n`` dense rate evaluations is split evenly over every
    feasible support (the facets of the simplex included, since optima sit
    on them); each support is sampled at its exact tangle slice.
    """
    d = check_dim(d)
    rng = as_rng(rng)
    ok, kmin = feasible_tau(tau0, d)
    if not ok:
        raise InfeasibleTangle(
            f"tangle {tau0} is not reachable at d={d} (max {tangle_max(d)})")
    gen = _generator_ops(spec, d)
    supports = []
    for size in range(max(kmin, 1), d + 1):
        supports.extend(itertools.combinations(range(d), size))
    per = max(1, n // len(supports))
    best_lam = None
    best_rate = -np.inf
    for support in supports:
        k = len(support)
        if abs(tau0 - 2.0 * (k - 1) / k) <= DEGENERATE_EPS:
            batch = np.full((1, k), 1.0 / k)
        elif k == 1:
            batch = np.ones((1, 1))
        else:
            batch = schmidt_with_tangle_batch(tau0, k, rng, per)
        full = np.zeros((batch.shape[0], d))
        full[:, list(support)] = batch
        rates = _raw_rate_batch(full, gen, d)
        j = int(np.argmax(rates))
        if best_lam is None or _beats(full[j], float(rates[j]), best_lam, best_rate):
            best_lam, best_rate = full[j], float(rates[j])
    return best_lam, best_rate


# ---------------------------------------------------------------------------
# unrestricted amplitude-space ascent
# ---------------------------------------------------------------------------

def _rate_psi(psi: np.ndarray, gen, d: int) -> float:
    rho = np.outer(psi, psi.conj())
    return 2.0 * _pair_trace(gen.apply(rho), rho, d)


def _reduced(x: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    t = x.reshape(d, d, d, d)
    return np.trace(t, axis1=1, axis2=3), np.trace(t, axis1=0, axis2=2)


def _rate_grad_psi(psi: np.ndarray, gen, d: int) -> np.ndarray:
    """Wirtinger gradient of the rate: both slots of the bilinear form."""
    return _grads_psi(psi, gen, d)[0]


def _grads_psi(psi: np.ndarray, gen, d: int) -> tuple[np.ndarray, np.ndarray]:
    """(rate gradient, tangle gradient) sharing the state intermediates."""
    eye = np.eye(d)
    rho = np.outer(psi, psi.conj())
    l_rho = gen.apply(rho)
    la, lb = _reduced(l_rho, d)
    n_part = 2.0 * (2.0 * l_rho - np.kron(la, eye) - np.kron(eye, lb))
    ra, rb = _reduced(rho, d)
    n = d * d
    args = np.stack([rho, np.kron(ra, eye), np.kron(eye, rb)]).reshape(3, n * n)
    adj = (args @ gen.adjoint_matrix().T).reshape(3, n, n)
    m_part = 2.0 * (2.0 * adj[0] - adj[1] - adj[2])
    mat = psi.reshape(d, d)
    g_tangle = 2.0 * (2.0 * (rho @ psi) - (ra @ mat).reshape(-1)
                      - (mat @ rb.T).reshape(-1))
    return (m_part + n_part) @ psi, g_tangle


def _tangle_c(psi: np.ndarray, d: int) -> float:
    rho = np.outer(psi, psi.conj())
    return _pair_trace(rho, rho, d)


def _tangle_grad_psi(psi: np.ndarray, d: int) -> np.ndarray:
    rho = np.outer(psi, psi.conj())
    ra, rb = _reduced(rho, d)
    mat = psi.reshape(d, d)
    return 2.0 * (2.0 * (rho @ psi) - (ra @ mat).reshape(-1) - (mat @ rb.T).reshape(-1))


def _tangent(psi: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - psi * np.vdot(psi, g)


def _restore_tangle(psi: np.ndarray, tau0: float, d: int,
                    tol: float = 1e-12, iters: int = 40) -> np.ndarray:
    """Newton steps along the tangle-constraint gradient on the sphere.

    For a tangent direction v the derivative of the constraint along the
    renormalized curve psi + beta*v is 2 Re(v^dag grad c) = 2 |v|^2.
    """
    for _ in range(iters):
        c = _tangle_c(psi, d) - tau0
        if abs(c) < tol:
            break
        v = _tangent(psi, _tangle_grad_psi(psi, d))
        vn2 = np.vdot(v, v).real
        if vn2 < 1e-14:
            break
        step = v * (-c / (2.0 * vn2))
        moved = False
        for _ in range(30):
            trial = psi + step
            trial /= np.linalg.norm(trial)
            if abs(_tangle_c(trial, d) - tau0) < abs(c):
                psi = trial
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    return psi


def _ascend_fixed_tangle(psi0: np.ndarray, tau0: float, gen,
                         d: int) -> tuple[np.ndarray, float, float]:
    """One restart: augmented-Lagrangian ascent, restoration, tangent polish.

    The iterate is pulled back to the constraint manifold after every
    outer round and ascent steps may not blow up the violation: the tangle
    gradient vanishes at separable states, so an iterate that slides to
    tau = 0 (where the rate climbs to zero) could never be restored.
    """
    psi = psi0 / np.linalg.norm(psi0)
    mu = 0.0
    pen = 100.0
    c_prev = abs(_tangle_c(psi, d) - tau0)
    eta = 1e-2

    def merit(p):
        c = _tangle_c(p, d) - tau0
        return _rate_psi(p, gen, d) - mu * c - 0.5 * pen * c * c, c

    for _ in range(2):
        val, c = merit(psi)
        for _ in range(40):
            g_rate, g_c = _grads_psi(psi, gen, d)
            g_t = _tangent(psi, g_rate - (mu + pen * c) * g_c)
            gn2 = np.vdot(g_t, g_t).real
            if np.sqrt(gn2) < 1e-9 * max(1.0, abs(val)):
                break
            eta = min(eta * 2.0, 1.0)
            improved = False
            c_cap = max(0.05, 1.5 * abs(c))
            for _ in range(40):
                trial = psi + eta * g_t
                trial /= np.linalg.norm(trial)
                t_val, t_c = merit(trial)
                if t_val > val + 1e-4 * eta * gn2 and abs(t_c) <= c_cap:
                    psi, val, c = trial, t_val, t_c
                    improved = True
                    break
                eta *= 0.5
            if not improved:
                break
        c = _tangle_c(psi, d) - tau0
        mu += pen * c
        psi = _restore_tangle(psi, tau0, d)
        c_after = abs(_tangle_c(psi, d) - tau0)
        if c_after < 1e-11:
            break
        if c_after > 0.3 * c_prev:
            pen = min(pen * 8.0, 1e9)
        c_prev = c_after

    psi = _restore_tangle(psi, tau0, d)
    val = _rate_psi(psi, gen, d)
    # polish inside the constraint manifold.  Barzilai-Borwein steps with a
    # nonmonotone (watermark) acceptance: forcing monotone ascent would
    # truncate every BB step and crawl on anisotropic channels.
    best_psi, best_val = psi, val
    recent = deque([val], maxlen=8)
    eta = 1e-2
    prev_psi = None
    prev_g = None
    for _ in range(250):
        g_rate, g_c = _grads_psi(psi, gen, d)
        g_t = _tangent(psi, g_rate)
        v_t = _tangent(psi, g_c)
        vn2 = np.vdot(v_t, v_t).real
        if vn2 > 1e-16:
            g_t = g_t - v_t * (np.vdot(v_t, g_t).real / vn2)
        gn = np.linalg.norm(g_t)
        if gn < 1e-8 * max(1.0, abs(val)):
            break
        if prev_psi is not None:
            ds = psi - prev_psi
            dg = g_t - prev_g
            denom = abs(np.vdot(ds, dg).real)
            if denom > 1e-18:
                eta = min(max(np.vdot(ds, ds).real / denom, 1e-6), 10.0)
        else:
            eta = min(eta * 2.0, 1.0)
        prev_psi, prev_g = psi, g_t
        watermark = min(recent)
        accepted = False
        for _ in range(30):
            trial = psi + eta * g_t
            trial /= np.linalg.norm(trial)
            trial = _restore_tangle(trial, tau0, d, tol=1e-11)
            t_val = _rate_psi(trial, gen, d)
            if t_val > watermark + 1e-8 * min(eta, 1.0) * gn * gn:
                psi, val = trial, t_val
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        recent.append(val)
        if val > best_val:
            best_psi, best_val = psi, val
    psi = _restore_tangle(best_psi, tau0, d)
    val = _rate_psi(psi, gen, d)
    resid = abs(_tangle_c(psi, d) - tau0)
    return psi, val, resid


def optimize_general(tau0: float, spec: ChannelSpec, d: int,
                     restarts: int = 64, rng=None) -> GeneralOptimum:
    """Best-effort maximization of the tangle increment over arbitrary pure
    states of tangle tau0.

    Each restart starts from a random fixed-tangle state, climbs the
    augmented Lagrangian of the rate with the tangle constraint (the norm
    constraint is handled by projection onto the unit sphere), and is then
    polished inside the constraint manifold.  Individual restarts may land
    on local maxima; quality is judged against :func:`optimize_schmidt`.
    """
    d = check_dim(d)
    rng = as_rng(rng)
    ok, _ = feasible_tau(tau0, d)
    if not ok:
        raise InfeasibleTangle(
            f"tangle {tau0} is not reachable at d={d} (max {tangle_max(d)})")
    gen = _generator_ops(spec, d)
    inits = [state_with_tangle(tau0, d, rng) for _ in range(max(1, restarts))]
    best = None
    fallback = None
    for psi0 in inits:
        psi, val, resid = _ascend_fixed_tangle(psi0, tau0, gen, d)
        cand = GeneralOptimum(psi=psi, rate_value=val, constraint_residual=resid)
        if resid < 1e-6:
            if best is None or val > best.rate_value:
                best = cand
        elif fallback is None or resid < fallback.constraint_residual:
            fallback = cand
    # restarts whose restoration failed are not comparable on rate
    return best if best is not None else fallback
