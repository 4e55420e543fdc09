"""Fixed-step integration of the master equation with health monitors.

The integrator is classical RK4 with the channel generator as derivative.
Each step is re-hermitized as (M + M^dag)/2; eigenvalues are *not*
clipped, so the monitors (trace error, hermiticity error, smallest
eigenvalue) expose integrator trouble instead of masking it.  A run
aborts with :class:`IntegrationError` when the trace error exceeds 1e-6
or the smallest eigenvalue drops below -1e-5.

Reported tangle values are the estimate clamped at zero, max(bound, 0);
the raw bound can go negative on mixed states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSpec, _generator_ops
from .linalg import check_density
from .tangle import _pair_trace, _pair_trace_batch

__all__ = [
    "Trajectory",
    "EnsembleTrajectory",
    "IntegrationError",
    "rk4_step",
    "evolve",
    "evolve_ensemble",
    "tangle_trajectory",
]

TRACE_ABORT = 1e-6
MIN_EIG_ABORT = -1e-5


class IntegrationError(RuntimeError):
    """Raised when a trajectory monitor exceeds its hard limit."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class Trajectory:
    """Evolved states on a uniform time grid, with per-point monitors."""

    times: np.ndarray       # shape (n,), strictly increasing
    states: np.ndarray      # shape (n, d*d, d*d)
    tangle: np.ndarray      # shape (n,), clamped tangle estimate
    trace_err: np.ndarray   # |Tr rho - 1|
    herm_err: np.ndarray    # max |rho - rho^dag|
    min_eig: np.ndarray     # smallest eigenvalue

    def __len__(self) -> int:
        return self.times.size


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def _rk4_raw(rho: np.ndarray, gen, h: float) -> np.ndarray:
    k1 = gen.apply(rho)
    k2 = gen.apply(rho + 0.5 * h * k1)
    k3 = gen.apply(rho + 0.5 * h * k2)
    k4 = gen.apply(rho + h * k3)
    return _hermitize(rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def rk4_step(rho, spec: ChannelSpec, h: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step, re-hermitized."""
    if not h > 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    rho, d = check_density(rho)
    return _rk4_raw(rho, _generator_ops(spec, d), h)


def evolve(rho0, spec: ChannelSpec, t_max: float, steps: int) -> Trajectory:
    """Integrate rho(t) on a uniform grid of ``steps`` intervals up to t_max."""
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if not t_max > 0.0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    rho, d = check_density(rho0)
    gen = _generator_ops(spec, d)
    h = t_max / steps

    times = np.linspace(0.0, t_max, steps + 1)
    n = d * d
    states = np.empty((steps + 1, n, n), dtype=complex)
    tangle = np.empty(steps + 1)
    trace_err = np.empty(steps + 1)
    herm_err = np.empty(steps + 1)
    min_eig = np.empty(steps + 1)

    for i, t in enumerate(times):
        states[i] = rho
        trace_err[i] = abs(np.trace(rho).real - 1.0)
        herm_err[i] = float(np.max(np.abs(rho - rho.conj().T)))
        min_eig[i] = float(np.linalg.eigvalsh(rho)[0])
        tangle[i] = max(_pair_trace(rho, rho, d), 0.0)
        if trace_err[i] > TRACE_ABORT:
            raise IntegrationError(
                f"trace error {trace_err[i]:.3e} exceeded {TRACE_ABORT} at t={t:.6g}", t)
        if min_eig[i] < MIN_EIG_ABORT:
            raise IntegrationError(
                f"min eigenvalue {min_eig[i]:.3e} below {MIN_EIG_ABORT} at t={t:.6g}", t)
        if i < steps:
            rho = _rk4_raw(rho, gen, h)

    return Trajectory(times=times, states=states, tangle=tangle,
                      trace_err=trace_err, herm_err=herm_err, min_eig=min_eig)


def tangle_trajectory(traj: Trajectory) -> np.ndarray:
    """(t, tangle) pairs of a trajectory, shape (n, 2)."""
    return np.column_stack([traj.times, traj.tangle])


@dataclass(frozen=True)
class EnsembleTrajectory:
    """Clamped tangle and monitors for a stack of co-evolved states.

    States are not retained; all arrays have shape (members, grid points).
    """

    times: np.ndarray
    tangle: np.ndarray
    trace_err: np.ndarray
    min_eig: np.ndarray


def evolve_ensemble(rhos, spec: ChannelSpec, t_max: float, steps: int) -> EnsembleTrajectory:
    """Integrate many states on a shared grid in one batched pass.

    Same integrator and monitors as :func:`evolve`; the stack form keeps
    the per-step work in a few large matrix products, which matters for
    the random-baseline experiments with hundreds of members.
    """
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    if not t_max > 0.0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    rhos = np.asarray(rhos, dtype=complex)
    if rhos.ndim != 3:
        raise ValueError("expected a stack of density matrices (m, n, n)")
    m = rhos.shape[0]
    d = check_density(rhos[0])[1]
    for j in range(m):
        check_density(rhos[j], d)
    gen = _generator_ops(spec, d)
    h = t_max / steps
    times = np.linspace(0.0, t_max, steps + 1)
    tangle = np.empty((m, steps + 1))
    trace_err = np.empty((m, steps + 1))
    min_eig = np.empty((m, steps + 1))
    rho = rhos.copy()
    for i, t in enumerate(times):
        trace_err[:, i] = np.abs(np.einsum("mii->m", rho).real - 1.0)
        min_eig[:, i] = np.linalg.eigvalsh(rho)[:, 0]
        tangle[:, i] = np.maximum(_pair_trace_batch(rho, rho, d), 0.0)
        if trace_err[:, i].max() > TRACE_ABORT:
            raise IntegrationError(
                f"trace error {trace_err[:, i].max():.3e} exceeded {TRACE_ABORT} "
                f"at t={t:.6g}", t)
        if min_eig[:, i].min() < MIN_EIG_ABORT:
            raise IntegrationError(
                f"min eigenvalue {min_eig[:, i].min():.3e} below {MIN_EIG_ABORT} "
                f"at t={t:.6g}", t)
        if i < steps:
            k1 = gen.apply_batch(rho)
            k2 = gen.apply_batch(rho + 0.5 * h * k1)
            k3 = gen.apply_batch(rho + 0.5 * h * k2)
            k4 = gen.apply_batch(rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rho = (rho + rho.conj().transpose(0, 2, 1)) / 2.0
    return EnsembleTrajectory(times=times, tangle=tangle,
                              trace_err=trace_err, min_eig=min_eig)
