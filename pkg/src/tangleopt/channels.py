"""Local dissipation channels and the Lindblad generator.

Two one-parameter coupling families on a d-level system:

* dephasing: sigma_dc(q) = diag((i+1)^q), i = 0..d-1.  q = 1 is the
  shifted number operator of the harmonic-oscillator case; q tunes the
  relative decoherence rates between level pairs.
* decay: sigma_ad(q) = sum_{i=0}^{d-2} (i+1)^q |0><i+1|.  Every excited
  level decays directly to the ground state with a level-dependent rate
  (no cascade through intermediate levels).

The generator is applied matrix-functionally (never materialized as a
d^4 x d^4 superoperator):

    L_sigma rho = 2 sigma rho sigma^dag - sigma^dag sigma rho - rho sigma^dag sigma

summed over the embedded jump operators of every coupled side and scaled
by a single overall rate.  Time is measured in units of the inverse rate.

The decay family enters the generator as d-1 *independent* jump
operators (i+1)^q |0><i+1|, one per transition, as for an atom whose
excited levels emit into distinguishable modes.  Using instead the single
coherent sum sigma_ad (the printed matrix, see :func:`sigma_decay`) would
leave its (d-1)-dimensional kernel dark: entangled states inside
ker ⊗ ker would then never decay at all, which contradicts both the
Schmidt-restricted optima being global and the trajectory experiments.
Both readings coincide on pointer-basis Schmidt states and for d = 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import check_density, check_dim

__all__ = [
    "ChannelSpec",
    "sigma_dephasing",
    "sigma_decay",
    "embed_local",
    "lindblad_apply",
    "rho_dot",
]

KINDS = ("dephasing", "decay")


@dataclass(frozen=True)
class ChannelSpec:
    """Which coupling family acts, how strongly, and on which subsystems."""

    kind: str
    q: float
    rate: float = 1.0
    sides: tuple[str, ...] = ("A", "B")

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.rate >= 0.0:
            raise ValueError(f"rate must be >= 0, got {self.rate}")
        sides = tuple(self.sides)
        if not sides or any(s not in ("A", "B") for s in sides) or len(set(sides)) != len(sides):
            raise ValueError(f"sides must be a nonempty subset of ('A','B'), got {self.sides!r}")
        object.__setattr__(self, "sides", sides)
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "rate", float(self.rate))

    def jump_operators(self, d: int) -> list[np.ndarray]:
        """Jump operators of one subsystem (before embedding).

        Dephasing is a single diagonal operator; decay is one operator per
        excited level so that distinct transitions stay incoherent.
        """
        if self.kind == "dephasing":
            return [sigma_dephasing(d, self.q)]
        ops = []
        for m in range(d - 1):
            sig = np.zeros((d, d), dtype=complex)
            sig[0, m + 1] = (m + 1.0) ** self.q
            ops.append(sig)
        return ops


def sigma_dephasing(d: int, q: float) -> np.ndarray:
    """Diagonal coupling diag((i+1)^q)."""
    d = check_dim(d)
    return np.diag((np.arange(d) + 1.0) ** q).astype(complex)


def sigma_decay(d: int, q: float) -> np.ndarray:
    """All-to-ground decay coupling sum_i (i+1)^q |0><i+1|."""
    d = check_dim(d)
    sig = np.zeros((d, d), dtype=complex)
    sig[0, 1:] = (np.arange(1, d)) ** q
    return sig


def embed_local(sigma, side: str, d: int) -> np.ndarray:
    """Lift a d x d operator to the composite space on one side."""
    d = check_dim(d)
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.shape != (d, d):
        raise ValueError(f"coupling operator must be {d}x{d}, got {sigma.shape}")
    eye = np.eye(d)
    if side == "A":
        return np.kron(sigma, eye)
    if side == "B":
        return np.kron(eye, sigma)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


class _GeneratorOps:
    """Stacked embedded jump operators of a channel, for fast application.

    The anticommutator part only needs the precomputed sum of sigma^dag
    sigma; the sandwich part runs as one batched matmul over the stack.
    """

    def __init__(self, spec: ChannelSpec, d: int):
        ops = [embed_local(sig, side, d)
               for side in spec.sides for sig in spec.jump_operators(d)]
        self.s = np.stack(ops)
        self.s_dag = self.s.conj().transpose(0, 2, 1)
        self.ss = np.einsum("kij,kjl->il", self.s_dag, self.s)
        self.rate = spec.rate
        self.d = d
        self._mat = None
        self._mat_adj = None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """rate * sum_k (2 s_k rho s_k^dag - {s_k^dag s_k, rho})."""
        sand = (self.s @ rho @ self.s_dag).sum(axis=0)
        return self.rate * (2.0 * sand - self.ss @ rho - rho @ self.ss)

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        """Heisenberg-picture generator rate * sum_k (2 s_k^dag z s_k - {s_k^dag s_k, z})."""
        sand = (self.s_dag @ z @ self.s).sum(axis=0)
        return self.rate * (2.0 * sand - self.ss @ z - z @ self.ss)

    def matrix(self) -> np.ndarray:
        """The generator as an (n^2, n^2) matrix on row-major vectorized
        states, for batched application as a single GEMM.

        Built from the kron identity vec(A X B) = (A kron B^T) vec(X) and
        asserted against the functional path on a random state, so the two
        routes cannot drift apart.
        """
        if self._mat is None:
            n = self.s.shape[1]
            eye = np.eye(n)
            mat = -np.kron(self.ss, eye) - np.kron(eye, self.ss.T)
            for i in range(self.s.shape[0]):
                mat += 2.0 * np.kron(self.s[i], self.s[i].conj())
            mat *= self.rate
            rng = np.random.default_rng(0)
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            z = (z + z.conj().T) / 2.0
            ref = self.apply(z)
            err = np.max(np.abs((mat @ z.reshape(-1)).reshape(n, n) - ref))
            if err > 1e-10 * max(1.0, np.max(np.abs(ref))):
                raise AssertionError(f"superoperator disagrees with generator ({err:.3e})")
            self._mat = mat
        return self._mat

    def adjoint_matrix(self) -> np.ndarray:
        """Heisenberg-picture counterpart of :meth:`matrix`."""
        if self._mat_adj is None:
            n = self.s.shape[1]
            eye = np.eye(n)
            mat = -np.kron(self.ss, eye) - np.kron(eye, self.ss.T)
            for i in range(self.s.shape[0]):
                mat += 2.0 * np.kron(self.s_dag[i], self.s_dag[i].conj())
            mat *= self.rate
            rng = np.random.default_rng(1)
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            z = (z + z.conj().T) / 2.0
            ref = self.adjoint(z)
            err = np.max(np.abs((mat @ z.reshape(-1)).reshape(n, n) - ref))
            if err > 1e-10 * max(1.0, np.max(np.abs(ref))):
                raise AssertionError(f"adjoint superoperator disagrees ({err:.3e})")
            self._mat_adj = mat
        return self._mat_adj

    def apply_batch(self, rho: np.ndarray) -> np.ndarray:
        """Generator over a stack of density matrices (m, n, n) via one GEMM."""
        m, n = rho.shape[0], rho.shape[1]
        return (rho.reshape(m, n * n) @ self.matrix().T).reshape(m, n, n)


def _generator_ops(spec: ChannelSpec, d: int) -> _GeneratorOps:
    return _GeneratorOps(spec, d)


def lindblad_apply(rho, sigmas, rate: float) -> np.ndarray:
    """rate * sum_i (2 s_i rho s_i^dag - s_i^dag s_i rho - rho s_i^dag s_i).

    ``sigmas`` are operators already embedded on the composite space.  The
    result is hermitian and traceless.
    """
    rho, d = check_density(rho)
    n = d * d
    out = np.zeros_like(rho)
    for s in sigmas:
        s = np.asarray(s, dtype=complex)
        if s.shape != (n, n):
            raise ValueError(f"coupling operator must be {n}x{n}, got {s.shape}")
        ss = s.conj().T @ s
        out += 2.0 * (s @ rho @ s.conj().T) - ss @ rho - rho @ ss
    return rate * out


def rho_dot(rho, spec: ChannelSpec, d: int | None = None) -> np.ndarray:
    """Master-equation right-hand side for the given channel.

    Builds the channel's jump operators, embeds them on every coupled
    side, and applies the Lindblad generator (see the module docstring for
    the per-transition treatment of the decay family).
    """
    rho, d = check_density(rho, d)
    return _generator_ops(spec, d).apply(rho)
