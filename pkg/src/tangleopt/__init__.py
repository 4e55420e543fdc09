"""tangleopt: most robust entangled states under local dissipation.

A bipartite qudit toolkit built around a duplicated-space tangle
estimator: evaluate the estimate and its temporal increment under local
Lindblad dephasing/decay channels, integrate trajectories, and find the
fixed-tangle pure states whose entanglement survives longest.
"""

from .channels import ChannelSpec, embed_local, lindblad_apply, rho_dot, sigma_decay, sigma_dephasing
from .evolution import IntegrationError, Trajectory, evolve, rk4_step, tangle_trajectory
from .linalg import (SchmidtDecomposition, density_of, haar_state, haar_unitary,
                     partial_trace, pure_from_schmidt, purity, schmidt_of)
from .optimize import (GeneralOptimum, OptimizationResult, feasible_tau,
                       optimize_general, optimize_schmidt, oracle_random_search,
                       rate_grad, rate_of_schmidt, sweep_tau)
from .sampling import (InfeasibleTangle, SamplingError, schmidt_with_tangle,
                       state_with_tangle)
from .tangle import (build_projectors, build_witness, copy_swaps, tangle_bound,
                     tangle_bound_fast, tangle_max, tangle_pure, tangle_rate)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "GeneralOptimum",
    "IntegrationError",
    "InfeasibleTangle",
    "OptimizationResult",
    "SamplingError",
    "SchmidtDecomposition",
    "Trajectory",
    "build_projectors",
    "build_witness",
    "copy_swaps",
    "density_of",
    "embed_local",
    "evolve",
    "feasible_tau",
    "haar_state",
    "haar_unitary",
    "lindblad_apply",
    "optimize_general",
    "optimize_schmidt",
    "oracle_random_search",
    "partial_trace",
    "pure_from_schmidt",
    "purity",
    "rate_grad",
    "rate_of_schmidt",
    "rho_dot",
    "rk4_step",
    "schmidt_of",
    "schmidt_with_tangle",
    "sigma_decay",
    "sigma_dephasing",
    "state_with_tangle",
    "sweep_tau",
    "tangle_bound",
    "tangle_bound_fast",
    "tangle_max",
    "tangle_pure",
    "tangle_rate",
    "tangle_trajectory",
]
