"""Recursive randomized and quantum-model algorithms for initial-value problems."""

from .jets import Jet, RhsProgram, VectorJet, ode_taylor_coeffs, truncated_taylor_of_f
from .mean_estimation import MeanRequest, MeanResult, estimate_mean, midpoint_nodes
from .piecewise import PiecewisePoly, integrate_composed, sup_norm_distance
from .problems import NamedProblem, autonomize, builtin
from .solver import (
    CostLedger,
    IVProblem,
    SolverConfig,
    alpha_exponent,
    beta_exponent,
    choose_k,
    delta1_of,
    params_for_level,
    plan_for_epsilon,
    psi_count,
    solve_A1,
    solve_As,
    taylor_step,
)

__version__ = "0.1.0"
