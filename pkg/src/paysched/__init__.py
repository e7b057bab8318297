"""Optimal scheduling of lump-sum contract payments.

A principal hires an agent whose hidden effort drives output; compensation
is restricted to lump sums at fixed dates.  The package solves the
principal's value surface period by period (hjb, payments, pipeline),
certifies it against analytic envelopes (bounds), and verifies it forward
by Monte Carlo and an independent trinomial program (simulate).
"""

from .hamiltonian import HamiltonianResult, optimal_z, optimal_z_discrete
from .hjb import (GridFunction, PeriodSolution, build_terminal, cfl_dt,
                  discrete_residual, eval_feedback, eval_surface, solve_period)
from .model import (GridSpec, Model, ModelParams, inverse_utility, load_model,
                    model_from_dict, utility, validate)
from .payments import PaymentLayer, intermediate_value
from .pipeline import (ContractSolution, NegotiationReport, compare_settings,
                       employment_interval, principal_value, refinement_delta,
                       renegotiation_reservations, solve_initial,
                       solve_renegotiation, truncation_region)
from .bounds import (Delta, SandwichReport, check_sandwich, phi_aggregate,
                     phi_single, search_delta0, verify_supersolution)
from .simulate import (DeviationReport, SimConfig, SimReport, agent_deviation,
                       dp_oracle, simulate_principal)

__version__ = "0.1.0"

__all__ = [
    "HamiltonianResult", "optimal_z", "optimal_z_discrete",
    "GridFunction", "PeriodSolution", "build_terminal", "cfl_dt",
    "discrete_residual", "eval_feedback", "eval_surface", "solve_period",
    "GridSpec", "Model", "ModelParams", "inverse_utility", "load_model",
    "model_from_dict", "utility", "validate",
    "PaymentLayer", "intermediate_value",
    "ContractSolution", "NegotiationReport", "compare_settings",
    "employment_interval", "principal_value", "refinement_delta",
    "renegotiation_reservations", "solve_initial", "solve_renegotiation",
    "truncation_region",
    "Delta", "SandwichReport", "check_sandwich", "phi_aggregate",
    "phi_single", "search_delta0", "verify_supersolution",
    "DeviationReport", "SimConfig", "SimReport", "agent_deviation",
    "dp_oracle", "simulate_principal",
]
