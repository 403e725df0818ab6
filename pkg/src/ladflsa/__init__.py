"""Least absolute deviation fused lasso signal approximation.

Exact solvers for the LAD and least-squares fused lasso signal
approximators, brute-force oracles and KKT certificates, information
criteria with grid search, sufficient-condition evaluators and a small
simulation harness.
"""

from .model import (BlockPartition, FitResult, LossKind, TrueModel, TuningParams,
                    blocks_of, expand)
from .solver import (SolverOptions, objective, solve, solve_lad_flsa, solve_lad_fsa,
                     solve_ls_flsa)
from .oracle import (brute_force_lad_flsa, brute_force_ls_flsa, check_lemma1_bounds,
                     kkt_residual, kkt_residual_lad_flsa, kkt_residual_lad_fsa,
                     kkt_residual_ls_flsa)
from .selection import (Criterion, GridSpec, criterion, criterion_value, df_hat,
                        grid_select, mc_df)
from .theory import (check_conditions_B, check_conditions_C, consistency_outcome,
                     density_at_zero, lambda_n)

__version__ = "0.1.0"

__all__ = [
    "BlockPartition", "FitResult", "LossKind", "TrueModel", "TuningParams",
    "blocks_of", "expand",
    "SolverOptions", "objective", "solve", "solve_lad_flsa", "solve_lad_fsa",
    "solve_ls_flsa",
    "brute_force_lad_flsa", "brute_force_ls_flsa", "check_lemma1_bounds",
    "kkt_residual", "kkt_residual_lad_flsa", "kkt_residual_lad_fsa",
    "kkt_residual_ls_flsa",
    "Criterion", "GridSpec", "criterion", "criterion_value", "df_hat",
    "grid_select", "mc_df",
    "check_conditions_B", "check_conditions_C", "consistency_outcome",
    "density_at_zero", "lambda_n",
]
