"""Weight design and antenna selection solvers."""
from .baseline import generalized_spectrum, min_ds_weights, min_quotient
from .spca import (
    EfficiencyConstraint,
    QcqpSolution,
    SolverReport,
    Termination,
    default_init,
    feasibility_residual,
    feasible_init,
    qcqp_subproblem,
    spca_minimize_ds,
)
from .sparse import (
    SelectionResult,
    l1_subproblem,
    select_antennas,
    support_of,
    two_step_select_and_weight,
)

__all__ = [
    "EfficiencyConstraint", "QcqpSolution", "SelectionResult", "SolverReport", "Termination",
    "default_init", "feasibility_residual", "feasible_init", "generalized_spectrum",
    "l1_subproblem", "min_ds_weights", "min_quotient", "qcqp_subproblem", "select_antennas",
    "spca_minimize_ds", "support_of", "two_step_select_and_weight",
]
