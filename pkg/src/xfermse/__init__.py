"""Regression transferability estimation with ridge-regression scores."""

from .estimators import (
    ComplexitySpec,
    Method,
    TransferScore,
    complexity_term,
    generalization_gap,
    lab_mse,
    lemma1_check,
    lemma2_check,
    lin_mse,
    shared_lab_mse,
    theorem1_lower_bound,
    theorem2_lower_bound,
)
from .evalmetrics import (
    CorrelationReport,
    kendall_tau,
    linear_fit_rmse,
    pearson,
    spearman,
    top_k_matching_rate,
)
from .ridge import RidgeSolution, objective_at, predict, ridge_fit
from .synthbench import (
    TaskSpec,
    generate_task_family,
    head_retrain,
    run_benchmark,
    small_data_sweep,
)

__version__ = "0.1.0"
