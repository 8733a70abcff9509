"""Invariant coordinate selection anonymization (ICSA) and spectral anonymization (SA)."""

from .anonymize import (
    METHODS,
    PAIRINGS,
    SA,
    AnonymizationRequest,
    anonymize,
    anonymize_table,
    permute_columns,
    rediscretize_binary,
)
from .data import DataMatrix, load_csv, write_csv
from .evaluate import EvaluationReport, evaluate_real
from .ics import IcsModel, back_transform, fit_ics
from .linalg import random_orthogonal, rng_stream, sym_eigen, sym_pow
from .metrics import lasso_cv, ols, ore, rpe, rpe_ratio_ci, selection_metrics, utility_distance
from .scatter import ScatterEstimate, ScatterSpec, estimate
from .simulate import gen_scenario1, gen_scenario2, run_grid, write_grid_csv
from .theory import check_theorem, theorem_bound

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "PAIRINGS",
    "SA",
    "AnonymizationRequest",
    "DataMatrix",
    "EvaluationReport",
    "IcsModel",
    "ScatterEstimate",
    "ScatterSpec",
    "anonymize",
    "anonymize_table",
    "back_transform",
    "check_theorem",
    "estimate",
    "evaluate_real",
    "fit_ics",
    "gen_scenario1",
    "gen_scenario2",
    "lasso_cv",
    "load_csv",
    "ols",
    "ore",
    "permute_columns",
    "random_orthogonal",
    "rediscretize_binary",
    "rng_stream",
    "rpe",
    "rpe_ratio_ci",
    "run_grid",
    "selection_metrics",
    "sym_eigen",
    "sym_pow",
    "theorem_bound",
    "utility_distance",
    "write_csv",
    "write_grid_csv",
]
