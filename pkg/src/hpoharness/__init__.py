"""Budgeted hyperparameter optimization with automated troubleshooting.

Grid-search baselines define the time currency (1 GST = the grid's
serial runtime); HPO runs (random search, ASHA, TPE+ASHA) execute under
multiples of it; runs and rounds are classified against the baseline for
HPO-level overfitting; and a troubleshooting loop reduces the search
space or raises the budget until a terminal verdict.
"""

__version__ = "0.1.0"

from .engine import BudgetSpec, SurrogateEvaluator, run_grid_search, run_hpo
from .procedure import Action, mine_fix_candidates, run_procedure
from .space import Categorical, Fixed, GridSpec, LogUniform, SearchSpace, Uniform
from .verdict import RunScores, Verdict, classify_round, classify_run

__all__ = [
    "Action",
    "BudgetSpec",
    "Categorical",
    "Fixed",
    "GridSpec",
    "LogUniform",
    "RunScores",
    "SearchSpace",
    "SurrogateEvaluator",
    "Uniform",
    "Verdict",
    "classify_round",
    "classify_run",
    "mine_fix_candidates",
    "run_grid_search",
    "run_hpo",
    "run_procedure",
]
