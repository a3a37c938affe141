"""Search engine: evaluation cache, line search, coordinate descent and random search."""

from balance_hpo.engine.cache import CacheStats, EvaluationCache
from balance_hpo.engine.coordinate_descent import BudgetPolicy, CdSettings, coordinate_descent, default_settings
from balance_hpo.engine.evaluator import TrajectoryEvaluator
from balance_hpo.engine.history import TRIAL_CSV_COLUMNS, LineSearchRecord, Trial, TrialHistory
from balance_hpo.engine.line_search import (
    INV_PHI,
    INV_PHI_SQUARE,
    LineSearchResult,
    active_direction,
    compute_bracket,
    line_search,
    point_on_line,
)
from balance_hpo.engine.random_search import random_search, sample_log_uniform

__all__ = [
    "BudgetPolicy",
    "CacheStats",
    "CdSettings",
    "EvaluationCache",
    "INV_PHI",
    "INV_PHI_SQUARE",
    "LineSearchRecord",
    "LineSearchResult",
    "TRIAL_CSV_COLUMNS",
    "Trial",
    "TrialHistory",
    "TrajectoryEvaluator",
    "active_direction",
    "compute_bracket",
    "coordinate_descent",
    "default_settings",
    "line_search",
    "point_on_line",
    "random_search",
    "sample_log_uniform",
]
