"""
Best-so-far curves and the summary numbers reported per HPO method.

AUC@k is the mean of the curve over its first k trials, so it lives on the
objective's own scale. n-95 is the first trial at which a method's mean curve
reaches 95% of the best value any method attained.
"""

import logging
import math
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from balance_hpo.engine.history import TrialHistory
from balance_hpo.exceptions import EmptyHistory, InsufficientBudget, InvalidConfig

logger = logging.getLogger(__name__)

N95_FRACTION = 0.95

Curve = Union[Sequence[float], np.ndarray]


def best_so_far(history: TrialHistory) -> np.ndarray:
    """curve[t] = max score among the first t+1 budgeted trials."""
    scores = history.scores()
    if scores.size == 0:
        raise EmptyHistory("history has no budgeted trial")
    return np.maximum.accumulate(scores)


def padded_curve(history: TrialHistory, budget: int) -> np.ndarray:
    """Best-so-far curve stretched to `budget` trials.

    A trajectory that stopped early keeps its final best for the trials it
    did not spend.
    """
    curve = best_so_far(history)[:budget]
    if curve.size < budget:
        curve = np.concatenate([curve, np.full(budget - curve.size, curve[-1])])
    return curve


def auc_at(curve: Curve, k: int) -> float:
    """(1/k)·Σ_{t<=k} curve[t]."""
    values = np.asarray(curve, dtype=float)
    if k < 1:
        raise InvalidConfig(f"AUC checkpoint must be >= 1, got {k}")
    if k > values.size:
        raise InsufficientBudget(f"AUC@{k} needs {k} trials, curve has {values.size}")
    return float(np.mean(values[:k]))


def n95_threshold(best: float) -> float:
    """95% of the best value; for a negative best, 5% of its magnitude below it."""
    return best - (1 - N95_FRACTION) * abs(best)


def n95(curves: Mapping[str, Curve], budget: int) -> Tuple[Dict[str, Optional[int]], float]:
    """Trials each method needs to reach the shared 95% threshold.

    Args:
        curves: Mean best-so-far curve per method
        budget: Trials considered per curve

    Returns:
        ({method: first trial (1-based) or None when unreached}, threshold)
    """
    if not curves:
        raise InvalidConfig("n-95 needs at least one method")
    prefixes = {name: np.asarray(curve, dtype=float)[:budget] for name, curve in curves.items()}
    best = max(float(np.max(c)) for c in prefixes.values() if c.size)
    if not math.isfinite(best):
        logger.warning(f"Best mean score is {best}; n-95 is undefined for every method")
        return {name: None for name in prefixes}, best

    threshold = n95_threshold(best)
    result: Dict[str, Optional[int]] = {}
    for name, curve in prefixes.items():
        reached = np.flatnonzero(curve >= threshold)
        result[name] = int(reached[0]) + 1 if reached.size else None
    return result, threshold


def format_n95(value: Optional[int], budget: int) -> str:
    return str(value) if value is not None else f">{budget}"
