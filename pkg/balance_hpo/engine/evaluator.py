"""Budget-accounted objective evaluation for one trajectory."""

import logging
import math
from typing import Optional, Tuple

from balance_hpo.engine.cache import EvaluationCache
from balance_hpo.engine.history import Trial, TrialHistory
from balance_hpo.exceptions import HpoError, InsufficientBudget, OutOfDomain
from balance_hpo.objectives.base import Objective
from balance_hpo.space.reparam import HyperConfig, SearchSpace, contains

logger = logging.getLogger(__name__)


class TrajectoryEvaluator:
    """Wraps an objective with a cache, a trial history and a total budget.

    With dedup=False every call is a fresh, budgeted evaluation and the cache
    only records scores.

    Usage:
        evaluator = TrajectoryEvaluator(objective, space, total_budget=50)
        score, cached = evaluator.evaluate(h)
    """

    def __init__(
        self,
        objective: Objective,
        space: SearchSpace,
        total_budget: Optional[int] = None,
        method: str = "",
        dedup: bool = True,
    ):
        self.objective = objective
        self.dedup = dedup
        self.space = space
        self.total_budget = total_budget
        self.cache = EvaluationCache()
        self.history = TrialHistory(method=method)

    @property
    def fresh_count(self) -> int:
        return self.history.fresh_count

    @property
    def remaining(self) -> float:
        if self.total_budget is None:
            return math.inf
        return max(0, self.total_budget - self.fresh_count)

    def lookup(self, h: HyperConfig) -> Optional[float]:
        """Cached score for h without recording a trial."""
        entry = self.cache.peek(h)
        return None if entry is None else entry[0]

    def evaluate(self, h: HyperConfig, force: bool = False) -> Tuple[float, bool]:
        """Score h, serving repeats from the cache at zero budget.

        Args:
            h: Configuration inside the search space
            force: Evaluate even when the total budget is spent (trajectory anchor)

        Returns:
            (score, cached) tuple
        """
        if not contains(self.space, h):
            raise OutOfDomain(f"{h} lies outside the search space")

        hit = self.cache.get(h) if self.dedup else None
        if hit is not None:
            score, index = hit
            self.history.append(Trial(index=index, config=h, score=score, cached=True))
            logger.debug(f"Cache hit for {h}: {score:.6g} (trial {index})")
            return score, True

        if self.remaining <= 0 and not force:
            raise InsufficientBudget(f"total budget of {self.total_budget} evaluations is spent")

        index = self.fresh_count + 1
        score = self._score(h)
        self.cache.set(h, score, index)
        self.history.append(Trial(index=index, config=h, score=score))
        logger.debug(f"Trial {index}: {h} -> {score:.6g}")
        return score, False

    def _score(self, h: HyperConfig) -> float:
        try:
            score = float(self.objective(h))
        except HpoError as e:
            logger.warning(f"Objective failed at {h}: {e}; scoring -inf")
            return -math.inf
        if math.isnan(score):
            logger.warning(f"Objective returned NaN at {h}; scoring -inf")
            return -math.inf
        return score
