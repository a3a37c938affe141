"""
Reparameterized coordinate-descent HPO.

Directions are the rows of the reparameterization matrix A, searched in a
fixed cyclic order; every line search is anchored at the incumbent. After a
line search whose best-so-far slope (improvement per fresh evaluation) falls
below the threshold, that direction's budget is multiplied.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from balance_hpo.engine.evaluator import TrajectoryEvaluator
from balance_hpo.engine.history import LineSearchRecord, TrialHistory
from balance_hpo.engine.line_search import active_direction, line_search
from balance_hpo.exceptions import InvalidConfig, InvalidDirection, InvalidStart
from balance_hpo.objectives.base import Objective
from balance_hpo.space.reparam import HyperConfig, ReparamMatrix, SearchSpace, contains, preset_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BudgetPolicy:
    """Per-direction budgets plus the slope-based increase rule."""

    initial: Tuple[int, ...] = (3, 3, 3)
    total: int = 50
    slope_threshold: float = 0.02
    multiplier: float = 2.0

    def __post_init__(self):
        if len(self.initial) not in (2, 3):
            raise InvalidConfig(f"need 2 or 3 per-direction budgets, got {self.initial}")
        if any(c < 1 for c in self.initial):
            raise InvalidConfig(f"per-direction budgets must be >= 1, got {self.initial}")
        if self.total < 0:
            raise InvalidConfig(f"total budget must be >= 0, got {self.total}")
        if self.slope_threshold <= 0:
            raise InvalidConfig(f"slope threshold must be > 0, got {self.slope_threshold}")
        if self.multiplier <= 1:
            raise InvalidConfig(f"budget multiplier must be > 1, got {self.multiplier}")

    def grow(self, budget: int) -> int:
        return int(math.ceil(budget * self.multiplier))


@dataclass(frozen=True)
class CdSettings:
    """Inputs of one coordinate-descent trajectory."""

    start: HyperConfig
    space: SearchSpace
    matrix: ReparamMatrix = field(default_factory=lambda: preset_matrix("balance"))
    policy: BudgetPolicy = field(default_factory=BudgetPolicy)
    order: Optional[Tuple[int, ...]] = None  # Row order; default 0, 1, 2
    reverse: bool = False

    def direction_cycle(self) -> List[int]:
        """Rows of A searched in turn, skipping rows with no active component."""
        order = list(self.order) if self.order is not None else [0, 1, 2]
        if sorted(set(order)) != sorted(order) or any(i not in (0, 1, 2) for i in order):
            raise InvalidConfig(f"direction order must list distinct rows 0-2, got {order}")
        if self.reverse:
            order = order[::-1]
        cycle = [i for i in order if np.any(active_direction(self.matrix.row(i), self.space))]
        if not cycle:
            raise InvalidDirection("no row of the matrix moves an active dimension")
        return cycle

    def initial_budgets(self, cycle: Sequence[int]) -> Dict[int, int]:
        """Map budgets to rows: three values index rows, two values follow the active rows."""
        initial = self.policy.initial
        if len(initial) == 3:
            return {i: initial[i] for i in cycle}
        active_rows = sorted(cycle)
        if len(active_rows) != 2:
            raise InvalidConfig(
                f"2 budgets given but {len(active_rows)} directions are active; pass 3 budgets"
            )
        return dict(zip(active_rows, initial))


def default_settings(start: HyperConfig, space: SearchSpace, total: int = 50) -> CdSettings:
    """Balance matrix, 3 trials per direction, balance direction first."""
    budgets = (3, 3, 3) if len(space.active_dims) == 3 else (3, 3)
    return CdSettings(start=start, space=space, policy=BudgetPolicy(initial=budgets, total=total))


def coordinate_descent(objective: Objective, settings: CdSettings) -> TrialHistory:
    """Run one coordinate-descent trajectory and return its history."""
    space = settings.space
    if not contains(space, settings.start):
        raise InvalidStart(f"start {settings.start} lies outside the search space")
    policy = settings.policy
    matrix = settings.matrix
    if not matrix.is_invertible:
        raise InvalidConfig(f"matrix '{matrix.name}' is singular")
    cycle = settings.direction_cycle()
    budgets = settings.initial_budgets(cycle)

    evaluator = TrajectoryEvaluator(objective, space, total_budget=policy.total, method="cd")
    incumbent = settings.start
    incumbent_score, _ = evaluator.evaluate(incumbent, force=True)
    logger.info(
        f"Coordinate descent from {incumbent} (score {incumbent_score:.4g}), "
        f"matrix={matrix.name}, directions={cycle}, budgets={budgets}, total={policy.total}"
    )

    idle = 0
    step = 0
    while evaluator.remaining > 0:
        row = cycle[step % len(cycle)]
        step += 1
        granted = int(min(budgets[row], evaluator.remaining))
        result = line_search(evaluator, incumbent, matrix.row(row), granted)

        record = LineSearchRecord(
            direction=row,
            budget=granted,
            bracket=result.bracket,
            fresh_evaluations=result.fresh_evaluations,
            score_before=incumbent_score,
            score_after=result.best_score,
            best_gamma=result.best_gamma,
        )
        evaluator.history.line_searches.append(record)
        incumbent, incumbent_score = result.best_config, result.best_score

        if record.slope < policy.slope_threshold:
            budgets[row] = policy.grow(budgets[row])
        logger.debug(
            f"Line search {len(evaluator.history.line_searches)} on row {row}: "
            f"{record.score_before:.4g} -> {record.score_after:.4g} "
            f"({record.fresh_evaluations} fresh, slope {record.slope:.4g}, next budget {budgets[row]})"
        )

        idle = idle + 1 if result.fresh_evaluations == 0 else 0
        if idle >= len(cycle):
            logger.info(f"Brackets collapsed on every direction after {evaluator.fresh_count} trials")
            break

    history = evaluator.history
    history.cache_stats = evaluator.cache.stats
    logger.info(
        f"Coordinate descent finished: best {history.best_score:.4g} at {incumbent} "
        f"after {evaluator.fresh_count} trials ({history.cached_count} cache hits)"
    )
    return history
