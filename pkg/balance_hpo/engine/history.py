"""Trial records for one HPO trajectory."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from balance_hpo.engine.cache import CacheStats
from balance_hpo.space.reparam import HyperConfig

TRIAL_CSV_COLUMNS = ("index", "lambda_p", "lambda_e", "batch_size", "score", "cached")


@dataclass(frozen=True)
class Trial:
    """One probe of the objective.

    Fresh trials are numbered 1, 2, ... in evaluation order. A cached trial
    reuses the index of the evaluation it was served from and costs no budget.
    """

    index: int
    config: HyperConfig
    score: float
    cached: bool = False

    def to_row(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "lambda_p": self.config.lambda_p_rate,
            "lambda_e": self.config.lambda_e_rate,
            "batch_size": self.config.batch_size,
            "score": self.score,
            "cached": self.cached,
        }


@dataclass(frozen=True)
class LineSearchRecord:
    """Summary of one completed line search."""

    direction: int
    budget: int
    bracket: Tuple[float, float]
    fresh_evaluations: int
    score_before: float
    score_after: float
    best_gamma: float

    @property
    def slope(self) -> float:
        """Best-so-far improvement per fresh evaluation (0 when nothing was evaluated)."""
        if self.fresh_evaluations == 0:
            return 0.0
        return (self.score_after - self.score_before) / self.fresh_evaluations


@dataclass
class TrialHistory:
    """Ordered trials of a trajectory plus its line-search log."""

    trials: List[Trial] = field(default_factory=list)
    line_searches: List[LineSearchRecord] = field(default_factory=list)
    method: str = ""
    cache_stats: Optional[CacheStats] = None

    def append(self, trial: Trial) -> None:
        self.trials.append(trial)

    @property
    def budgeted(self) -> List[Trial]:
        return [t for t in self.trials if not t.cached]

    @property
    def fresh_count(self) -> int:
        return len(self.budgeted)

    @property
    def cached_count(self) -> int:
        return len(self.trials) - self.fresh_count

    def best_trial(self) -> Optional[Trial]:
        """Highest-scoring fresh trial; ties resolve to the earliest."""
        best: Optional[Trial] = None
        for trial in self.budgeted:
            if best is None or trial.score > best.score:
                best = trial
        return best

    @property
    def best_config(self) -> Optional[HyperConfig]:
        best = self.best_trial()
        return best.config if best else None

    @property
    def best_score(self) -> float:
        best = self.best_trial()
        return best.score if best else -math.inf

    def scores(self) -> np.ndarray:
        """Scores of budgeted trials in evaluation order."""
        return np.array([t.score for t in self.budgeted], dtype=float)

    def to_rows(self) -> List[Dict[str, Any]]:
        return [t.to_row() for t in self.trials]
