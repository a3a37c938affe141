"""Random-search baseline: log-uniform samples over the active dimensions."""

import logging

import numpy as np

from balance_hpo.engine.evaluator import TrajectoryEvaluator
from balance_hpo.engine.history import TrialHistory
from balance_hpo.exceptions import InvalidConfig
from balance_hpo.objectives.base import Objective
from balance_hpo.space.reparam import HyperConfig, SearchSpace

logger = logging.getLogger(__name__)


def sample_log_uniform(space: SearchSpace, rng: np.random.Generator) -> HyperConfig:
    """One configuration drawn log-uniformly inside the space; pinned dimensions keep their value."""
    log_lo = np.log(space.lower)
    log_hi = np.log(space.upper)
    # Always draw three numbers so the stream does not depend on which dims are pinned.
    u = rng.uniform(size=3)
    values = np.where(space.active_mask, np.exp(log_lo + u * (log_hi - log_lo)), space.lower)
    return space.clip(values)


def random_search(objective: Objective, space: SearchSpace, budget: int, seed: int = 0) -> TrialHistory:
    """Evaluate `budget` independent log-uniform draws.

    Draws bypass the dedup cache: a repeat is its own budgeted trial, so
    pinned or very narrow spaces still finish after `budget` evaluations.
    """
    if budget < 1:
        raise InvalidConfig(f"random-search budget must be >= 1, got {budget}")
    rng = np.random.default_rng(seed)
    evaluator = TrajectoryEvaluator(objective, space, total_budget=budget, method="random", dedup=False)
    for _ in range(budget):
        evaluator.evaluate(sample_log_uniform(space, rng))

    history = evaluator.history
    history.cache_stats = evaluator.cache.stats
    logger.info(f"Random search (seed {seed}) finished: best {history.best_score:.4g} after {budget} trials")
    return history
