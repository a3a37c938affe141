"""
Bounded golden-section line search along h_l·exp(γ·a).

The bracket [γ_min, γ_max] is the intersection of the line with the search
space, so it always contains the anchor γ = 0. Two interior probes at the
0.381966 / 0.618034 split are kept; each step discards the outer part beyond
the worse probe and evaluates one new point. Only fresh objective
evaluations consume budget.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from balance_hpo.engine.evaluator import TrajectoryEvaluator
from balance_hpo.engine.history import Trial
from balance_hpo.exceptions import InvalidConfig, InvalidDirection, InvalidStart
from balance_hpo.space.reparam import HyperConfig, SearchSpace, contains

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 0.618034
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 0.381966
BRACKET_RTOL = 1e-12

Direction = Union[Sequence[float], np.ndarray]


def active_direction(a: Direction, space: SearchSpace) -> np.ndarray:
    """Direction with components on pinned dimensions zeroed."""
    return np.asarray(a, dtype=float) * space.active_mask


def compute_bracket(h: HyperConfig, a: Direction, space: SearchSpace) -> Tuple[float, float]:
    """[γ_min, γ_max] such that h·exp(γ·a) stays inside the search space."""
    if not contains(space, h):
        raise InvalidStart(f"line anchor {h} lies outside the search space")
    direction = active_direction(a, space)
    if not np.any(direction):
        raise InvalidDirection(f"direction {list(a)} has no component on an active dimension")

    log_h = h.log()
    log_lo = np.log(space.lower)
    log_hi = np.log(space.upper)
    gamma_min, gamma_max = -math.inf, math.inf
    for i in np.flatnonzero(direction):
        low = (log_lo[i] - log_h[i]) / direction[i]
        high = (log_hi[i] - log_h[i]) / direction[i]
        if direction[i] < 0:
            low, high = high, low
        gamma_min = max(gamma_min, low)
        gamma_max = min(gamma_max, high)

    if gamma_min > gamma_max:
        raise InvalidStart(f"empty bracket for {h}: [{gamma_min}, {gamma_max}]")
    return min(gamma_min, 0.0), max(gamma_max, 0.0)


def point_on_line(h: HyperConfig, direction: np.ndarray, gamma: float, space: SearchSpace) -> HyperConfig:
    return space.clip(np.exp(h.log() + gamma * direction))


@dataclass
class LineSearchResult:
    """Best configuration on one line and the trials that found it."""

    best_config: HyperConfig
    best_score: float
    best_gamma: float
    anchor_score: float
    bracket: Tuple[float, float]
    budget: int
    fresh_evaluations: int = 0
    trials: List[Trial] = field(default_factory=list)

    def triple(self, lo: float, hi: float) -> Tuple[float, float, float]:
        """(γ_min, γ, γ_max) view used in log output."""
        return (lo, self.best_gamma, hi)


def line_search(
    evaluator: TrajectoryEvaluator,
    anchor: HyperConfig,
    a: Direction,
    budget: int,
) -> LineSearchResult:
    """Maximize the objective along one direction with at most `budget` fresh evaluations.

    Args:
        evaluator: Trajectory evaluator holding the objective, cache and history
        anchor: Line anchor h_l (γ = 0); served from the cache when already scored
        a: Direction in log-h space (one row of the reparameterization matrix)
        budget: Fresh evaluations allowed on this line

    Returns:
        LineSearchResult; its best score is never below the anchor's
    """
    if budget < 1:
        raise InvalidConfig(f"line-search budget must be >= 1, got {budget}")
    space = evaluator.space
    direction = active_direction(a, space)
    lo, hi = compute_bracket(anchor, a, space)
    first_trial = len(evaluator.history.trials)

    anchor_score = evaluator.lookup(anchor)
    if anchor_score is None:
        anchor_score, _ = evaluator.evaluate(anchor, force=True)

    result = LineSearchResult(
        best_config=anchor,
        best_score=anchor_score,
        best_gamma=0.0,
        anchor_score=anchor_score,
        bracket=(lo, hi),
        budget=budget,
    )

    def can_probe() -> bool:
        return result.fresh_evaluations < budget and evaluator.remaining > 0

    def probe(gamma: float) -> float:
        h = point_on_line(anchor, direction, gamma, space)
        score, cached = evaluator.evaluate(h)
        if not cached:
            result.fresh_evaluations += 1
        # Strict comparison: ties keep the earlier probe.
        if score > result.best_score:
            result.best_config, result.best_score, result.best_gamma = h, score, gamma
        return score

    tolerance = BRACKET_RTOL * max(1.0, hi - lo)
    if hi - lo > tolerance and can_probe():
        c = lo + INV_PHI_SQUARE * (hi - lo)
        d = lo + INV_PHI * (hi - lo)
        fc = probe(c)
        if can_probe():
            fd = probe(d)
            while can_probe() and hi - lo > tolerance:
                if fc >= fd:
                    hi, d, fd = d, c, fc
                    c = lo + INV_PHI_SQUARE * (hi - lo)
                    fc = probe(c)
                else:
                    lo, c, fc = c, d, fd
                    d = lo + INV_PHI * (hi - lo)
                    fd = probe(d)
                logger.debug(f"Golden-section bracket {result.triple(lo, hi)}")

    result.trials = evaluator.history.trials[first_trial:]
    return result
