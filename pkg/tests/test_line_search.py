"""Unit tests for the bounded golden-section line search."""

import math

import numpy as np
import pytest

from balance_hpo.engine import TrajectoryEvaluator, compute_bracket, line_search, point_on_line
from balance_hpo.exceptions import InvalidConfig, InvalidDirection, InvalidStart
from balance_hpo.objectives import FunctionObjective
from balance_hpo.space import HyperConfig, SearchSpace, standard_space

# Λp in [1, e]: log Λp runs over [0, 1]; the other dimensions are pinned.
UNIT_LINE = SearchSpace((1.0, math.e), (1.0, 1.0), (64.0, 64.0))
ANCHOR = HyperConfig(1.0, 1.0, 64.0)
AXIS = (1.0, 0.0, 0.0)


def evaluator_for(fn, space=UNIT_LINE, total_budget=None):
    return TrajectoryEvaluator(FunctionObjective(fn), space, total_budget=total_budget)


class TestComputeBracket:
    """Tests for line/box intersection."""

    def test_unit_line(self):
        """Test the unit line gives [0, 1]."""
        assert compute_bracket(ANCHOR, AXIS, UNIT_LINE) == pytest.approx((0.0, 1.0))

    def test_batch_direction(self):
        """Test b=64 in [16, 512] along the batch row gives (-log 4, log 8)."""
        lo, hi = compute_bracket(HyperConfig(1, 1, 64), (0, 0, 1), standard_space(dims=3))
        assert lo == pytest.approx(-math.log(4))
        assert hi == pytest.approx(math.log(8))

    def test_negative_component(self):
        """Test a negative component swaps that dimension's limits."""
        space = standard_space()
        h = HyperConfig(1.0, 1.0, 64)
        lo, hi = compute_bracket(h, (-1, 1, 0), space)
        # Λe hits 17 at γ = log 17; Λp hits 17 at γ = -log 17.
        assert lo == pytest.approx(-math.log(17))
        assert hi == pytest.approx(math.log(17))

    def test_bracket_contains_zero(self):
        """Test an anchor on the boundary still has γ = 0 in its bracket."""
        lo, hi = compute_bracket(HyperConfig(math.e, 1.0, 64.0), AXIS, UNIT_LINE)
        assert lo == pytest.approx(-1.0)
        assert hi == 0.0

    def test_pinned_direction(self):
        """Test a direction living only on pinned dimensions is rejected."""
        with pytest.raises(InvalidDirection):
            compute_bracket(HyperConfig(1, 1, 64), (0, 0, 1), standard_space(dims=2))

    def test_anchor_outside(self):
        """Test an anchor outside H is rejected."""
        with pytest.raises(InvalidStart):
            compute_bracket(HyperConfig(5.0, 1.0, 64.0), AXIS, UNIT_LINE)

    def test_point_on_line_is_clipped(self):
        """Test points at the bracket ends stay inside H."""
        h = point_on_line(ANCHOR, np.array(AXIS), 1.0, UNIT_LINE)
        assert h.lambda_p_rate <= math.e


class TestLineSearch:
    """Tests for line_search."""

    def test_finds_interior_optimum(self):
        """Test 12 evaluations land within 0.01 of γ = 0.3."""
        evaluator = evaluator_for(lambda h: -(math.log(h.lambda_p_rate) - 0.3) ** 2)
        result = line_search(evaluator, ANCHOR, AXIS, budget=12)
        assert result.best_gamma == pytest.approx(0.3, abs=0.01)
        assert result.fresh_evaluations == 12
        assert result.bracket == pytest.approx((0.0, 1.0))

    def test_single_evaluation(self):
        """Test budget 1 spends exactly one fresh evaluation after the anchor."""
        evaluator = evaluator_for(lambda h: -(math.log(h.lambda_p_rate) - 0.3) ** 2)
        result = line_search(evaluator, ANCHOR, AXIS, budget=1)
        assert result.fresh_evaluations == 1
        assert evaluator.fresh_count == 2

    def test_monotone_objective(self):
        """Test a monotone objective pushes γ to the upper end."""
        evaluator = evaluator_for(lambda h: math.log(h.lambda_p_rate))
        result = line_search(evaluator, ANCHOR, AXIS, budget=12)
        assert result.best_gamma == pytest.approx(1.0, abs=0.02)

    def test_anchor_dominance(self):
        """Test an anchor at the peak is kept."""
        evaluator = evaluator_for(lambda h: -math.log(h.lambda_p_rate) ** 2)
        result = line_search(evaluator, ANCHOR, AXIS, budget=8)
        assert result.best_config == ANCHOR
        assert result.best_gamma == 0.0
        assert result.best_score == result.anchor_score

    def test_best_never_below_anchor(self):
        """Test the returned score dominates the anchor for several shapes."""
        shapes = [
            lambda h: math.sin(7 * math.log(h.lambda_p_rate)),
            lambda h: -abs(math.log(h.lambda_p_rate) - 0.9),
            lambda h: 1.0,
        ]
        for fn in shapes:
            evaluator = evaluator_for(fn)
            anchor = HyperConfig(math.exp(0.5), 1.0, 64.0)
            result = line_search(evaluator, anchor, AXIS, budget=6)
            assert result.best_score >= result.anchor_score

    def test_repeat_search_is_served_from_cache(self):
        """Test a second identical search replays its probes from the cache."""
        evaluator = evaluator_for(lambda h: -(math.log(h.lambda_p_rate) - 0.3) ** 2)
        first = line_search(evaluator, ANCHOR, AXIS, budget=12)
        second = line_search(evaluator, ANCHOR, AXIS, budget=12)
        replayed = second.trials[:12]
        assert all(t.cached for t in replayed)
        assert [t.index for t in replayed] == [t.index for t in first.trials[1:]]

    def test_total_budget_caps_probes(self):
        """Test the trajectory budget stops the search before its own budget."""
        evaluator = evaluator_for(lambda h: -(math.log(h.lambda_p_rate) - 0.3) ** 2, total_budget=5)
        result = line_search(evaluator, ANCHOR, AXIS, budget=12)
        assert result.fresh_evaluations == 4
        assert evaluator.fresh_count == 5

    def test_invalid_budget(self):
        """Test budgets below 1 are refused."""
        with pytest.raises(InvalidConfig):
            line_search(evaluator_for(lambda h: 0.0), ANCHOR, AXIS, budget=0)
