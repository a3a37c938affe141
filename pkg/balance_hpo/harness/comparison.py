"""
Multi-trajectory comparison of HPO methods on one objective.

Every method runs `trajectories` independent trajectories with seeds
base_seed + t. A coordinate-descent trajectory draws its start point
log-uniformly from that seed; random search draws its samples from it.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from balance_hpo.config import HpoConfig
from balance_hpo.engine.cache import CacheStats
from balance_hpo.engine.coordinate_descent import CdSettings, coordinate_descent
from balance_hpo.engine.history import TrialHistory
from balance_hpo.engine.random_search import random_search, sample_log_uniform
from balance_hpo.exceptions import ComparisonFailed
from balance_hpo.harness.parallel_executor import TrajectoryExecutor, TrajectoryJob
from balance_hpo.harness.spec import ComparisonSpec, MethodSpec
from balance_hpo.metrics.trajectory import auc_at, format_n95, n95, padded_curve
from balance_hpo.objectives.base import Objective
from balance_hpo.objectives.factory import make_objective
from balance_hpo.space.reparam import SearchSpace

logger = logging.getLogger(__name__)


@dataclass
class MethodReport:
    """Aggregated trajectories of one method."""

    name: str
    kind: str
    curves: np.ndarray  # (trajectories, budget) best-so-far curves
    auc: Dict[int, float] = field(default_factory=dict)
    n95: Optional[int] = None
    cache: CacheStats = field(default_factory=CacheStats)
    final_best: List[float] = field(default_factory=list)

    @property
    def mean_curve(self) -> np.ndarray:
        return self.curves.mean(axis=0)

    @property
    def budget(self) -> int:
        return int(self.curves.shape[1])

    @property
    def n95_label(self) -> str:
        return format_n95(self.n95, self.budget)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "auc": {f"auc@{k}": v for k, v in self.auc.items()},
            "n95": self.n95_label,
            "mean_curve": self.mean_curve.tolist(),
            "curves": self.curves.tolist(),
            "final_best": self.final_best,
            "cache": self.cache.to_dict(),
        }


@dataclass
class ComparisonResult:
    spec: ComparisonSpec
    space: SearchSpace
    reports: List[MethodReport]
    n95_threshold: float

    def report(self, name: str) -> MethodReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.model_dump(mode="json"),
            "space": self.space.to_dict(),
            "seeds": self.spec.seeds,
            "n95_threshold": self.n95_threshold,
            "results": [r.to_dict() for r in self.reports],
        }


def _trajectory_runner(
    method: MethodSpec,
    objective: Objective,
    space: SearchSpace,
    spec: ComparisonSpec,
    config: HpoConfig,
    seed: int,
) -> Callable[[], TrialHistory]:
    if method.kind == "random":
        return lambda: random_search(objective, space, spec.budget, seed=seed)

    settings_kwargs = dict(
        space=space,
        matrix=method.reparam_matrix(),
        policy=method.budget_policy(spec.budget, len(space.active_dims), config),
        order=tuple(method.order) if method.order else None,
        reverse=method.reverse,
    )

    def run() -> TrialHistory:
        start = sample_log_uniform(space, np.random.default_rng(seed))
        return coordinate_descent(objective, CdSettings(start=start, **settings_kwargs))

    return run


def run_method(
    method: MethodSpec,
    objective: Objective,
    space: SearchSpace,
    spec: ComparisonSpec,
    config: Optional[HpoConfig] = None,
) -> MethodReport:
    """Run all trajectories of one method; any failure aborts the method."""
    config = config or HpoConfig()
    try:
        jobs = [
            TrajectoryJob(
                label=f"{method.name}#{t}",
                run=_trajectory_runner(method, objective, space, spec, config, seed),
            )
            for t, seed in enumerate(spec.seeds)
        ]
    except Exception as e:
        raise ComparisonFailed(method.name, e) from e

    results = TrajectoryExecutor(spec.max_workers).run(jobs)
    failed = [r for r in results if not r.success]
    if failed:
        raise ComparisonFailed(method.name, failed[0].error) from failed[0].error

    histories: List[TrialHistory] = [r.value for r in results]
    curves = np.vstack([padded_curve(h, spec.budget) for h in histories])
    cache = CacheStats()
    for h in histories:
        if h.cache_stats is not None:
            cache.hits += h.cache_stats.hits
            cache.misses += h.cache_stats.misses

    report = MethodReport(
        name=method.name,
        kind=method.kind,
        curves=curves,
        cache=cache,
        final_best=[float(c[-1]) for c in curves],
    )
    report.auc = {k: auc_at(report.mean_curve, k) for k in spec.auc_checkpoints}
    logger.info(
        f"Method '{method.name}' done: "
        + ", ".join(f"AUC@{k}={v:.4f}" for k, v in report.auc.items())
        + f", cache hit rate {cache.hit_rate:.1f}%"
    )
    return report


def run_comparison(
    spec: ComparisonSpec,
    config: Optional[HpoConfig] = None,
    objective: Optional[Objective] = None,
) -> ComparisonResult:
    """Run every method of the spec and score them against each other.

    Args:
        spec: Validated comparison spec
        config: Runtime configuration (budget-rule defaults, command settings)
        objective: Pre-built objective; built from `spec.objective` when omitted

    Returns:
        ComparisonResult with one MethodReport per method, in spec order
    """
    config = config or HpoConfig()
    objective = objective if objective is not None else make_objective(spec.objective, config)
    space = spec.resolve_space(objective)
    logger.info(
        f"Comparing {len(spec.methods)} method(s) on {spec.objective}: "
        f"{spec.trajectories} trajectories x {spec.budget} trials, active dims {space.active_dims}"
    )

    reports = [run_method(method, objective, space, spec, config) for method in spec.methods]

    reached, threshold = n95({r.name: r.mean_curve for r in reports}, spec.budget)
    for report in reports:
        report.n95 = reached[report.name]
        aucs = [report.auc[k] for k in sorted(report.auc)]
        if any(a > b + 1e-12 for a, b in zip(aucs, aucs[1:])):
            logger.warning(f"Method '{report.name}': AUC decreases with the checkpoint {report.auc}")

    return ComparisonResult(spec=spec, space=space, reports=reports, n95_threshold=threshold)
