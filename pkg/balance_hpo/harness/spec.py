"""
Comparison specs: which methods race on which objective.

A spec is a JSON document such as

    {
      "objective": "synthetic:ridge@0.01@3",
      "space": {"lambda_p": [1e-6, 17], "lambda_e": [1e-6, 17], "batch_size": 64},
      "budget": 50,
      "trajectories": 20,
      "methods": [
        {"name": "cd-balance", "kind": "cd", "matrix": "balance", "budgets": [3, 3]},
        {"name": "random", "kind": "random"}
      ]
    }

`space` may also be a path to a space file; when omitted, grid objectives use
their hull and every other objective the standard ranges (`dims` 2 or 3).
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from balance_hpo.config import HpoConfig
from balance_hpo.engine.coordinate_descent import BudgetPolicy
from balance_hpo.exceptions import FormatError
from balance_hpo.objectives.base import Objective
from balance_hpo.objectives.factory import default_space
from balance_hpo.space.loader import load_search_space, space_from_dict
from balance_hpo.space.reparam import ReparamMatrix, SearchSpace, parse_matrix

logger = logging.getLogger(__name__)


class MethodSpec(BaseModel):
    """One HPO method entered into a comparison."""

    name: str
    kind: Literal["cd", "random"] = "cd"
    matrix: str = "balance"
    budgets: Optional[List[int]] = None  # Default (3, 3) in 2D, (3, 3, 3) in 3D
    order: Optional[List[int]] = None
    reverse: bool = False
    slope_threshold: Optional[float] = None
    multiplier: Optional[float] = None

    @field_validator("name")
    @classmethod
    def _non_empty_name(cls, value: str) -> str:
        if not value.strip() or "/" in value:
            raise ValueError(f"method name must be non-empty and contain no '/', got {value!r}")
        return value

    @field_validator("budgets")
    @classmethod
    def _budget_shape(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (len(value) not in (2, 3) or min(value) < 1):
            raise ValueError(f"budgets must be 2 or 3 integers >= 1, got {value}")
        return value

    def reparam_matrix(self) -> ReparamMatrix:
        return parse_matrix(self.matrix)

    def budget_policy(self, total: int, active_dims: int, config: HpoConfig) -> BudgetPolicy:
        budgets = self.budgets or ([3, 3, 3] if active_dims == 3 else [3, 3])
        return BudgetPolicy(
            initial=tuple(budgets),
            total=total,
            slope_threshold=self.slope_threshold or config.slope_threshold,
            multiplier=self.multiplier or config.budget_multiplier,
        )


class ComparisonSpec(BaseModel):
    """Everything needed to rerun a comparison exactly."""

    objective: str
    methods: List[MethodSpec]
    space: Optional[Union[str, Dict[str, Any]]] = None
    dims: Literal[2, 3] = 2
    budget: int = 50
    trajectories: int = 80
    base_seed: int = 0
    auc_checkpoints: List[int] = [10, 20]
    max_workers: int = 1

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, value: List[MethodSpec]) -> List[MethodSpec]:
        if not value:
            raise ValueError("a comparison needs at least one method")
        names = [m.name for m in value]
        if len(set(names)) != len(names):
            raise ValueError(f"method names must be unique, got {names}")
        return value

    @model_validator(mode="after")
    def _check_counts(self) -> "ComparisonSpec":
        if self.trajectories < 1:
            raise ValueError(f"trajectories must be >= 1, got {self.trajectories}")
        if self.max_workers < 1:
            raise ValueError(f"max_workers must be >= 1, got {self.max_workers}")
        if not self.auc_checkpoints or min(self.auc_checkpoints) < 1:
            raise ValueError(f"AUC checkpoints must be >= 1, got {self.auc_checkpoints}")
        if self.budget < max(self.auc_checkpoints):
            raise ValueError(
                f"budget {self.budget} is below the largest AUC checkpoint {max(self.auc_checkpoints)}"
            )
        return self

    @property
    def seeds(self) -> List[int]:
        return [self.base_seed + t for t in range(self.trajectories)]

    def resolve_space(self, objective: Objective) -> SearchSpace:
        if self.space is None:
            return default_space(objective, dims=self.dims)
        if isinstance(self.space, dict):
            return space_from_dict(self.space)
        return load_search_space(self.space)

    def with_overrides(self, **overrides: Any) -> "ComparisonSpec":
        """Copy with some fields replaced; None values are ignored."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return ComparisonSpec.model_validate({**self.model_dump(), **changes})


def config_defaults(config: HpoConfig) -> Dict[str, Any]:
    """Spec fields whose defaults come from the environment."""
    return {
        "trajectories": config.trajectories,
        "auc_checkpoints": list(config.auc_checkpoints),
        "max_workers": config.max_workers,
    }


def load_comparison_spec(path: Union[str, Path], config: Optional[HpoConfig] = None) -> ComparisonSpec:
    """Read a spec file, or the spec bundled inside a previous report.json.

    Keys the file leaves out (trajectories, auc_checkpoints, max_workers)
    come from the config when one is given.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise FormatError(f"comparison spec not found: {path}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON in {path}: {e.msg}", row=e.lineno) from None
    if isinstance(data, dict) and "spec" in data and "results" in data:
        data = data["spec"]
    if config is not None and isinstance(data, dict):
        data = {**config_defaults(config), **data}
    try:
        spec = ComparisonSpec.model_validate(data)
    except ValidationError as e:
        raise FormatError(f"invalid comparison spec {path}: {e}") from None
    logger.info(f"Loaded comparison spec from {path}: {len(spec.methods)} methods, budget {spec.budget}")
    return spec
