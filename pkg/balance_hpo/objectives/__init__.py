"""Objective backends: performance grids, synthetic landscapes, external commands."""

from balance_hpo.objectives.base import FunctionObjective, Objective
from balance_hpo.objectives.external import (
    ExternalCommandObjective,
    ExternalCommandSpec,
    external_eval,
    round_batch_size,
)
from balance_hpo.objectives.factory import default_space, make_objective
from balance_hpo.objectives.grid import (
    PerformanceGrid,
    grid_from_function,
    grid_hull,
    grid_interpolate,
    grid_load,
    grid_save,
)
from balance_hpo.objectives.synthetic import (
    SyntheticLandscape,
    load_landscape,
    make_landscape,
    ridge_suite,
    synthetic_eval,
)

__all__ = [
    "ExternalCommandObjective",
    "ExternalCommandSpec",
    "FunctionObjective",
    "Objective",
    "PerformanceGrid",
    "SyntheticLandscape",
    "default_space",
    "external_eval",
    "grid_from_function",
    "grid_hull",
    "grid_interpolate",
    "grid_load",
    "grid_save",
    "load_landscape",
    "make_landscape",
    "make_objective",
    "ridge_suite",
    "round_batch_size",
    "synthetic_eval",
]
