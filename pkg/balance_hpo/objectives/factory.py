"""Objective references: `grid:<file>`, `synthetic:<preset-or-json>`, `cmd:<template>`."""

import logging
from typing import Optional

from balance_hpo.config import HpoConfig
from balance_hpo.exceptions import InvalidConfig
from balance_hpo.objectives.base import Objective
from balance_hpo.objectives.external import ExternalCommandObjective, ExternalCommandSpec
from balance_hpo.objectives.grid import PerformanceGrid, grid_hull, grid_load
from balance_hpo.objectives.synthetic import load_landscape
from balance_hpo.space.reparam import SearchSpace, standard_space

logger = logging.getLogger(__name__)

OBJECTIVE_KINDS = ("grid", "synthetic", "cmd")


def make_objective(reference: str, config: Optional[HpoConfig] = None) -> Objective:
    """Build an objective from its reference string."""
    kind, sep, target = reference.partition(":")
    if not sep or kind not in OBJECTIVE_KINDS or not target.strip():
        raise InvalidConfig(
            f"objective reference must look like grid:<file>, synthetic:<preset-or-file> "
            f"or cmd:\"<template>\", got {reference!r}"
        )
    target = target.strip()
    if kind == "grid":
        return grid_load(target)
    if kind == "synthetic":
        return load_landscape(target)
    config = config or HpoConfig()
    return ExternalCommandObjective(ExternalCommandSpec.from_config(target, config))


def default_space(objective: Objective, dims: int = 2) -> SearchSpace:
    """Grid hull for grid objectives, the standard ranges otherwise."""
    if isinstance(objective, PerformanceGrid):
        return grid_hull(objective)
    return standard_space(dims)
