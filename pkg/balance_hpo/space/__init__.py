"""Hyperparameter search space and log-space reparameterization."""

from balance_hpo.space.reparam import (
    DIMENSIONS,
    HyperConfig,
    ReparamMatrix,
    ReparamPoint,
    SearchSpace,
    contains,
    from_reparam,
    parse_matrix,
    preset_matrix,
    reparam_table,
    standard_space,
    to_reparam,
)
from balance_hpo.space.loader import load_search_space, space_from_dict

__all__ = [
    "DIMENSIONS",
    "HyperConfig",
    "ReparamMatrix",
    "ReparamPoint",
    "SearchSpace",
    "contains",
    "from_reparam",
    "load_search_space",
    "parse_matrix",
    "preset_matrix",
    "reparam_table",
    "standard_space",
    "space_from_dict",
    "to_reparam",
]
