"""Contrastive loss term decomposition and balance coefficients."""

from balance_hpo.losses.contrastive import (
    BalanceCoeffs,
    InfoNceParams,
    LabeledBatch,
    MarginParams,
    PairPartition,
    TermPair,
    balanced_loss,
    combine,
    effective_rates,
    global_average_coeffs,
    global_average_coeffs_from_counts,
    infonce_terms,
    margin_terms,
    partition_pairs,
    separate_average_coeffs,
)

__all__ = [
    "BalanceCoeffs",
    "InfoNceParams",
    "LabeledBatch",
    "MarginParams",
    "PairPartition",
    "TermPair",
    "balanced_loss",
    "combine",
    "effective_rates",
    "global_average_coeffs",
    "global_average_coeffs_from_counts",
    "infonce_terms",
    "margin_terms",
    "partition_pairs",
    "separate_average_coeffs",
]
