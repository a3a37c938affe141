"""Retrieval metrics (AP family) and HPO trajectory metrics (AUC@k, n-95)."""

from balance_hpo.metrics.retrieval import (
    METRIC_FUNCTIONS,
    Metric,
    QuerySetResult,
    ap_at_r,
    ap_top_r,
    average_precision,
    average_precision_delta_recall,
    load_relevance,
    mean_metric,
    per_query_metric,
)
from balance_hpo.metrics.trajectory import auc_at, best_so_far, format_n95, n95, n95_threshold, padded_curve

__all__ = [
    "METRIC_FUNCTIONS",
    "Metric",
    "QuerySetResult",
    "ap_at_r",
    "ap_top_r",
    "auc_at",
    "average_precision",
    "average_precision_delta_recall",
    "best_so_far",
    "format_n95",
    "load_relevance",
    "mean_metric",
    "n95",
    "n95_threshold",
    "padded_curve",
    "per_query_metric",
]
