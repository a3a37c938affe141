"""Average-precision family for ranked binary relevance lists.

Relevance is binary and lists are in rank order (first element is rank 1).
For a query with R relevant candidates:

- AP       = (1/R) Σ_k P(k)·rel(k) over the whole list
- AP-topR  = AP of the list truncated to its first R ranks, normalised by the
             number of relevant items inside that truncation (mean: R-mAP)
- AP@R     = (1/R) Σ_{k<=R} P(k)·rel(k) (mean: mAP@R)
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from balance_hpo.exceptions import FormatError, InvalidConfig, NoRelevantItems

logger = logging.getLogger(__name__)

Relevance = Union[Sequence[int], np.ndarray]


class Metric(str, Enum):
    AP = "AP"
    AP_TOP_R = "AP-topR"
    AP_AT_R = "AP@R"

    @classmethod
    def parse(cls, name: str) -> "Metric":
        key = name.strip().lower().replace("_", "-")
        for metric in cls:
            if key in (metric.value.lower(), metric.name.lower().replace("_", "-")):
                return metric
        raise InvalidConfig(f"unknown metric '{name}' (choose from {', '.join(m.value for m in cls)})")


def _relevance(r: Relevance) -> np.ndarray:
    rel = np.asarray(r)
    if rel.ndim != 1 or rel.size == 0:
        raise InvalidConfig(f"relevance must be a non-empty 1D list, got shape {rel.shape}")
    if not np.all((rel == 0) | (rel == 1)):
        raise InvalidConfig("relevance entries must be 0 or 1")
    return rel.astype(int)


def _precision_at_ranks(rel: np.ndarray) -> np.ndarray:
    return np.cumsum(rel) / np.arange(1, rel.size + 1)


def _num_relevant(rel: np.ndarray) -> int:
    total = int(rel.sum())
    if total == 0:
        raise NoRelevantItems("ranked list has no relevant item")
    return total


def average_precision(r: Relevance) -> float:
    """AP over the full candidate list."""
    rel = _relevance(r)
    total = _num_relevant(rel)
    return float(np.sum(_precision_at_ranks(rel) * rel) / total)


def average_precision_delta_recall(r: Relevance) -> float:
    """AP written as Σ_k P(k)·Δr(k), with Δr(k) the recall gained at rank k."""
    rel = _relevance(r)
    total = _num_relevant(rel)
    recall = np.cumsum(rel) / total
    delta_recall = np.diff(recall, prepend=0.0)
    return float(np.sum(_precision_at_ranks(rel) * delta_recall))


def ap_top_r(r: Relevance) -> float:
    """AP of the top-R truncation, normalised by relevant items found there."""
    rel = _relevance(r)
    total = _num_relevant(rel)
    top = rel[:total]
    found = int(top.sum())
    if found == 0:
        return 0.0
    return float(np.sum(_precision_at_ranks(top) * top) / found)


def ap_at_r(r: Relevance) -> float:
    """Truncated sum over the first R ranks, normalised by R."""
    rel = _relevance(r)
    total = _num_relevant(rel)
    top = rel[:total]
    return float(np.sum(_precision_at_ranks(top) * top) / total)


METRIC_FUNCTIONS: Dict[Metric, Callable[[Relevance], float]] = {
    Metric.AP: average_precision,
    Metric.AP_TOP_R: ap_top_r,
    Metric.AP_AT_R: ap_at_r,
}


@dataclass
class QuerySetResult:
    """Ranked relevance lists, one per query."""

    queries: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def from_rows(cls, rows: Sequence[Relevance]) -> "QuerySetResult":
        return cls(queries=[_relevance(row) for row in rows])

    def relevant_counts(self) -> List[int]:
        return [int(np.sum(q)) for q in self.queries]

    def __len__(self) -> int:
        return len(self.queries)


def per_query_metric(qs: QuerySetResult, which: Union[Metric, str]) -> List[Union[float, None]]:
    """Metric value per query; None for queries without relevant items."""
    metric = which if isinstance(which, Metric) else Metric.parse(which)
    fn = METRIC_FUNCTIONS[metric]
    return [fn(q) if np.any(q) else None for q in qs.queries]


def mean_metric(qs: QuerySetResult, which: Union[Metric, str]) -> Tuple[float, int]:
    """Mean over queries with at least one relevant item, plus the skipped count."""
    values = per_query_metric(qs, which)
    kept = [v for v in values if v is not None]
    skipped = len(values) - len(kept)
    if not kept:
        raise NoRelevantItems(f"all {len(values)} queries have no relevant item")
    if skipped:
        logger.info(f"Skipped {skipped} of {len(values)} queries without relevant items")
    return float(np.mean(kept)), skipped


def load_relevance(path: Union[str, Path]) -> QuerySetResult:
    """Read one comma-separated 0/1 relevance row per query; rows may differ in length."""
    path = Path(path)
    rows = []
    for row, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",") if c.strip()]
        if any(c not in ("0", "1") for c in cells):
            raise FormatError(f"relevance values must be 0 or 1, got {line!r}", row=row)
        rows.append([int(c) for c in cells])
    if not rows:
        raise FormatError(f"{path} holds no relevance rows")
    return QuerySetResult.from_rows(rows)
