"""Per-trajectory evaluation cache.

Configurations are matched in log-h space: two probes whose log coordinates
agree within a relative tolerance of 1e-9 share one objective evaluation.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from balance_hpo.space.reparam import HyperConfig

MATCH_RTOL = 1e-9


@dataclass
class CacheStats:
    """Statistics for cache performance tracking."""

    hits: int = 0
    misses: int = 0

    @property
    def total_requests(self) -> int:
        return self.hits + self.misses

    @property
    def hit_rate(self) -> float:
        """Calculate cache hit rate as percentage."""
        if self.total_requests == 0:
            return 0.0
        return (self.hits / self.total_requests) * 100

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hits": self.hits,
            "misses": self.misses,
            "total_requests": self.total_requests,
            "hit_rate": self.hit_rate,
        }


class EvaluationCache:
    """In-memory score store keyed by log-configuration.

    Not shared between trajectories; a trajectory is single-threaded so no
    locking is needed.
    """

    def __init__(self, rtol: float = MATCH_RTOL):
        self.rtol = rtol
        self.stats = CacheStats()
        self._keys: List[np.ndarray] = []
        self._entries: List[Tuple[float, int]] = []  # (score, trial index)

    def _find(self, log_h: np.ndarray) -> Optional[int]:
        if not self._keys:
            return None
        keys = np.vstack(self._keys)
        tolerance = self.rtol * np.maximum(1.0, np.abs(keys))
        matches = np.all(np.abs(keys - log_h) <= tolerance, axis=1)
        hits = np.flatnonzero(matches)
        return int(hits[0]) if hits.size else None

    def get(self, h: HyperConfig) -> Optional[Tuple[float, int]]:
        """Return (score, trial index) for a matching configuration, or None."""
        slot = self._find(h.log())
        if slot is None:
            self.stats.misses += 1
            return None
        self.stats.hits += 1
        return self._entries[slot]

    def peek(self, h: HyperConfig) -> Optional[Tuple[float, int]]:
        """Lookup without touching the statistics."""
        slot = self._find(h.log())
        return None if slot is None else self._entries[slot]

    def set(self, h: HyperConfig, score: float, index: int) -> None:
        self._keys.append(h.log())
        self._entries.append((score, index))

    def get_size(self) -> int:
        return len(self._entries)

    def clear(self) -> int:
        removed = len(self._entries)
        self._keys.clear()
        self._entries.clear()
        return removed
