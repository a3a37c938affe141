"""Objective abstraction: a deterministic score M(h), higher is better."""

from dataclasses import dataclass
from typing import Callable, Protocol, runtime_checkable

from balance_hpo.space.reparam import HyperConfig


@runtime_checkable
class Objective(Protocol):
    """Anything callable on a HyperConfig that returns a float score.

    Implementations raise `ObjectiveError` or `OutOfDomain` on failure; the
    engine turns those into a score of -inf.
    """

    name: str

    def __call__(self, h: HyperConfig) -> float:
        ...


@dataclass
class FunctionObjective:
    """Adapter for a plain Python callable."""

    fn: Callable[[HyperConfig], float]
    name: str = "function"

    def __call__(self, h: HyperConfig) -> float:
        return float(self.fn(h))
