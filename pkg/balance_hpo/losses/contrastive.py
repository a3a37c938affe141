"""
Positive / entropy decomposition of contrastive losses.

Both losses are computed from a labeled pairwise-distance matrix M:

- margin loss:  ℓp = d^q on positive pairs, ℓe = max(0, m - d)^q on negative pairs
- InfoNCE:      ℓp = d_ij / τ, ℓe = log Σ_{k ∈ K_ij} exp(-d_ik / τ) on positive pairs,
                with K_ij = {j} ∪ {k : y_k != y_i}

and combined under an explicit balance L = λp·ℓ̄p + λe·ℓ̄e. Pairs are ordered:
(i, j) and (j, i) are both counted.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from balance_hpo.exceptions import DegenerateBatch, InvalidConfig
from balance_hpo.space.reparam import HyperConfig

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LabeledBatch:
    """Class ids y and the b×b distance matrix M with M_ij = d(z_i, z_j)."""

    labels: np.ndarray
    distances: np.ndarray
    mask: Optional[np.ndarray] = None  # False removes a pair from P, E and K

    def __post_init__(self):
        labels = np.asarray(self.labels)
        distances = np.asarray(self.distances, dtype=float)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "distances", distances)

        b = labels.shape[0] if labels.ndim == 1 else -1
        if b < 2:
            raise DegenerateBatch(f"a batch needs at least 2 items, got labels of shape {labels.shape}")
        if distances.shape != (b, b):
            raise InvalidConfig(f"distance matrix must be {b}x{b}, got {distances.shape}")
        if not np.all(np.isfinite(distances)):
            raise InvalidConfig("distance matrix has non-finite entries")
        if np.any(distances < 0):
            raise InvalidConfig("distance matrix has negative entries")
        if np.any(np.diag(distances) != 0):
            raise InvalidConfig("distance matrix must have a zero diagonal")
        if np.max(np.abs(distances - distances.T)) > SYMMETRY_TOLERANCE:
            raise InvalidConfig("distance matrix is not symmetric")
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != (b, b):
                raise InvalidConfig(f"pair mask must be {b}x{b}, got {mask.shape}")
            object.__setattr__(self, "mask", mask)

    @property
    def size(self) -> int:
        return int(self.labels.shape[0])


@dataclass(frozen=True)
class MarginParams:
    margin: float = 0.5
    exponent: int = 1

    def __post_init__(self):
        if not self.margin > 0:
            raise InvalidConfig(f"margin must be > 0, got {self.margin}")
        if self.exponent not in (1, 2):
            raise InvalidConfig(f"exponent must be 1 or 2, got {self.exponent}")


@dataclass(frozen=True)
class InfoNceParams:
    temperature: float = 0.1

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidConfig(f"temperature must be > 0, got {self.temperature}")


@dataclass(frozen=True)
class BalanceCoeffs:
    """Weights (λp, λe) of L = λp·ℓ̄p + λe·ℓ̄e."""

    lambda_p: float
    lambda_e: float

    def __post_init__(self):
        if self.lambda_p < 0 or self.lambda_e < 0:
            raise InvalidConfig(f"balance coefficients must be >= 0, got {self}")
        if self.lambda_p == 0 and self.lambda_e == 0:
            raise InvalidConfig("balance coefficients cannot both be zero")


@dataclass(frozen=True)
class TermPair:
    """Batch-level positive and entropy terms (ℓ̄p, ℓ̄e)."""

    pos_term: float
    ent_term: float

    def __post_init__(self):
        if not (np.isfinite(self.pos_term) and np.isfinite(self.ent_term)):
            raise InvalidConfig(f"loss terms must be finite, got {self}")


@dataclass(frozen=True)
class PairPartition:
    """Boolean b×b masks of the ordered positive set P and negative set E."""

    positive: np.ndarray
    negative: np.ndarray

    @property
    def num_positive(self) -> int:
        return int(self.positive.sum())

    @property
    def num_negative(self) -> int:
        return int(self.negative.sum())

    def positive_pairs(self) -> List[Tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.positive))]

    def negative_pairs(self) -> List[Tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.negative))]


def partition_pairs(
    labels: Union[Sequence[int], np.ndarray],
    mask: Optional[np.ndarray] = None,
) -> PairPartition:
    """Split ordered off-diagonal pairs into P (same label) and E (different labels)."""
    labels = np.asarray(labels)
    b = labels.shape[0]
    if b < 2:
        raise DegenerateBatch(f"a batch needs at least 2 items, got {b}")

    same = labels[:, None] == labels[None, :]
    off_diagonal = ~np.eye(b, dtype=bool)
    keep = off_diagonal if mask is None else off_diagonal & np.asarray(mask, dtype=bool)

    partition = PairPartition(positive=same & keep, negative=~same & keep)
    if partition.num_positive == 0:
        raise DegenerateBatch("batch has no positive pair (P is empty)")
    if partition.num_negative == 0:
        raise DegenerateBatch("batch has no negative pair (E is empty)")
    return partition


def margin_terms(batch: LabeledBatch, params: MarginParams) -> TermPair:
    """ℓ̄p = mean_P d^q, ℓ̄e = mean_E max(0, m - d)^q."""
    partition = partition_pairs(batch.labels, batch.mask)
    d = batch.distances
    q = params.exponent

    pos = d[partition.positive] ** q
    ent = np.maximum(0.0, params.margin - d[partition.negative]) ** q
    return TermPair(pos_term=float(pos.mean()), ent_term=float(ent.mean()))


def infonce_terms(batch: LabeledBatch, params: InfoNceParams) -> TermPair:
    """ℓ̄p = mean_P d_ij/τ, ℓ̄e = mean_P log Σ_{K_ij} exp(-d_ik/τ)."""
    partition = partition_pairs(batch.labels, batch.mask)
    logits = -batch.distances / params.temperature

    # Row-wise log-sum-exp over the negatives of anchor i (max-subtracted by scipy);
    # rows without negatives under the mask give -inf.
    with np.errstate(divide="ignore"):
        neg_lse = logsumexp(np.where(partition.negative, logits, -np.inf), axis=1)
    # Adding the positive j itself to K_ij.
    pair_lse = np.logaddexp(logits, neg_lse[:, None])

    pos = -logits[partition.positive]
    ent = pair_lse[partition.positive]
    return TermPair(pos_term=float(pos.mean()), ent_term=float(ent.mean()))


def combine(terms: TermPair, coeffs: BalanceCoeffs) -> float:
    """L = λp·ℓ̄p + λe·ℓ̄e."""
    return coeffs.lambda_p * terms.pos_term + coeffs.lambda_e * terms.ent_term


def global_average_coeffs(b: int) -> BalanceCoeffs:
    """Coefficients reproducing one mean over all b²-b pairs (2-per-class batches)."""
    if b < 3:
        raise DegenerateBatch(f"global average needs b >= 3 under 2-per-class sampling, got {b}")
    lambda_p = 1.0 / (b - 1)
    return BalanceCoeffs(lambda_p=lambda_p, lambda_e=1.0 - lambda_p)


def global_average_coeffs_from_counts(num_positive: int, num_negative: int) -> BalanceCoeffs:
    """|P|/(|P|+|E|), |E|/(|P|+|E|) for any label multiset."""
    if num_positive < 1 or num_negative < 1:
        raise DegenerateBatch(
            f"need at least one positive and one negative pair, got |P|={num_positive}, |E|={num_negative}"
        )
    total = num_positive + num_negative
    return BalanceCoeffs(lambda_p=num_positive / total, lambda_e=num_negative / total)


def separate_average_coeffs() -> BalanceCoeffs:
    """Independent means over positives and negatives: λp = λe = 1."""
    return BalanceCoeffs(lambda_p=1.0, lambda_e=1.0)


def balanced_loss(
    batch: LabeledBatch,
    params: Union[MarginParams, InfoNceParams],
    coeffs: BalanceCoeffs,
) -> Tuple[TermPair, float]:
    """Compute the terms for the loss family of `params` and combine them."""
    if isinstance(params, MarginParams):
        terms = margin_terms(batch, params)
    else:
        terms = infonce_terms(batch, params)
    loss = combine(terms, coeffs)
    logger.debug(f"Balanced loss: pos={terms.pos_term:.6g} ent={terms.ent_term:.6g} total={loss:.6g}")
    return terms, loss


def effective_rates(coeffs: BalanceCoeffs, learning_rate: float, batch_size: float) -> HyperConfig:
    """Λp = α·λp, Λe = α·λe: the two products that the search actually tunes."""
    if not learning_rate > 0:
        raise InvalidConfig(f"learning rate must be > 0, got {learning_rate}")
    return HyperConfig(learning_rate * coeffs.lambda_p, learning_rate * coeffs.lambda_e, batch_size)
