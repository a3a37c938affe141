"""Unit tests for the positive / entropy decomposition of contrastive losses."""

import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from balance_hpo.exceptions import DegenerateBatch, FormatError, InvalidConfig
from balance_hpo.losses import (
    BalanceCoeffs,
    InfoNceParams,
    LabeledBatch,
    MarginParams,
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
from balance_hpo.losses.io import load_batch


def two_per_class_labels(b: int) -> np.ndarray:
    return np.repeat(np.arange(b // 2), 2)


def constant_block_batch(pos_distance: float, neg_distance: float) -> LabeledBatch:
    labels = np.array([0, 0, 1, 1])
    same = labels[:, None] == labels[None, :]
    distances = np.where(same, pos_distance, neg_distance)
    np.fill_diagonal(distances, 0.0)
    return LabeledBatch(labels=labels, distances=distances)


def random_batch(rng: np.random.Generator, b: int) -> LabeledBatch:
    points = rng.normal(size=(b, 8))
    distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    distances = (distances + distances.T) / 2
    np.fill_diagonal(distances, 0.0)
    return LabeledBatch(labels=two_per_class_labels(b), distances=distances)


class TestPartitionPairs:
    """Tests for splitting ordered pairs into P and E."""

    def test_two_per_class(self):
        """Test b=4 gives |P|=4, |E|=8."""
        partition = partition_pairs([0, 0, 1, 1])
        assert partition.num_positive == 4
        assert partition.num_negative == 8

    def test_three_per_class(self):
        """Test three per class over 30 ordered pairs gives |P|=12, |E|=18."""
        partition = partition_pairs([0, 0, 0, 1, 1, 1])
        assert partition.num_positive == 12
        assert partition.num_negative == 18

    def test_no_positive_pair(self):
        """Test labels [0,1] have no positive pair."""
        with pytest.raises(DegenerateBatch):
            partition_pairs([0, 1])

    def test_no_negative_pair(self):
        """Test a single-class batch has no negative pair."""
        with pytest.raises(DegenerateBatch):
            partition_pairs([3, 3, 3])

    def test_mask_removes_pairs(self):
        """Test masked pairs leave both P and E."""
        mask = np.ones((4, 4), dtype=bool)
        mask[0, 1] = False
        mask[0, 2] = False
        partition = partition_pairs([0, 0, 1, 1], mask=mask)
        assert partition.num_positive == 3
        assert partition.num_negative == 7
        assert (0, 1) not in partition.positive_pairs()


class TestLabeledBatch:
    """Tests for batch validation."""

    def test_rejects_asymmetric(self):
        """Test an asymmetric matrix is refused."""
        distances = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(InvalidConfig):
            LabeledBatch(labels=np.array([0, 0]), distances=distances)

    def test_rejects_nonzero_diagonal(self):
        """Test a nonzero diagonal is refused."""
        with pytest.raises(InvalidConfig):
            LabeledBatch(labels=np.array([0, 0]), distances=np.ones((2, 2)))

    def test_rejects_shape_mismatch(self):
        """Test labels and matrix must agree in size."""
        with pytest.raises(InvalidConfig):
            LabeledBatch(labels=np.array([0, 0, 1]), distances=np.zeros((2, 2)))


class TestMarginTerms:
    """Tests for the margin-loss terms."""

    def test_block_batch_q1(self):
        """Test positives 0.2, negatives 0.1, m=0.5 give (0.2, 0.4)."""
        terms = margin_terms(constant_block_batch(0.2, 0.1), MarginParams(margin=0.5, exponent=1))
        assert terms.pos_term == pytest.approx(0.2)
        assert terms.ent_term == pytest.approx(0.4)

    def test_block_batch_q2(self):
        """Test the same batch with q=2 gives (0.04, 0.16)."""
        terms = margin_terms(constant_block_batch(0.2, 0.1), MarginParams(margin=0.5, exponent=2))
        assert terms.pos_term == pytest.approx(0.04)
        assert terms.ent_term == pytest.approx(0.16)

    def test_both_terms_vanish(self):
        """Test zero positive distances and negatives beyond the margin give (0, 0)."""
        terms = margin_terms(constant_block_batch(0.0, 0.7), MarginParams(margin=0.5))
        assert terms.pos_term == 0.0
        assert terms.ent_term == 0.0

    def test_invalid_params(self):
        """Test q outside {1,2} and non-positive margins are refused."""
        with pytest.raises(InvalidConfig):
            MarginParams(exponent=3)
        with pytest.raises(InvalidConfig):
            MarginParams(margin=0.0)


class TestInfoNceTerms:
    """Tests for the InfoNCE terms."""

    def test_block_batch(self):
        """Test positives 0.2, negatives 1.0, τ=0.1."""
        terms = infonce_terms(constant_block_batch(0.2, 1.0), InfoNceParams(temperature=0.1))
        assert terms.pos_term == pytest.approx(2.0)
        assert terms.ent_term == pytest.approx(math.log(math.exp(-2) + 2 * math.exp(-10)))

    @pytest.mark.parametrize("tau", [0.05, 0.1, 1.0])
    def test_constant_distances_sum_to_log_b_minus_1(self, tau):
        """Test ℓ̄p + ℓ̄e = log(b−1) when all distances are equal."""
        for b in range(4, 129, 2):
            distances = np.full((b, b), 0.7)
            np.fill_diagonal(distances, 0.0)
            batch = LabeledBatch(labels=two_per_class_labels(b), distances=distances)
            terms = infonce_terms(batch, InfoNceParams(temperature=tau))
            assert terms.pos_term + terms.ent_term == pytest.approx(math.log(b - 1), abs=1e-10)

    def test_temperature_scaling_invariance(self):
        """Test scaling distances and τ together leaves the terms unchanged."""
        rng = np.random.default_rng(3)
        batch = random_batch(rng, 16)
        scaled = LabeledBatch(labels=batch.labels, distances=batch.distances * 3.0)
        base = infonce_terms(batch, InfoNceParams(0.1))
        other = infonce_terms(scaled, InfoNceParams(0.3))
        assert other.pos_term == pytest.approx(base.pos_term, abs=1e-10)
        assert other.ent_term == pytest.approx(base.ent_term, abs=1e-10)

    def test_large_distances_do_not_underflow(self):
        """Test far-apart items with a small temperature stay finite."""
        terms = infonce_terms(constant_block_batch(50.0, 80.0), InfoNceParams(temperature=0.05))
        assert math.isfinite(terms.ent_term)
        assert terms.ent_term == pytest.approx(-1000.0, abs=1e-9)

    def test_standard_infonce_special_case(self):
        """Test coefficients (1,1) reproduce the mean of ℓp + ℓe over P."""
        rng = np.random.default_rng(11)
        batch = random_batch(rng, 8)
        tau = 0.2
        logits = -batch.distances / tau
        labels = batch.labels
        losses = []
        for i in range(8):
            for j in range(8):
                if i != j and labels[i] == labels[j]:
                    contrast = [j] + [k for k in range(8) if labels[k] != labels[i]]
                    losses.append(-logits[i, j] + math.log(sum(math.exp(logits[i, k]) for k in contrast)))
        terms = infonce_terms(batch, InfoNceParams(tau))
        assert combine(terms, separate_average_coeffs()) == pytest.approx(np.mean(losses), rel=1e-12)


class TestCoefficients:
    """Tests for aggregation presets and combine."""

    def test_combine_global_example(self):
        """Test t=(0.2, 0.4), c=(1/3, 2/3) gives 1/3."""
        assert combine(TermPair(0.2, 0.4), BalanceCoeffs(1 / 3, 2 / 3)) == pytest.approx(1 / 3)

    def test_combine_special_cases(self):
        """Test separate average and entropy-only coefficients."""
        t = TermPair(0.3, 0.9)
        assert combine(t, BalanceCoeffs(1, 1)) == pytest.approx(1.2)
        assert combine(t, BalanceCoeffs(0, 1)) == pytest.approx(0.9)

    def test_global_average_coeffs(self):
        """Test b=4 and b=128 instances, and b=2 error."""
        c4 = global_average_coeffs(4)
        assert (c4.lambda_p, c4.lambda_e) == pytest.approx((1 / 3, 2 / 3))
        c128 = global_average_coeffs(128)
        assert (c128.lambda_p, c128.lambda_e) == pytest.approx((1 / 127, 126 / 127))
        with pytest.raises(DegenerateBatch):
            global_average_coeffs(2)

    def test_coeffs_from_counts_match_two_per_class(self):
        """Test the count-based overload agrees with the b-based formula."""
        c = global_average_coeffs_from_counts(8, 48)  # b=8, 2 per class
        expected = global_average_coeffs(8)
        assert c.lambda_p == pytest.approx(expected.lambda_p)
        assert c.lambda_e == pytest.approx(expected.lambda_e)

    def test_separate_average(self):
        """Test separate averaging is (1, 1)."""
        c = separate_average_coeffs()
        assert (c.lambda_p, c.lambda_e) == (1.0, 1.0)

    def test_invalid_coeffs(self):
        """Test negative or all-zero coefficients are refused."""
        with pytest.raises(InvalidConfig):
            BalanceCoeffs(-0.1, 1.0)
        with pytest.raises(InvalidConfig):
            BalanceCoeffs(0.0, 0.0)

    def test_global_average_identity_on_random_batches(self):
        """Test 500 random batches: global coefficients equal the brute-force mean over all pairs."""
        rng = np.random.default_rng(0)
        params = MarginParams(margin=0.5, exponent=1)
        for _ in range(500):
            b = int(rng.choice([4, 8, 16, 32, 64]))
            batch = random_batch(rng, b)
            terms = margin_terms(batch, params)
            same = batch.labels[:, None] == batch.labels[None, :]
            off = ~np.eye(b, dtype=bool)
            d = batch.distances
            pair_losses = np.where(same, d, np.maximum(0.0, params.margin - d))[off]
            brute = pair_losses.sum() / (b * b - b)
            assert combine(terms, global_average_coeffs(b)) == pytest.approx(brute, rel=1e-12)
            assert combine(terms, separate_average_coeffs()) == pytest.approx(
                terms.pos_term + terms.ent_term, rel=1e-12
            )


class TestBalancedLoss:
    """Tests for the one-call loss and effective rates."""

    def test_balanced_loss_dispatch(self):
        """Test margin and InfoNCE params select the right terms."""
        batch = constant_block_batch(0.2, 0.1)
        terms, value = balanced_loss(batch, MarginParams(), BalanceCoeffs(1 / 3, 2 / 3))
        assert terms == margin_terms(batch, MarginParams())
        assert value == pytest.approx(1 / 3)
        terms, _ = balanced_loss(batch, InfoNceParams(0.1), BalanceCoeffs(1, 1))
        assert terms.pos_term == pytest.approx(2.0)

    def test_effective_rates(self):
        """Test Λp = α·λp and Λe = α·λe."""
        h = effective_rates(BalanceCoeffs(0.01, 0.5), learning_rate=0.4, batch_size=64)
        assert h.as_tuple() == pytest.approx((0.004, 0.2, 64))

    def test_effective_rates_zero_coefficient(self):
        """Test a zero coefficient gives no valid configuration."""
        with pytest.raises(InvalidConfig):
            effective_rates(BalanceCoeffs(0.0, 1.0), learning_rate=0.1, batch_size=64)


class TestLoadBatch:
    """Tests for batch files."""

    def test_load_json(self):
        """Test JSON batches load."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "batch.json"
            batch = constant_block_batch(0.2, 0.1)
            path.write_text(json.dumps({"labels": batch.labels.tolist(), "distances": batch.distances.tolist()}))
            loaded = load_batch(path)
        np.testing.assert_array_equal(loaded.distances, batch.distances)

    def test_load_csv(self):
        """Test CSV rows: label then distance row."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "batch.csv"
            path.write_text("0,0,0.2,0.1,0.1\n0,0.2,0,0.1,0.1\n1,0.1,0.1,0,0.2\n1,0.1,0.1,0.2,0\n")
            batch = load_batch(path)
        assert batch.labels.tolist() == [0, 0, 1, 1]
        assert margin_terms(batch, MarginParams()).ent_term == pytest.approx(0.4)

    def test_csv_bad_entry_row(self):
        """Test non-numeric CSV entries report their row."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "batch.csv"
            path.write_text("0,0,0.2\n0,x,0\n")
            with pytest.raises(FormatError) as excinfo:
                load_batch(path)
        assert excinfo.value.row == 2

    def test_load_csv_exact(self):
        """Test CSV distances load bit-for-bit."""
        rng = np.random.default_rng(8)
        batch = random_batch(rng, 4)
        rows = [
            f"{label}," + ",".join(repr(float(v)) for v in row) for label, row in zip(batch.labels, batch.distances)
        ]
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "batch.csv"
            path.write_text("\n".join(rows) + "\n")
            loaded = load_batch(path)
        np.testing.assert_array_equal(loaded.distances, batch.distances)


def with_pair_distance(batch: LabeledBatch, i: int, j: int, value: float) -> LabeledBatch:
    distances = batch.distances.copy()
    distances[i, j] = distances[j, i] = value
    return LabeledBatch(labels=batch.labels, distances=distances)


class TestTermProperties:
    """Invariance and monotonicity of the terms over random batches."""

    @pytest.mark.parametrize("seed", range(5))
    def test_permutation_invariance(self, seed):
        """Test relabeling classes and permuting items leaves both terms unchanged."""
        rng = np.random.default_rng(seed)
        batch = random_batch(rng, 8)
        order = rng.permutation(8)
        relabel = rng.permutation(4) + 10
        permuted = LabeledBatch(
            labels=relabel[batch.labels[order]],
            distances=batch.distances[np.ix_(order, order)],
        )
        for terms in (margin_terms, infonce_terms):
            params = MarginParams() if terms is margin_terms else InfoNceParams()
            before, after = terms(batch, params), terms(permuted, params)
            assert after.pos_term == pytest.approx(before.pos_term, rel=1e-12)
            assert after.ent_term == pytest.approx(before.ent_term, rel=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_margin_monotone_in_each_pair(self, seed):
        """Test widening a negative pair never raises ℓ̄e and widening a positive pair never lowers ℓ̄p."""
        rng = np.random.default_rng(seed)
        batch = random_batch(rng, 6)
        params = MarginParams(margin=3.0)
        base = margin_terms(batch, params)
        for i in range(6):
            for j in range(i + 1, 6):
                widened = with_pair_distance(batch, i, j, batch.distances[i, j] + rng.uniform(0.01, 1.0))
                wider = margin_terms(widened, params)
                if batch.labels[i] == batch.labels[j]:
                    assert wider.pos_term >= base.pos_term
                    assert wider.ent_term == base.ent_term
                else:
                    assert wider.ent_term <= base.ent_term
                    assert wider.pos_term == base.pos_term

    @pytest.mark.parametrize("exponent", [1, 2])
    def test_margin_saturation(self, exponent):
        """Test ℓ̄e is exactly zero once every negative pair reaches the margin."""
        rng = np.random.default_rng(exponent)
        batch = random_batch(rng, 8)
        nearest_negative = float(batch.distances[batch.labels[:, None] != batch.labels[None, :]].min())
        params = MarginParams(margin=nearest_negative, exponent=exponent)
        assert margin_terms(batch, params).ent_term == 0.0
        closer = MarginParams(margin=nearest_negative + 0.1, exponent=exponent)
        assert margin_terms(batch, closer).ent_term > 0.0
