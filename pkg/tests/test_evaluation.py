"""Tests for NMSE, precoding, spectral efficiency and antenna selection."""

import numpy as np
import pytest


def _channel(n_ms, n_bs, num_paths, seed):
    from MMWaveMC.models.channel import ArrayGeometry, generate_channel

    return generate_channel(
        ArrayGeometry(n_ms, 1), ArrayGeometry(n_bs, 1), num_paths, rng_seed=seed
    ).matrix


class TestNmse:
    """Tests for nmse."""

    def test_values(self):
        """Test NMSE of exact, zero and doubled estimates."""
        from MMWaveMC.models.evaluation import nmse

        h = _channel(8, 8, 2, 0)
        assert nmse(h, h) == 0.0
        assert nmse(h, np.zeros_like(h)) == pytest.approx(1.0)
        assert nmse(h, 2 * h) == pytest.approx(1.0)

    def test_zero_truth(self):
        """Test that an all-zero truth raises."""
        from MMWaveMC.models.evaluation import EvaluationError, nmse

        with pytest.raises(EvaluationError):
            nmse(np.zeros((2, 2)), np.ones((2, 2)))

    def test_shape_mismatch(self):
        """Test that mismatched shapes raise."""
        from MMWaveMC.models.evaluation import EvaluationError, nmse

        with pytest.raises(EvaluationError):
            nmse(np.ones((2, 2)), np.ones((2, 3)))


class TestPrecoderAndSe:
    """Tests for svd_precoder and spectral_efficiency."""

    def test_precoder_orthonormal(self):
        """Test that P^H P = I."""
        from MMWaveMC.models.evaluation import svd_precoder

        rng = np.random.default_rng(4)
        estimate = rng.standard_normal((16, 12)) + 1j * rng.standard_normal((16, 12))
        precoder = svd_precoder(estimate, 3)
        assert precoder.shape == (12, 3)
        assert np.max(np.abs(precoder.conj().T @ precoder - np.eye(3))) < 1e-10

    def test_precoder_spans_steering_directions(self):
        """Test that the perfect-CSI precoder spans the generating BS steering vectors."""
        from MMWaveMC.models.channel import ArrayGeometry, generate_channel, steering_matrix
        from MMWaveMC.models.evaluation import svd_precoder

        bs = ArrayGeometry(64, 1)
        channel = generate_channel(ArrayGeometry(64, 1), bs, 2, rng_seed=6)
        precoder = svd_precoder(channel.matrix, 2)
        a_bs = steering_matrix(bs, channel.paths.aods)
        q, _ = np.linalg.qr(a_bs)
        distance = np.linalg.norm(q @ q.conj().T - precoder @ precoder.conj().T, 2)
        assert distance < 1e-6

    def test_stream_count_checked(self):
        """Test that more streams than the smaller dimension are rejected."""
        from MMWaveMC.models.evaluation import EvaluationError, svd_precoder

        with pytest.raises(EvaluationError):
            svd_precoder(np.ones((2, 4)), 3)

    def test_zero_channel(self):
        """Test that the zero channel carries nothing."""
        from MMWaveMC.models.evaluation import spectral_efficiency

        se = spectral_efficiency(np.zeros((4, 4)), np.eye(4)[:, :2], [0, 1], snr=10.0)
        assert se == pytest.approx(0.0, abs=1e-12)

    def test_zero_snr(self):
        """Test that SNR 0 carries nothing."""
        from MMWaveMC.models.evaluation import spectral_efficiency, svd_precoder

        h = _channel(8, 8, 2, 1)
        assert spectral_efficiency(h, svd_precoder(h, 2), [0, 4], 0.0) == pytest.approx(0.0)

    def test_scalar_link(self):
        """Test log2(1 + snr |h|^2) for a single antenna pair."""
        from MMWaveMC.models.evaluation import spectral_efficiency

        se = spectral_efficiency(np.array([[1.0 + 0j]]), np.array([[1.0]]), [0], snr=1.0)
        assert se == pytest.approx(1.0)

    def test_selected_bs_columns(self):
        """Test that BS selection restricts the precoder rows."""
        from MMWaveMC.models.evaluation import EvaluationError, spectral_efficiency

        h = _channel(8, 8, 2, 2)
        se = spectral_efficiency(h, np.eye(2), [0, 4], 1.0, selected_bs=[1, 6])
        assert se > 0
        with pytest.raises(EvaluationError):
            spectral_efficiency(h, np.eye(8)[:, :2], [0, 4], 1.0, selected_bs=[1, 6])

    def test_negative_snr(self):
        """Test that a negative linear SNR raises."""
        from MMWaveMC.models.evaluation import EvaluationError, spectral_efficiency

        with pytest.raises(EvaluationError):
            spectral_efficiency(np.ones((2, 2)), np.eye(2), [0, 1], -1.0)


class TestSelectionConstraint:
    """Tests for SelectionConstraint."""

    def test_from_geometries(self, small_geometries):
        """Test constraints built from the switch wiring."""
        from MMWaveMC.models.evaluation import SelectionConstraint, SelectionSide

        ms, bs = small_geometries
        ms_only = SelectionConstraint.from_geometries(ms)
        joint = SelectionConstraint.from_geometries(ms, bs)
        assert ms_only.side is SelectionSide.ms_only
        assert joint.side is SelectionSide.joint
        assert joint.num_bs_antennas == 8
        assert ms_only.num_bs_antennas is None

    def test_admits(self, small_geometries):
        """Test one-antenna-per-subarray feasibility."""
        from MMWaveMC.models.evaluation import SelectionConstraint

        ms, bs = small_geometries
        constraint = SelectionConstraint.from_geometries(ms, bs)
        assert constraint.admits([1, 6], [0, 7])
        assert not constraint.admits([1, 2], [0, 7])
        assert not constraint.admits([1, 6])
        assert not constraint.admits([1], [0, 7])

    def test_non_contiguous_rejected(self):
        """Test that interleaved subarrays are rejected."""
        from MMWaveMC.models.evaluation import EvaluationError, SelectionConstraint

        with pytest.raises(EvaluationError):
            SelectionConstraint(side="ms_only", ms_subarray_map=([0, 2], [1, 3]))

    def test_joint_needs_bs_map(self):
        """Test that joint selection requires a BS map."""
        from MMWaveMC.models.evaluation import EvaluationError, SelectionConstraint

        with pytest.raises(EvaluationError):
            SelectionConstraint(side="joint", ms_subarray_map=([0, 1], [2, 3]))

    def test_random_selection_feasible(self, small_geometries):
        """Test that random selections satisfy the constraint."""
        from MMWaveMC.models.evaluation import SelectionConstraint, random_selection

        constraint = SelectionConstraint.from_geometries(*small_geometries)
        for seed in range(10):
            selected_ms, selected_bs = random_selection(constraint, seed)
            assert constraint.admits(selected_ms, selected_bs)


class TestSelection:
    """Tests for greedy and exhaustive selection."""

    def test_greedy_close_to_exhaustive(self, small_geometries):
        """Test that greedy MS selection reaches 95% of the optimum on 8 antennas."""
        from MMWaveMC.models.evaluation import (
            SelectionConstraint,
            exhaustive_selection,
            greedy_selection,
        )

        ms, _ = small_geometries
        constraint = SelectionConstraint.from_geometries(ms)
        ratios = []
        for seed in range(20):
            h = _channel(8, 8, 2, seed)
            greedy = greedy_selection(h, constraint, 10.0, "A", 2)
            best = exhaustive_selection(h, constraint, 10.0, "A", 2)
            assert greedy.spectral_efficiency <= best.spectral_efficiency + 1e-9
            assert constraint.admits(greedy.selected_ms)
            ratios.append(greedy.spectral_efficiency / best.spectral_efficiency)
        assert np.mean(ratios) >= 0.95

    def test_joint_selection(self, small_geometries):
        """Test Setting B: feasible picks, bounded sweeps, never above the optimum."""
        from MMWaveMC.models.evaluation import (
            SelectionConstraint,
            exhaustive_selection,
            greedy_selection,
        )

        constraint = SelectionConstraint.from_geometries(*small_geometries)
        h = _channel(8, 8, 2, 3)
        greedy = greedy_selection(h, constraint, 10.0, "B", 2, max_sweeps=4)
        best = exhaustive_selection(h, constraint, 10.0, "B", 2)
        assert constraint.admits(greedy.selected_ms, greedy.selected_bs)
        assert 1 <= greedy.sweeps <= 4
        assert greedy.spectral_efficiency <= best.spectral_efficiency + 1e-9

    def test_ties_pick_lowest_index(self, small_geometries):
        """Test that an all-zero estimate selects the first antenna of each subarray."""
        from MMWaveMC.models.evaluation import SelectionConstraint, greedy_selection

        constraint = SelectionConstraint.from_geometries(small_geometries[0])
        result = greedy_selection(np.zeros((8, 8), dtype=complex), constraint, 1.0, "A", 2)
        assert result.selected_ms.tolist() == [0, 4]

    def test_se_evaluated_on_true_channel(self, small_geometries):
        """Test that selection follows the estimate but SE uses the true channel."""
        from MMWaveMC.models.evaluation import (
            SelectionConstraint,
            greedy_selection,
            spectral_efficiency,
            svd_precoder,
        )

        constraint = SelectionConstraint.from_geometries(small_geometries[0])
        truth = _channel(8, 8, 2, 10)
        estimate = _channel(8, 8, 2, 11)
        result = greedy_selection(estimate, constraint, 5.0, "A", 2, true_channel=truth)
        expected = spectral_efficiency(truth, svd_precoder(estimate, 2), result.selected_ms, 5.0)
        assert result.spectral_efficiency == pytest.approx(expected)

    def test_setting_b_needs_joint_constraint(self, small_geometries):
        """Test that Setting B rejects an MS-only constraint."""
        from MMWaveMC.models.evaluation import (
            EvaluationError,
            SelectionConstraint,
            greedy_selection,
        )

        constraint = SelectionConstraint.from_geometries(small_geometries[0])
        with pytest.raises(EvaluationError):
            greedy_selection(_channel(8, 8, 2, 0), constraint, 1.0, "B", 2)

    def test_exhaustive_cap(self):
        """Test that oversized exhaustive searches are refused."""
        from MMWaveMC.models.channel import ArrayGeometry
        from MMWaveMC.models.evaluation import (
            EvaluationError,
            SelectionConstraint,
            exhaustive_selection,
        )

        constraint = SelectionConstraint.from_geometries(ArrayGeometry(64, 8))
        with pytest.raises(EvaluationError):
            exhaustive_selection(_channel(64, 8, 2, 0), constraint, 1.0, "A", 2)
