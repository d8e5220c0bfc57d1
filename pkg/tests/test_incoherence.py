"""Tests for the incoherence diagnostic."""

import numpy as np
import pytest


class TestIncoherence:
    """Tests for incoherence_mu."""

    def test_single_path_ideal_array(self):
        """Test that an L = 1 ideal-array channel has mu = 1."""
        from MMWaveMC.models.channel import ArrayGeometry, generate_channel
        from MMWaveMC.models.incoherence import incoherence_mu

        channel = generate_channel(ArrayGeometry(64, 4), ArrayGeometry(64, 4), 1, rng_seed=8)
        report = incoherence_mu(channel.matrix, 1)
        assert report.mu == pytest.approx(1.0, abs=1e-8)
        assert report.mu_e == pytest.approx(1.0, abs=1e-8)
        assert report.rank_used == 1

    def test_invariant_under_phase_errors(self):
        """Test that per-element phase errors leave mu unchanged."""
        from MMWaveMC.models.channel import ArrayGeometry, assemble_channel, sample_paths
        from MMWaveMC.models.incoherence import incoherence_mu

        paths = sample_paths(4, 1.0, rng_seed=21)
        ideal = assemble_channel(paths, ArrayGeometry(32, 4), ArrayGeometry(32, 4))
        mismatched = assemble_channel(
            paths,
            ArrayGeometry(32, 4).with_phase_errors(0.5 * np.pi, rng_seed=1),
            ArrayGeometry(32, 4).with_phase_errors(0.5 * np.pi, rng_seed=2),
        )
        first = incoherence_mu(ideal.matrix, 4)
        second = incoherence_mu(mismatched.matrix, 4)
        assert second.mu == pytest.approx(first.mu, abs=1e-10)
        assert second.mu_u == pytest.approx(first.mu_u, abs=1e-10)
        assert second.mu_v == pytest.approx(first.mu_v, abs=1e-10)

    def test_degenerate_subspace_flagged(self):
        """Test that tied singular values at position L are flagged."""
        from MMWaveMC.models.incoherence import incoherence_mu

        matrix = np.diag([1.0, 1.0, 0.0, 0.0])
        report = incoherence_mu(matrix, 1)
        assert report.degenerate
        assert report.singular_gap == pytest.approx(0.0)

    def test_full_rank_gap(self):
        """Test that L = min(N_MS, N_BS) reports a unit gap."""
        from MMWaveMC.models.incoherence import incoherence_mu

        report = incoherence_mu(np.eye(3), 3)
        assert not report.degenerate
        assert report.singular_gap == 1.0

    def test_rank_out_of_range(self):
        """Test that L outside [1, min(N_MS, N_BS)] raises."""
        from MMWaveMC.models.incoherence import IncoherenceError, incoherence_mu

        with pytest.raises(IncoherenceError):
            incoherence_mu(np.eye(4), 5)
        with pytest.raises(IncoherenceError):
            incoherence_mu(np.eye(4), 0)

    def test_zero_matrix(self):
        """Test that the zero matrix raises."""
        from MMWaveMC.models.incoherence import IncoherenceError, incoherence_mu

        with pytest.raises(IncoherenceError):
            incoherence_mu(np.zeros((4, 4)), 1)

    def test_as_row(self):
        """Test that the report row follows the header."""
        from MMWaveMC.models.incoherence import IncoherenceReport, incoherence_mu

        row = incoherence_mu(np.diag([3.0, 1.0, 0.5]), 2).as_row()
        assert list(row) == IncoherenceReport.header()
