"""Tests for MMWaveMC configuration models."""

import pytest
from pydantic import ValidationError


class TestExperimentConfig:
    """Tests for the main ExperimentConfig model."""

    def test_defaults(self):
        """Test the default 64x64 configuration."""
        from MMWaveMC.config_models import ExperimentConfig

        config = ExperimentConfig()
        assert config.num_samples == 2048
        assert config.density == 0.5
        assert config.rank_budget == 4
        assert config.num_streams == 4
        assert config.step_size() == 1.8
        assert config.step_size(0.25) == 1.4
        assert config.grid_sizes() == {"omp_unitary": (64, 64), "omp_redundant": (128, 128)}

    def test_small_config(self, small_config_dict):
        """Test loading a valid small configuration."""
        from MMWaveMC.config_models import ExperimentConfig

        config = ExperimentConfig(**small_config_dict)
        assert config.num_samples == 32
        assert config.master_seed == 7
        ms, bs = config.geometries()
        assert ms.subarray_size == 4
        assert bs.num_rf_chains == 2

    def test_num_samples_overrides_density(self, small_config_dict):
        """Test that an explicit sample count wins over the density."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["sampling"] = {"num_samples": 48}
        config = ExperimentConfig(**small_config_dict)
        assert config.num_samples == 48
        assert config.density == 0.75

    def test_invalid_density_names_nearest(self, invalid_config_dict):
        """Test that a density breaking divisibility reports the nearest valid M."""
        from MMWaveMC.config_models import ExperimentConfig

        with pytest.raises(ValidationError) as exc_info:
            ExperimentConfig(**invalid_config_dict)
        message = str(exc_info.value)
        assert "sampling.density" in message
        assert "nearest valid M=16" in message

    def test_all_violations_reported(self, small_config_dict):
        """Test that every violation is listed in one error."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["dimensions"]["n_rf_bs"] = 3
        small_config_dict["sweeps"]["densities"] = [0.3]
        small_config_dict["omp"] = {"unitary_grid_ms": 4}
        with pytest.raises(ValidationError) as exc_info:
            ExperimentConfig(**small_config_dict)
        message = str(exc_info.value)
        assert "3 configuration violation(s)" in message
        assert "n_rf_bs" in message
        assert "sweeps.densities" in message
        assert "omp.unitary_grid_ms" in message

    def test_rank_budget_too_large(self, small_config_dict):
        """Test that L above min(N_MS, N_BS) is rejected."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["svp"] = {"rank_budget": 9}
        with pytest.raises(ValidationError) as exc_info:
            ExperimentConfig(**small_config_dict)
        assert "rank budget" in str(exc_info.value)

    def test_streams_exceed_rf_chains(self, small_config_dict):
        """Test that more streams than MS RF chains are rejected."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["studies"]["se"]["num_streams"] = 3
        with pytest.raises(ValidationError) as exc_info:
            ExperimentConfig(**small_config_dict)
        assert "num_streams" in str(exc_info.value)

    def test_bad_missprob_point(self, small_config_dict):
        """Test that miss-probability points are checked too."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["missprob"] = [{"n_ms": 8, "n_bs": 8, "n_rf_ms": 2, "num_samples": 20}]
        with pytest.raises(ValidationError) as exc_info:
            ExperimentConfig(**small_config_dict)
        assert "missprob[0]" in str(exc_info.value)

    @pytest.mark.parametrize(
        "section,values",
        [
            ("sweeps", {"densities": []}),
            ("sweeps", {"densities": [1.5]}),
            ("sweeps", {"step_sizes": [-1.0]}),
            ("sweeps", {"gamma_max": [1.5]}),
            ("channel", {"num_paths": 0}),
            ("svp", {"projection_method": "qr"}),
        ],
    )
    def test_field_errors(self, small_config_dict, section, values):
        """Test that out-of-range fields are rejected."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict.setdefault(section, {}).update(values)
        with pytest.raises(ValidationError):
            ExperimentConfig(**small_config_dict)

    def test_master_seed_range(self, small_config_dict):
        """Test that the seed must fit in 64 bits."""
        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["master_seed"] = 2**64
        with pytest.raises(ValidationError):
            ExperimentConfig(**small_config_dict)

    def test_with_overrides(self, small_config):
        """Test seed and trial overrides."""
        config = small_config.with_overrides(master_seed=11, trials=5)
        assert config.master_seed == 11
        assert config.trials.nmse == 5
        assert config.trials.missprob == 5
        assert config.trials.incoherence == 5
        assert small_config.with_overrides() == small_config

    def test_digest(self, small_config_dict):
        """Test that the digest tracks results-relevant settings only."""
        from MMWaveMC.config_models import ExperimentConfig

        base = ExperimentConfig(**small_config_dict).digest()
        small_config_dict["processes"] = 4
        small_config_dict["logger"]["root"]["level"] = "DEBUG"
        assert ExperimentConfig(**small_config_dict).digest() == base
        small_config_dict["master_seed"] = 8
        assert ExperimentConfig(**small_config_dict).digest() != base
        assert len(base) == 16

    def test_pilot(self, small_config_dict):
        """Test the complex pilot symbol."""
        import numpy as np

        from MMWaveMC.config_models import ExperimentConfig

        small_config_dict["sampling"]["pilot_amplitude"] = 2.0
        small_config_dict["sampling"]["pilot_phase"] = float(np.pi / 2)
        pilot = ExperimentConfig(**small_config_dict).pilot
        assert pilot.real == pytest.approx(0.0, abs=1e-12)
        assert pilot.imag == pytest.approx(2.0)


class TestConfigLoading:
    """Tests for YAML loading."""

    def test_from_yaml(self, small_config_yaml):
        """Test loading from a YAML file."""
        from MMWaveMC.config_models import ExperimentConfig

        config = ExperimentConfig.from_yaml(str(small_config_yaml))
        assert config.dimensions.n_ms == 8

    def test_from_yaml_missing(self, temp_dir):
        """Test that a missing file raises FileNotFoundError."""
        from MMWaveMC.config_models import ExperimentConfig

        with pytest.raises(FileNotFoundError):
            ExperimentConfig.from_yaml(str(temp_dir / "missing.yaml"))

    def test_validate_config(self, small_config_yaml):
        """Test the validate_config helper."""
        from MMWaveMC.config_models import validate_config

        assert validate_config(str(small_config_yaml)).trials.se == 2

    def test_template_is_valid(self, temp_dir):
        """Test that the shipped template validates."""
        from MMWaveMC.cli import config_template
        from MMWaveMC.config_models import validate_config

        path = temp_dir / "template.yaml"
        path.write_text(config_template(), encoding="utf-8")
        assert validate_config(str(path)).dimensions.n_ms == 64
