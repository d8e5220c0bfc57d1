"""Tests for MMWaveMC CLI module."""

import pytest
from typer.testing import CliRunner


class TestCliHelp:
    """Tests for CLI help and basic functionality."""

    def test_cli_imports(self):
        """Test that CLI module can be imported."""
        from MMWaveMC.cli import app

        assert app is not None

    def test_cli_help(self):
        """Test that CLI --help lists the study commands."""
        from MMWaveMC.cli import app

        runner = CliRunner()
        result = runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        for command in ("convergence", "stopping", "nmse", "se", "missprob", "incoherence"):
            assert command in result.output

    def test_cli_version(self):
        """Test that CLI --version works."""
        from MMWaveMC.cli import app

        runner = CliRunner()
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert "version" in result.output.lower()


class TestCliInit:
    """Tests for CLI init command."""

    def test_init_creates_config(self, temp_dir):
        """Test that init writes the template."""
        from MMWaveMC.cli import app, config_template

        output = temp_dir / "config.yaml"
        runner = CliRunner()
        result = runner.invoke(app, ["init", "--output", str(output)])
        assert result.exit_code == 0
        assert output.read_text(encoding="utf-8") == config_template()

    def test_template_is_package_data(self):
        """Test that init reads the YAML file installed inside the package."""
        from pathlib import Path

        import MMWaveMC
        from MMWaveMC.cli import config_template

        packaged = Path(MMWaveMC.__file__).parent / "config.template.yaml"
        assert config_template() == packaged.read_text(encoding="utf-8")
        assert config_template().startswith("# MMWaveMC experiment configuration")

    def test_init_refuses_overwrite(self, temp_dir):
        """Test that init keeps an existing file without --force."""
        from MMWaveMC.cli import app

        output = temp_dir / "config.yaml"
        output.write_text("keep: me\n")
        runner = CliRunner()
        result = runner.invoke(app, ["init", "--output", str(output)])
        assert result.exit_code == 1
        assert output.read_text() == "keep: me\n"

        result = runner.invoke(app, ["init", "--output", str(output), "--force"])
        assert result.exit_code == 0
        assert output.read_text() != "keep: me\n"


class TestCliValidateConfig:
    """Tests for CLI validate-config command."""

    def test_valid_config(self, small_config_yaml):
        """Test validation of a valid file."""
        from MMWaveMC.cli import app

        runner = CliRunner()
        result = runner.invoke(app, ["validate-config", "--config", str(small_config_yaml)])
        assert result.exit_code == 0
        assert "valid" in result.output.lower()

    def test_invalid_config(self, temp_dir, invalid_config_dict):
        """Test that a divisibility violation exits 1 and names the nearest valid M."""
        import yaml

        from MMWaveMC.cli import app

        path = temp_dir / "invalid.yaml"
        path.write_text(yaml.dump(invalid_config_dict))
        runner = CliRunner()
        result = runner.invoke(app, ["validate-config", "--config", str(path)])
        assert result.exit_code == 1
        assert "M=16" in result.output

    def test_missing_config(self, temp_dir):
        """Test that a missing file exits 1."""
        from MMWaveMC.cli import app

        runner = CliRunner()
        result = runner.invoke(app, ["validate-config", "-c", str(temp_dir / "none.yaml")])
        assert result.exit_code == 1
        assert "not found" in result.output

    def test_yaml_syntax_error(self, temp_dir):
        """Test that broken YAML exits 1."""
        from MMWaveMC.cli import app

        path = temp_dir / "broken.yaml"
        path.write_text("dimensions: [1, 2\n")
        runner = CliRunner()
        result = runner.invoke(app, ["validate-config", "-c", str(path)])
        assert result.exit_code == 1


class TestCliStudies:
    """Tests for the study commands."""

    def test_nmse_rerun_is_byte_identical(self, small_config_yaml, temp_dir):
        """Test that the same seed and config give the same CSV bytes."""
        from MMWaveMC.cli import app

        runner = CliRunner()
        outputs = []
        for name in ("first.csv", "second.csv"):
            out = temp_dir / name
            result = runner.invoke(
                app, ["-q", "nmse", "-c", str(small_config_yaml), "-o", str(out)]
            )
            assert result.exit_code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        lines = outputs[0].decode().splitlines()
        assert lines[0].startswith("# config_digest=")
        assert lines[1].startswith("pnr_db,gamma_max_pi,estimator")

    def test_seed_override_changes_output(self, small_config_yaml, temp_dir):
        """Test that --seed feeds the trials."""
        from MMWaveMC.cli import app

        runner = CliRunner()
        texts = []
        for seed in ("1", "2"):
            out = temp_dir / f"seed{seed}.csv"
            result = runner.invoke(
                app, ["-q", "stopping", "-c", str(small_config_yaml), "-s", seed, "-o", str(out)]
            )
            assert result.exit_code == 0
            texts.append(out.read_text())
        assert texts[0] != texts[1]

    def test_se_records(self, small_config_yaml, temp_dir):
        """Test the SE command with per-trial records for Setting B."""
        from MMWaveMC.cli import app

        out = temp_dir / "se.csv"
        records = temp_dir / "se_records.csv"
        runner = CliRunner()
        result = runner.invoke(
            app,
            [
                "-q",
                "se",
                "-c",
                str(small_config_yaml),
                "--setting",
                "B",
                "-o",
                str(out),
                "-r",
                str(records),
            ],
        )
        assert result.exit_code == 0
        assert "snr_db,scheme,mean_se,stderr" in out.read_text()
        assert records.read_text().splitlines()[1].startswith("study,trial,seed")

    @pytest.mark.parametrize("command", ["convergence", "missprob", "incoherence"])
    def test_commands_write_csv(self, small_config_yaml, temp_dir, command):
        """Test that the remaining studies run end to end."""
        from MMWaveMC.cli import app

        out = temp_dir / f"{command}.csv"
        runner = CliRunner()
        result = runner.invoke(
            app, [command, "-c", str(small_config_yaml), "-t", "2", "-o", str(out)]
        )
        assert result.exit_code == 0
        assert len(out.read_text().splitlines()) > 2

    def test_study_error_exits_1(self, small_config_yaml, temp_dir, mocker):
        """Test that a module error inside a study becomes exit code 1."""
        from MMWaveMC.cli import app

        mocker.patch("MMWaveMC.studies.run_miss_prob", side_effect=ValueError("boom"))
        out = temp_dir / "missprob.csv"
        runner = CliRunner()
        result = runner.invoke(app, ["missprob", "-c", str(small_config_yaml), "-o", str(out)])
        assert result.exit_code == 1
        assert "boom" in result.output
        assert not out.exists()
