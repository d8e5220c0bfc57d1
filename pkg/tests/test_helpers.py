"""Tests for MMWaveMC helper modules, the CSV store and the trial worker."""

import json
import logging
import os

import pytest
import yaml


class TestHLogging:
    """Tests for hlogging module."""

    def test_get_logger_returns_logger(self):
        """Test that get_logger returns a Logger instance."""
        from MMWaveMC.helpers import hlogging

        logger = hlogging.get_logger("test")
        assert isinstance(logger, logging.Logger)
        assert logger.name == "test"

    def test_get_logger_same_name_returns_same_logger(self):
        """Test that same name returns same logger instance."""
        from MMWaveMC.helpers import hlogging

        assert hlogging.get_logger("same_name") is hlogging.get_logger("same_name")

    def test_structured_formatter(self):
        """Test that the JSON formatter carries context fields."""
        from MMWaveMC.helpers import hlogging

        record = logging.LogRecord("MMWaveMC.studies", logging.INFO, "f.py", 1, "done", (), None)
        record.study = "nmse"
        record.pnr_db = 25.0
        data = json.loads(hlogging.StructuredFormatter(include_location=False).format(record))
        assert data["message"] == "done"
        assert data["level"] == "INFO"
        assert data["study"] == "nmse"
        assert data["pnr_db"] == 25.0
        assert data["service"] == "mmwavemc"
        assert "location" not in data

    def test_context_logger_stamps_fields(self, caplog):
        """Test that a context logger adds its fields to every record."""
        from MMWaveMC.helpers import hlogging

        log = hlogging.get_context_logger("MMWaveMC.test_context", study="stopping")
        with caplog.at_level(logging.INFO, logger="MMWaveMC.test_context"):
            log.info("point done")
        assert caplog.records[-1].study == "stopping"

    def test_configure_from_env_without_variables(self, mock_env_vars):
        """Test that nothing is configured when no MMWAVEMC_LOG_* variable is set."""
        from MMWaveMC.helpers import hlogging

        for key in ("MMWAVEMC_LOG_FORMAT", "MMWAVEMC_LOG_LEVEL", "MMWAVEMC_LOG_FILE"):
            os.environ.pop(key, None)
        assert hlogging.configure_from_env() is False

    def test_configure_from_env_json(self, mock_env_vars, temp_dir):
        """Test JSON logging to a file from the environment."""
        from MMWaveMC.helpers import hlogging

        log_file = temp_dir / "logs" / "run.log"
        mock_env_vars(
            MMWAVEMC_LOG_FORMAT="json", MMWAVEMC_LOG_LEVEL="DEBUG", MMWAVEMC_LOG_FILE=str(log_file)
        )
        root = logging.getLogger()
        saved = (root.level, root.handlers[:])
        try:
            assert hlogging.configure_from_env() is True
            assert root.level == logging.DEBUG
            assert any(
                isinstance(h.formatter, hlogging.StructuredFormatter) for h in root.handlers
            )
            assert log_file.parent.exists()
        finally:
            for handler in root.handlers[:]:
                root.removeHandler(handler)
                handler.close()
            root.setLevel(saved[0])
            for handler in saved[1]:
                root.addHandler(handler)

    def test_rich_stderr_handler(self):
        """Test that the rich handler writes to stderr."""
        from MMWaveMC.helpers import hlogging

        handler = hlogging.rich_stderr_handler()
        assert isinstance(handler, logging.Handler)
        assert handler.console.stderr


class TestUtil:
    """Tests for util module."""

    def test_deep_merge_dicts(self):
        """Test deep dictionary merge."""
        from MMWaveMC.helpers import util

        base = {"svp": {"step_size": 1.8, "max_iterations": 100}, "master_seed": 0}
        override = {"svp": {"step_size": 1.4}, "processes": 2}
        result = util.deep_merge_dicts(base, override)

        assert result == {
            "svp": {"step_size": 1.4, "max_iterations": 100},
            "master_seed": 0,
            "processes": 2,
        }
        assert base["svp"]["step_size"] == 1.8

    def test_deep_merge_replaces_lists(self):
        """Test that lists are replaced, not merged."""
        from MMWaveMC.helpers import util

        result = util.deep_merge_dicts({"a": [1, 2]}, {"a": [3]})
        assert result == {"a": [3]}

    def test_deep_merge_does_not_alias(self):
        """Test that editing the result leaves both inputs untouched."""
        from MMWaveMC.helpers import util

        base = {"sweeps": {"pnr_db": [5, 10]}, "channel": {"num_paths": 4}}
        override = {"studies": {"se": {"snr_db": [0]}}}
        result = util.deep_merge_dicts(base, override)
        result["sweeps"]["pnr_db"].append(15)
        result["studies"]["se"]["snr_db"].append(10)
        assert base["sweeps"]["pnr_db"] == [5, 10]
        assert override["studies"]["se"]["snr_db"] == [0]


class TestHConfigs:
    """Tests for hconfigs module."""

    def test_load_yaml(self, small_config_yaml):
        """Test reading a YAML mapping."""
        from MMWaveMC.helpers import hconfigs

        data = hconfigs.load_yaml(small_config_yaml)
        assert data["dimensions"]["n_ms"] == 8

    def test_load_yaml_missing(self, temp_dir):
        """Test that a missing file raises."""
        from MMWaveMC.helpers import hconfigs

        with pytest.raises(FileNotFoundError):
            hconfigs.load_yaml(temp_dir / "missing.yaml")

    def test_load_yaml_not_a_mapping(self, temp_dir):
        """Test that a top-level list is rejected."""
        from MMWaveMC.helpers import hconfigs

        path = temp_dir / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            hconfigs.load_yaml(path)

    def test_load_yaml_syntax_error(self, temp_dir):
        """Test that broken YAML raises a YAML error."""
        from MMWaveMC.helpers import hconfigs

        path = temp_dir / "broken.yaml"
        path.write_text("dimensions: [1, 2\n")
        with pytest.raises(yaml.YAMLError):
            hconfigs.load_yaml(path)

    def test_merged_dict_keeps_base_keys(self, temp_dir):
        """Test that user values override base values and the rest stays."""
        from MMWaveMC import baseconfig
        from MMWaveMC.helpers import hconfigs

        path = temp_dir / "partial.yaml"
        path.write_text("svp:\n  max_iterations: 20\n")
        merged = hconfigs.merged_dict(path)
        assert merged["svp"]["max_iterations"] == 20
        assert merged["svp"]["tolerance_floor"] == 0.001
        assert baseconfig.config_dict["svp"]["max_iterations"] == 100

    def test_load_config_base(self):
        """Test that the base configuration validates on its own."""
        from MMWaveMC.helpers import hconfigs

        config = hconfigs.load_config()
        assert config.dimensions.n_ms == 64
        assert config.master_seed == 0

    def test_load_config_user(self, small_config_yaml):
        """Test loading and validating a user file."""
        from MMWaveMC.helpers import hconfigs

        config = hconfigs.load_config(small_config_yaml)
        assert config.num_samples == 32
        assert config.svp.max_iterations == 100


class TestCsvStore:
    """Tests for the CSV store."""

    def test_render(self):
        """Test the digest line, header and cell formatting."""
        from MMWaveMC.stores.csvstore import render

        text = render(["a", "b", "c", "d"], [[1, 0.5, True, None]], digest="abc")
        assert text == "# config_digest=abc\na,b,c,d\n1,0.5,true,\n"

    def test_float_precision(self):
        """Test that floats keep ten significant digits."""
        import numpy as np

        from MMWaveMC.stores.csvstore import format_row

        assert format_row([np.float64(1 / 3), np.int64(4), np.bool_(False)]) == [
            "0.3333333333",
            "4",
            "false",
        ]

    def test_row_length_checked(self):
        """Test that ragged rows are rejected."""
        from MMWaveMC.stores.csvstore import render

        with pytest.raises(ValueError):
            render(["a", "b"], [[1]])

    def test_write(self, temp_dir):
        """Test that write creates the directory and leaves no temporary file."""
        from MMWaveMC.stores.csvstore import CsvStore

        store = CsvStore(str(temp_dir / "out" / "table.csv"))
        store.write(["x"], [[1], [2]])
        with open(store.path, encoding="utf-8") as f:
            assert f.read() == "x\n1\n2\n"
        assert not os.path.exists(store.path + ".tmp")


def _square(x):
    return x * x


def _fail(x):
    raise RuntimeError(f"bad task {x}")


class TestWorkers:
    """Tests for run_trials."""

    def test_serial_order(self):
        """Test that results come back in task order."""
        from MMWaveMC.workers import run_trials

        assert run_trials("test", _square, [3, 1, 2]) == [9, 1, 4]

    def test_pool_order(self):
        """Test that a process pool keeps task order."""
        from MMWaveMC.workers import run_trials

        assert run_trials("test", _square, list(range(20)), processes=2) == [
            k * k for k in range(20)
        ]

    def test_errors_propagate(self):
        """Test that a failing task re-raises."""
        from MMWaveMC.workers import run_trials

        with pytest.raises(RuntimeError):
            run_trials("test", _fail, [1])
