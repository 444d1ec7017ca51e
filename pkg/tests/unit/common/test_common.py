"""Unit tests for configuration loading, logging, and error types."""

import logging

import pytest
import yaml

from src.common.config import dump_config, load_config, load_sections
from src.common.errors import (
    ConfigError,
    CorpusFormatError,
    InvariantViolation,
    SamplingBudgetExceeded,
    SearchSpaceTooLarge,
)
from src.common.logger import (
    ROOT_LOGGER,
    configure_run_logging,
    get_logger,
    reset_handlers,
    setup_logger,
)


class TestLoadConfig:
    """Tests for load_config and dump_config."""

    def test_load_and_expand_env(self, tmp_path, monkeypatch):
        """Test that ${VAR} references are expanded."""
        monkeypatch.setenv("DPNE_DATA_DIR", "/data")
        path = tmp_path / "config.yaml"
        path.write_text("run:\n  input: ${DPNE_DATA_DIR}/corpus.jsonl\n  seeds: [1, 2]\n")
        config = load_config(str(path))
        assert config["run"]["input"] == "/data/corpus.jsonl"
        assert config["run"]["seeds"] == [1, 2]

    def test_empty_file(self, tmp_path):
        """Test that an empty file is an empty mapping."""
        path = tmp_path / "config.yaml"
        path.write_text("")
        assert load_config(str(path)) == {}

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "none.yaml"))

    def test_non_mapping_root(self, tmp_path):
        """Test that the document root must be a mapping."""
        path = tmp_path / "config.yaml"
        path.write_text("- a\n- b\n")
        with pytest.raises(TypeError):
            load_config(str(path))

    def test_dump_sorted(self, tmp_path):
        """Test that dumped keys are sorted and reload unchanged."""
        path = tmp_path / "echo.yaml"
        dump_config({"run": {"seed": 1, "eta": 0.01}}, path)
        assert path.read_text().index("eta") < path.read_text().index("seed")
        assert yaml.safe_load(path.read_text()) == {"run": {"seed": 1, "eta": 0.01}}


class TestLoadSections:
    """Tests for load_sections."""

    def test_missing_default_is_empty(self, tmp_path, monkeypatch):
        """Test that an absent default config file gives empty sections."""
        monkeypatch.chdir(tmp_path)
        assert load_sections(None) == ({}, {})

    def test_missing_explicit_file(self, tmp_path):
        """Test that a named file must exist."""
        with pytest.raises(ConfigError):
            load_sections(str(tmp_path / "none.yaml"))

    def test_sections(self, tmp_path):
        """Test that run and logging sections are split out."""
        path = tmp_path / "config.yaml"
        path.write_text("run:\n  seed: 3\nlogging:\n  level: DEBUG\nother: 1\n")
        assert load_sections(str(path)) == ({"seed": 3}, {"level": "DEBUG"})

    @pytest.mark.parametrize("content", ["run: [1, 2\n", "- a\n", "logging: 5\n"])
    def test_invalid(self, tmp_path, content):
        """Test that broken files become configuration errors."""
        path = tmp_path / "config.yaml"
        path.write_text(content)
        with pytest.raises(ConfigError):
            load_sections(str(path))


class TestLogger:
    """Tests for the logger helpers."""

    def test_namespace(self):
        """Test that component loggers are children of dpne."""
        assert get_logger("histogram").name == "dpne.histogram"
        assert get_logger("dpne.cli").name == "dpne.cli"
        assert get_logger("dpne").name == "dpne"

    def test_invalid_level(self):
        """Test that unknown levels are rejected."""
        with pytest.raises(ValueError):
            setup_logger("dpne.test_invalid", level="LOUD")

    def test_configure_run_logging(self, tmp_path):
        """Test level, file handler, and replacement of earlier handlers."""
        try:
            configure_run_logging({"level": "warning", "file": True}, False, str(tmp_path))
            logger = configure_run_logging({"file": True}, True, str(tmp_path))
            assert logger.name == ROOT_LOGGER
            assert logger.level == logging.DEBUG
            assert len(logger.handlers) == 2
            get_logger("histogram").info("merged")
            for handler in logger.handlers:
                handler.flush()
            assert "[dpne.histogram] merged" in (tmp_path / "dpne.log").read_text()
        finally:
            reset_handlers()
        assert logging.getLogger(ROOT_LOGGER).handlers == []


class TestErrors:
    """Tests for the error hierarchy."""

    @pytest.mark.parametrize(
        "error,code",
        [
            (ConfigError("x"), 2),
            (SearchSpaceTooLarge("x"), 2),
            (CorpusFormatError("x"), 3),
            (InvariantViolation("x"), 4),
            (SamplingBudgetExceeded(1, 2, 3), 4),
        ],
    )
    def test_exit_codes(self, error, code):
        """Test the exit code each error maps to."""
        assert error.exit_code == code

    def test_corpus_error_line(self):
        """Test that line numbers prefix the message."""
        assert str(CorpusFormatError("bad", 7)) == "line 7: bad"
        assert CorpusFormatError("bad").line_number is None

    def test_sampling_message(self):
        """Test the acceptance rate in the sampler diagnostic."""
        error = SamplingBudgetExceeded(2, 10, 400)
        assert "400 attempts" in str(error)
        assert "5.00e-03" in str(error)

    def test_config_error_is_value_error(self):
        """Test that configuration errors are also ValueErrors."""
        assert isinstance(ConfigError("x"), ValueError)
