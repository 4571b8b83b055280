"""
Tests for engine configuration, logging setup and the error types.
"""
import json
from fractions import Fraction

import pytest

from partreg_core.config import EngineConfig
from partreg_core.logging import configure_logging, get_logger
from partreg_core.validation import (
    ContractViolation,
    Inconclusive,
    LimitExceeded,
    SearchLimits,
    SystemSyntaxError,
    ValidationError,
    WindowTooSmall,
    check_positive,
    check_variable_count,
)


def test_default_config():
    """Test defaults and the derived dense-class threshold."""
    config = EngineConfig()

    assert config.window == 2_000_000
    assert config.levels == 25
    assert config.k_max == 64
    assert config.dense_threshold() == Fraction(1, 576)


def test_explicit_density_floor():
    """Test that an explicit floor overrides the derived one."""
    assert EngineConfig(density_floor=0.25).dense_threshold() == Fraction(1, 4)


def test_presets():
    """Test that presets shrink or grow the windows."""
    assert EngineConfig.quick().window < EngineConfig().window < EngineConfig.thorough().window
    assert EngineConfig.thorough().persistence_steps == 2


def test_from_env(monkeypatch):
    """Test loading settings from PARTREG_* variables."""
    monkeypatch.setenv("PARTREG_WINDOW", "5000")
    monkeypatch.setenv("PARTREG_K_MAX", "12")
    monkeypatch.setenv("PARTREG_DENSITY_FLOOR", "0.1")

    config = EngineConfig.from_env()

    assert config.window == 5000
    assert config.k_max == 12
    assert config.density_floor == 0.1
    assert config.levels == 25


def test_from_yaml(tmp_path):
    """Test YAML overrides and rejection of unknown keys."""
    path = tmp_path / "engine.yaml"
    path.write_text("window: 3000\nl_cap: 6\n", encoding="utf-8")

    config = EngineConfig.from_yaml(path)
    assert config.window == 3000
    assert config.dense_threshold() == Fraction(1, 144)

    path.write_text("windw: 3000\n", encoding="utf-8")
    with pytest.raises(ValueError):
        EngineConfig.from_yaml(path)

    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        EngineConfig.from_yaml(path)


def test_config_dict_round_trip():
    """Test to_dict / from_dict."""
    config = EngineConfig.quick()

    assert EngineConfig.from_dict(config.to_dict()) == config


def test_search_limits_presets():
    """Test the strict and relaxed caps."""
    assert SearchLimits().max_columns == 20
    assert SearchLimits.strict().max_colouring_space == 2**20
    assert SearchLimits.relaxed().max_variables == 256
    assert SearchLimits.strict().to_dict()["max_search_nodes"] == 500_000


def test_error_hierarchy():
    """Test which errors count as input problems."""
    assert issubclass(ContractViolation, ValidationError)
    assert issubclass(LimitExceeded, ValidationError)
    assert not issubclass(Inconclusive, ValidationError)

    err = SystemSyntaxError("unexpected token", 2, 7)
    assert (err.line, err.column) == (2, 7)
    assert str(err).startswith("line 2, column 7")

    small = WindowTooSmall("certified region is empty")
    assert small.stage == "sumset"
    assert str(small).endswith("enlarge the window")


def test_parameter_checks():
    """Test the shared precondition helpers."""
    check_positive(1, "n")
    with pytest.raises(ContractViolation):
        check_positive(0, "n")
    with pytest.raises(LimitExceeded):
        check_variable_count(33, SearchLimits.strict())


def test_get_logger_names():
    """Test the package prefix on logger names."""
    assert get_logger().name == "partreg_core"
    assert get_logger("partreg_core.sumsets").name == "partreg_core.sumsets"
    assert get_logger("custom").name == "partreg_core.custom"


def test_structured_logging(capsys):
    """Test JSON-shaped log lines on stderr."""
    logger = configure_logging(level="INFO", structured=True)
    logger.info("stable")
    configure_logging(level="WARNING")

    line = capsys.readouterr().err.strip().splitlines()[-1]
    record = json.loads(line)
    assert record["level"] == "INFO"
    assert record["message"] == "stable"
    assert logger.propagate is False
