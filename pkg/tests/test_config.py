import importlib

import pytest

import app
import config
from config import RunConfig, get_family, make_run_config
from core.errors import ConfigError


def test_defaults_come_from_the_environment_layer():
    run_config = make_run_config()
    assert run_config.replicates == config.DEFAULT_REPLICATES
    assert run_config.seed == config.DEFAULT_SEED
    assert run_config.holm


def test_none_values_keep_defaults():
    assert make_run_config(seed=None, alpha=None).alpha == config.SIGNIFICANCE_LEVEL


@pytest.mark.parametrize("overrides", [
    {"replicates": 0},
    {"pairwise_replicates": -5},
    {"alpha": 1.5},
    {"epsilon": 1.0},
    {"workers": 0},
    {"input_format": "xml"},
    {"dataset": "Penn"},
    {"nmin": 10, "nmax": 5},
])
def test_invalid_settings_raise_config_error(overrides):
    with pytest.raises(ConfigError):
        make_run_config(**overrides)


def test_run_config_serializes(tmp_path):
    run_config = RunConfig(out=tmp_path, inputs=["en=a.conllu"])
    dumped = run_config.model_dump(mode="json")
    assert dumped["inputs"] == ["en=a.conllu"]
    assert dumped["out"] == str(tmp_path)


def test_language_families():
    assert get_family("English") == "Indo-European"
    assert get_family("North_Sami") == "Uralic"
    assert get_family("Klingon") == "Other"


@pytest.fixture
def broken_environment(monkeypatch):
    monkeypatch.setenv("OMEGA_SEED", "not-a-seed")
    monkeypatch.setenv("OMEGA_ALPHA", "high")
    importlib.reload(config)
    yield
    monkeypatch.undo()
    importlib.reload(config)


def test_malformed_environment_falls_back_then_fails_the_run(broken_environment):
    assert config.DEFAULT_SEED == 20200101
    assert len(config.ENV_ERRORS) == 2
    with pytest.raises(ConfigError, match="OMEGA_SEED"):
        make_run_config()


def test_malformed_environment_exit_code(broken_environment, tmp_path):
    assert app.main(["extremal", "--nmin", "3", "--nmax", "3", "--out", str(tmp_path)]) == 3
