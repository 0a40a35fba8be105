"""Tests for CLI defaults, environment overrides and validation."""

import pytest
from pydantic import ValidationError

from ternarybbp.config import CATALOG_ENV, MAX_WORKERS_ENV, load_config, load_defaults


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv(MAX_WORKERS_ENV, raising=False)
    monkeypatch.delenv(CATALOG_ENV, raising=False)


def test_shipped_defaults():
    config = load_config()
    assert config.eval_digits == 50
    assert (config.count, config.guard) == (16, 24)
    assert config.verify_digits == 200
    assert config.identity_digits == 100
    assert config.workers == 1
    assert config.output_mode == "text"
    assert config.catalog_path is None


def test_overrides_skip_none():
    config = load_config(verify_digits=80, workers=None)
    assert config.verify_digits == 80
    assert config.workers == 1


def test_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(MAX_WORKERS_ENV, "2")
    monkeypatch.setenv(CATALOG_ENV, str(tmp_path / "c.txt"))
    config = load_config(workers=2)
    assert config.max_workers == 2
    assert config.catalog_path == tmp_path / "c.txt"


def test_worker_cap_clamps(monkeypatch):
    monkeypatch.setenv(MAX_WORKERS_ENV, "2")
    assert load_config(workers=4).workers == 2
    assert load_config(workers=1).workers == 1
    monkeypatch.setenv(MAX_WORKERS_ENV, "0")
    with pytest.raises(ValidationError):
        load_config()


def test_output_mode():
    assert load_config(output_mode="json").output_mode == "json"
    with pytest.raises(ValidationError):
        load_config(output_mode="xml")


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv(MAX_WORKERS_ENV, "many")
    with pytest.raises(ValueError, match="not an integer"):
        load_config()


def test_custom_defaults_file(tmp_path):
    path = tmp_path / "defaults.yaml"
    path.write_text("eval_digits: 12\nguard: 30\n")
    assert load_defaults(path) == {"eval_digits": 12, "guard": 30}
    assert load_config(path).guard == 30
    path.write_text("- just\n- a list\n")
    with pytest.raises(ValueError, match="mapping"):
        load_defaults(path)
    path.write_text("verify_digits: 5\n")
    with pytest.raises(ValidationError):
        load_config(path)
