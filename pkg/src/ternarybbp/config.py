"""CLI defaults from the shipped YAML file and the environment."""

from __future__ import annotations

import logging
import os
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .models import CliConfig

logger = logging.getLogger(__name__)

MAX_WORKERS_ENV = "TB_MAX_WORKERS"
CATALOG_ENV = "TB_CATALOG"


def load_defaults(path: Path | None = None) -> dict[str, Any]:
    """Raw defaults mapping; the shipped ``defaults.yaml`` when no path is given."""
    if path is None:
        text = (resources.files("ternarybbp") / "data" / "defaults.yaml").read_text(encoding="utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError(f"defaults file must hold a mapping, got {type(data).__name__}")
    return data


def load_config(path: Path | None = None, **overrides: Any) -> CliConfig:
    """Defaults, then environment, then explicit (non-None) overrides."""
    data = load_defaults(path)
    if cap := os.environ.get(MAX_WORKERS_ENV):
        try:
            data["max_workers"] = int(cap)
        except ValueError as exc:
            raise ValueError(f"{MAX_WORKERS_ENV}={cap!r} is not an integer") from exc
    if catalog := os.environ.get(CATALOG_ENV):
        data["catalog_path"] = Path(catalog)
    data.update({k: v for k, v in overrides.items() if v is not None})
    config = CliConfig.model_validate(data)
    if data.get("workers", 1) > config.workers:
        logger.warning("workers=%s capped at %s=%d", data["workers"], MAX_WORKERS_ENV, config.workers)
    logger.debug("config: %s", config.model_dump())
    return config
