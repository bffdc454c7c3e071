"""Loading VerifyConfig from a JSON file and COXWALLS_* environment variables."""

from __future__ import annotations

import json
import os
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Mapping

from coxeter_walls.models import VerifyConfig

ENV_PREFIX = "COXWALLS_"


def _coerce(name: str, kind: type, value: Any) -> Any:
    try:
        if kind is bool:
            if isinstance(value, str):
                return value.strip().lower() in ("1", "true", "yes", "on")
            return bool(value)
        return kind(value)
    except (TypeError, ValueError):
        raise ValueError(f"Invalid value for {name}: {value!r}") from None


def _field_types() -> dict[str, type]:
    defaults = VerifyConfig()
    return {f.name: type(getattr(defaults, f.name)) for f in fields(VerifyConfig)}


def config_from_mapping(values: Mapping[str, Any], base: VerifyConfig | None = None) -> VerifyConfig:
    """Override ``base`` with ``values``; unknown keys raise ValueError."""
    types = _field_types()
    updates = {}
    for key, value in values.items():
        if key not in types:
            raise ValueError(f"Unknown config key: {key}")
        updates[key] = _coerce(key, types[key], value)
    return replace(base or VerifyConfig(), **updates)


def load_config(path: str | Path | None = None, env: Mapping[str, str] | None = None) -> VerifyConfig:
    """Defaults, then the JSON file at ``path``, then COXWALLS_<FIELD> variables."""
    env = os.environ if env is None else env
    config = VerifyConfig()
    if path is not None:
        with open(path) as f:
            doc = json.load(f)
        if not isinstance(doc, dict):
            raise ValueError(f"Config file must hold a JSON object: {path}")
        config = config_from_mapping(doc, config)

    overrides = {
        name: env[ENV_PREFIX + name.upper()]
        for name in _field_types()
        if ENV_PREFIX + name.upper() in env
    }
    if overrides:
        config = config_from_mapping(overrides, config)
    return config


def config_to_dict(config: VerifyConfig) -> dict[str, Any]:
    return {f.name: getattr(config, f.name) for f in fields(config)}
