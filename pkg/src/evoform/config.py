"""key=value service configuration with EVOFORM_ environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from typing import Optional

from .evolution import GAParams

ENV_PREFIX = "EVOFORM_"

_GA_FIELDS = {f.name for f in fields(GAParams)}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8720
    seed: int = 0
    depth: int = 3
    visibility_k: int = 3
    event_log: Optional[str] = None  # optional path for the line-JSON log
    ga: GAParams = None

    def __post_init__(self):
        if self.ga is None:
            self.ga = GAParams()


def parse_key_values(text: str) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _coerce(name: str, value: str):
    if name in ("host", "event_log"):
        return value
    if name in ("port", "seed", "depth", "visibility_k", "N", "bias_generations"):
        return int(value)
    return float(value)


def load_config(path: Optional[str] = None, environ: Optional[dict] = None) -> ServiceConfig:
    """Build a ServiceConfig from an optional file plus environment overrides."""
    values: dict[str, str] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            values.update(parse_key_values(handle.read()))
    env = os.environ if environ is None else environ
    known = {f.name for f in fields(ServiceConfig)} | _GA_FIELDS
    for name in known:
        override = env.get(ENV_PREFIX + name.upper())
        if override is not None:
            values[name] = override

    config = ServiceConfig()
    ga_kwargs = {}
    for name, raw in values.items():
        if name in _GA_FIELDS:
            ga_kwargs[name] = _coerce(name, raw)
        elif name in {f.name for f in fields(ServiceConfig)} - {"ga"}:
            setattr(config, name, _coerce(name, raw))
        else:
            raise ValueError(f"unknown config key {name!r}")
    if ga_kwargs:
        config.ga = GAParams(**ga_kwargs)
    return config
