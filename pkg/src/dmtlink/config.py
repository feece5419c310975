"""Flat key=value run configuration.

A config file is plain text: one dotted key per line, '#' comments,
blank lines ignored. scenario.* keys map onto ScenarioConfig fields;
dmt.*, eml.*, fiber.* and receiver.* keys pass through as component
overrides and are type-checked when the scenario is resolved.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .channel import EmlParams, FiberParams, ReceiverParams
from .dmt import DmtParams
from .errors import ConfigError
from .link import ScenarioConfig, _coerce_like

_COMPONENT_DEFAULTS = {
    "dmt": DmtParams(),
    "eml": EmlParams(),
    "fiber": FiberParams(),
    "receiver": ReceiverParams(),
}

# ScenarioConfig fields that may be "none" (unset) in a config file
_OPTIONAL_SCENARIO = {
    "received_power_dbm": float,
    "payload_frames": int,
    "launch_power_dbm": float,
    "target_bits": int,
}

_SKIP_COMPONENT_FIELDS = {"pilot_indices"}  # not settable from text


def parse_kv_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"line {lineno}: expected key=value, got "
                              f"{raw.strip()!r}")
        out[key] = value
    return out


def _scenario_fields() -> dict[str, dataclasses.Field]:
    return {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _coerce_scenario_value(name: str, raw):
    if name in _OPTIONAL_SCENARIO:
        if isinstance(raw, str) and raw.lower() in ("none", "auto", ""):
            return None
        if raw is None:
            return None
        kind = _OPTIONAL_SCENARIO[name]
        return kind(float(raw)) if kind is int else kind(raw)
    current = getattr(ScenarioConfig(), name)
    return _coerce_like(raw, current)


def apply_settings(scenario: ScenarioConfig,
                   settings: dict[str, object]) -> ScenarioConfig:
    """Fold dotted keys into a scenario, newest value winning."""
    fields = _scenario_fields()
    kwargs: dict[str, object] = {}
    overrides = dict(scenario.overrides)
    for key, value in settings.items():
        group, _, name = key.partition(".")
        if group == "scenario":
            if name not in fields or name == "overrides":
                raise ConfigError(f"unknown scenario key {key!r}")
            kwargs[name] = _coerce_scenario_value(name, value)
        elif group in _COMPONENT_DEFAULTS:
            defaults = _COMPONENT_DEFAULTS[group]
            known = {f.name for f in dataclasses.fields(defaults)}
            if name not in known or name in _SKIP_COMPONENT_FIELDS:
                raise ConfigError(f"unknown component key {key!r}")
            overrides[key] = value
        else:
            raise ConfigError(f"unknown key {key!r}")
    return dataclasses.replace(scenario, overrides=overrides, **kwargs)


def load_scenario(path=None, cli_pairs: list[str] | None = None,
                  base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Config file first, then -o key=value pairs on top."""
    scenario = base if base is not None else ScenarioConfig()
    if path is not None:
        text = Path(path).read_text()
        scenario = apply_settings(scenario, parse_kv_text(text))
    if cli_pairs:
        pairs: dict[str, str] = {}
        for item in cli_pairs:
            key, sep, value = item.partition("=")
            if not sep or not key.strip() or not value.strip():
                raise ConfigError(f"override must look like key=value, got "
                                  f"{item!r}")
            pairs[key.strip()] = value.strip()
        scenario = apply_settings(scenario, pairs)
    return scenario


def default_settings_text() -> str:
    """Every recognized key with its default, config-file ready."""
    lines = ["# scenario"]
    blank = ScenarioConfig()
    for f in dataclasses.fields(ScenarioConfig):
        if f.name == "overrides":
            continue
        value = getattr(blank, f.name)
        lines.append(f"scenario.{f.name}={'none' if value is None else value}")
    for group, defaults in _COMPONENT_DEFAULTS.items():
        lines.append(f"# {group}")
        for f in dataclasses.fields(defaults):
            if f.name in _SKIP_COMPONENT_FIELDS:
                continue
            lines.append(f"{group}.{f.name}={getattr(defaults, f.name)}")
    return "\n".join(lines) + "\n"
