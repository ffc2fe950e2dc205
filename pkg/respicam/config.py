"""Tunable parameters: built-in defaults, TOML config file, key=value overrides.

Keys are dotted and grouped by stage::

    roi.<small|medium|large>.{w_mul,h_mul,y_off_mul}
    features.{max_count,quality,min_dist,harris_k,block_size}
    flow.{window,levels,iters,eps,min_eig,margin_mul}
    signal.{low_hz,high_hz,order,trim_fraction,min_prominence}

A config file uses the same names as TOML tables (``[flow]``,
``[roi.medium]``); later sources win.
"""

from __future__ import annotations

import sys
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError, RespicamError
from .features import FeatureParams
from .respsignal import SignalParams
from .roi import DEFAULT_GEOMETRY, RoiGeometry, SizeClass
from .tracking import FlowParams

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


# config key -> dataclass field, per section
_FEATURE_KEYS = {k: k for k in ("max_count", "quality", "min_dist", "harris_k", "block_size")}
_FLOW_KEYS = {
    "window": "window",
    "levels": "pyramid_levels",
    "iters": "max_iters",
    "eps": "eps",
    "min_eig": "min_eig_threshold",
    "margin_mul": "margin_mul",
}
_SIGNAL_KEYS = {
    k: k for k in ("low_hz", "high_hz", "order", "trim_fraction", "min_prominence")
}
_ROI_KEYS = {k: k for k in ("w_mul", "h_mul", "y_off_mul")}


@dataclass(frozen=True)
class Settings:
    geometry: Mapping[SizeClass, RoiGeometry] = field(
        default_factory=lambda: dict(DEFAULT_GEOMETRY)
    )
    features: FeatureParams = field(default_factory=FeatureParams)
    flow: FlowParams = field(default_factory=FlowParams)
    signal: SignalParams = field(default_factory=SignalParams)


DEFAULT_SETTINGS = Settings()


def _coerce(current: Any, raw: Any, key: str) -> Any:
    try:
        if isinstance(current, int):
            if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
                raise ValueError("expected an integer")
            return int(raw)
        if isinstance(raw, bool):
            raise ValueError("expected a number")
        return float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}: cannot use {raw!r} ({e})") from e


def _updated(obj: Any, keymap: Mapping[str, str], values: Mapping[str, Any], prefix: str) -> Any:
    changes: dict[str, Any] = {}
    for key, raw in values.items():
        if key not in keymap:
            raise ConfigError(f"unknown config key {prefix}.{key}")
        attr = keymap[key]
        changes[attr] = _coerce(getattr(obj, attr), raw, f"{prefix}.{key}")
    if not changes:
        return obj
    try:
        return replace(obj, **changes)
    except (ValueError, RespicamError) as e:
        raise ConfigError(f"invalid {prefix} settings: {e}") from e


def apply_values(settings: Settings, values: Mapping[str, Any]) -> Settings:
    """Apply a flat ``{"flow.window": 15, ...}`` mapping on top of settings."""
    sections: dict[str, dict[str, Any]] = {}
    for dotted, raw in values.items():
        parts = dotted.split(".")
        if parts[0] == "roi" and len(parts) == 3:
            section, key = f"roi.{parts[1]}", parts[2]
        elif parts[0] in ("features", "flow", "signal") and len(parts) == 2:
            section, key = parts
        else:
            raise ConfigError(f"unknown config key {dotted}")
        sections.setdefault(section, {})[key] = raw

    geometry = dict(settings.geometry)
    features, flow, signal = settings.features, settings.flow, settings.signal
    for section, vals in sections.items():
        if section == "features":
            features = _updated(features, _FEATURE_KEYS, vals, section)
        elif section == "flow":
            flow = _updated(flow, _FLOW_KEYS, vals, section)
        elif section == "signal":
            signal = _updated(signal, _SIGNAL_KEYS, vals, section)
        else:
            try:
                size = SizeClass(section.split(".", 1)[1])
            except ValueError as e:
                raise ConfigError(f"unknown ROI size in {section}") from e
            geometry[size] = _updated(geometry[size], _ROI_KEYS, vals, section)
    return Settings(geometry=geometry, features=features, flow=flow, signal=signal)


def _flatten(table: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in table.items():
        dotted = f"{prefix}.{key}" if prefix else key
        if isinstance(value, Mapping):
            flat.update(_flatten(value, dotted))
        else:
            flat[dotted] = value
    return flat


def load_config(path: str | Path, base: Settings | None = None) -> Settings:
    p = Path(path)
    try:
        with p.open("rb") as fh:
            table = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot read config file {p}: {e}") from e
    return apply_values(base or DEFAULT_SETTINGS, _flatten(table))


def parse_overrides(items: Iterable[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} is not key=value")
        out[key.strip()] = value.strip()
    return out


def apply_overrides(settings: Settings, items: Iterable[str]) -> Settings:
    return apply_values(settings, parse_overrides(items))


def resolve_settings(config_file: str | Path | None, overrides: Iterable[str] = ()) -> Settings:
    """defaults -> config file -> overrides."""
    settings = load_config(config_file) if config_file else DEFAULT_SETTINGS
    return apply_overrides(settings, overrides)


__all__ = [
    "Settings",
    "DEFAULT_SETTINGS",
    "apply_values",
    "load_config",
    "parse_overrides",
    "apply_overrides",
    "resolve_settings",
]
