"""Configuration plumbing: dotted-key access, overrides, files, axis specs.

Every numeric/bool leaf of SimConfig is addressable by a flat dotted key
(``social.sif``, ``rho``, ...), which is what the CLI's ``--set`` overrides
and the sweep axis specifications build on.  Config files are either flat
``key = value`` text or JSON (flat, nested, or a manifest echo).
"""

from __future__ import annotations

import dataclasses
import json
from functools import lru_cache
from pathlib import Path
from typing import Any

from . import engine


class ConfigError(ValueError):
    """Invalid key, value, file, or axis specification."""


def defaults() -> engine.SimConfig:
    return engine.SimConfig()


@lru_cache(maxsize=1)
def _leaf_fields() -> dict[str, type]:
    """Map of dotted key -> leaf python type, in declaration order."""
    import typing

    out: dict[str, type] = {}

    def walk(cls: type, prefix: str) -> None:
        hints = typing.get_type_hints(cls)
        for f in dataclasses.fields(cls):
            t = hints[f.name]
            if dataclasses.is_dataclass(t):
                walk(t, f"{prefix}{f.name}.")
            else:
                out[f"{prefix}{f.name}"] = t

    walk(engine.SimConfig, "")
    return out


def valid_keys() -> list[str]:
    return list(_leaf_fields())


def get_field(config: engine.SimConfig, key: str) -> Any:
    if key not in _leaf_fields():
        raise ConfigError(_unknown_key_message(key))
    obj: Any = config
    for part in key.split("."):
        obj = getattr(obj, part)
    return obj


def with_field(config: engine.SimConfig, key: str, value: Any) -> engine.SimConfig:
    """Return a copy of the config with one dotted field replaced."""
    fields = _leaf_fields()
    if key not in fields:
        raise ConfigError(_unknown_key_message(key))
    value = coerce(key, value)

    def rebuild(obj: Any, parts: list[str]) -> Any:
        if len(parts) == 1:
            return dataclasses.replace(obj, **{parts[0]: value})
        child = getattr(obj, parts[0])
        return dataclasses.replace(obj, **{parts[0]: rebuild(child, parts[1:])})

    return rebuild(config, key.split("."))


def coerce(key: str, value: Any) -> Any:
    """Convert a raw (often string) value to the field's declared type."""
    target = _leaf_fields()[key]
    if target is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            low = value.strip().lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
        raise ConfigError(f"{key} expects a boolean, got {value!r}")
    if target is int:
        try:
            as_float = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} expects an integer, got {value!r}") from None
        if as_float != int(as_float):
            raise ConfigError(f"{key} expects an integer, got {value!r}")
        return int(as_float)
    if target is float:
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} expects a number, got {value!r}") from None
    return value


def with_overrides(config: engine.SimConfig, overrides: dict[str, Any]) -> engine.SimConfig:
    for key, value in overrides.items():
        config = with_field(config, key, value)
    return config


def flat_dict(config: engine.SimConfig) -> dict[str, Any]:
    return {key: get_field(config, key) for key in valid_keys()}


def parse_set_arg(arg: str) -> tuple[str, str]:
    """Split one ``--set key=value`` argument."""
    if "=" not in arg:
        raise ConfigError(f"--set expects key=value, got {arg!r}")
    key, _, value = arg.partition("=")
    return key.strip(), value.strip()


def load_file(path: str | Path) -> dict[str, Any]:
    """Read a config file into a flat {dotted key: raw value} dict.

    Accepts JSON (flat keys, nested sections, or a manifest carrying a
    ``config`` object) and plain ``key = value`` lines with ``#`` comments.
    """
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: JSON config must be an object")
        if "config" in obj and isinstance(obj["config"], dict) and "outputs" in obj:
            obj = obj["config"]  # manifest echo
        return _flatten_json(obj)
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _flatten_json(obj: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten_json(value, f"{name}."))
        else:
            out[name] = value
    return out


def parse_axes(spec: str, want: int) -> list[tuple[str, list[float]]]:
    """Parse an axis spec like ``social.sif:0.05:0.7:14,rho:0.05:0.7:14``.

    Each axis is field:start:stop:count with count evenly spaced values,
    endpoints included.
    """
    axes: list[tuple[str, list[float]]] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 4:
            raise ConfigError(f"axis must be field:start:stop:count, got {part!r}")
        name, start_s, stop_s, count_s = (b.strip() for b in bits)
        if name not in _leaf_fields():
            raise ConfigError(_unknown_key_message(name))
        if _leaf_fields()[name] is bool:
            raise ConfigError(f"cannot sweep boolean field {name!r}")
        try:
            start, stop, count = float(start_s), float(stop_s), int(count_s)
        except ValueError:
            raise ConfigError(f"bad axis numbers in {part!r}") from None
        if count < 1:
            raise ConfigError(f"axis count must be >= 1, got {count}")
        if count == 1:
            values = [start]
        else:
            step = (stop - start) / (count - 1)
            values = [start + i * step for i in range(count)]
        axes.append((name, values))
    if len(axes) != want:
        raise ConfigError(f"expected {want} axis spec(s), got {len(axes)}")
    return axes


def _unknown_key_message(key: str) -> str:
    return f"unknown config key {key!r}; valid keys: {', '.join(valid_keys())}"
