"""Engine configuration loaded from a JSON file.

Relative paths in the file are resolved against the directory the config
file lives in, so a config can travel with its data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .cube import CONTINGENCY_MODES, MEASURES
from .errors import ConfigError

_KNOWN_KEYS = {
    "taxonomy", "corpus", "index", "group_map", "alpha", "measure",
    "delta", "contingency", "port", "link_templates",
}


@dataclass
class EngineConfig:
    taxonomy: Path
    corpus: Path
    index: Path
    group_map: dict[str, str]
    alpha: float = 0.9
    measure: str = "interest_factor"
    delta: float = 1.0
    contingency: str = "standard"
    port: int = 8080
    link_templates: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if not isinstance(self.group_map, dict) or not self.group_map:
            raise ConfigError("group_map must be a non-empty object")
        for group, dim in self.group_map.items():
            if not isinstance(group, str) or not isinstance(dim, str):
                raise ConfigError("group_map must map group names to "
                                  "dimension names")
            if not group or not dim:
                raise ConfigError("group_map entries must be non-empty")
        if not isinstance(self.alpha, (int, float)) or isinstance(self.alpha, bool):
            raise ConfigError("alpha must be a number")
        if not 0.0 <= self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.measure not in MEASURES:
            raise ConfigError(
                f"unknown measure {self.measure!r}; choose one of "
                + ", ".join(MEASURES))
        if not isinstance(self.delta, (int, float)) or isinstance(self.delta, bool):
            raise ConfigError("delta must be a number")
        if not math.isfinite(self.delta):
            raise ConfigError("delta must be finite")
        if self.contingency not in CONTINGENCY_MODES:
            raise ConfigError(
                f"unknown contingency mode {self.contingency!r}; choose one "
                "of " + ", ".join(CONTINGENCY_MODES))
        if not isinstance(self.port, int) or isinstance(self.port, bool) \
                or not 1 <= self.port <= 65535:
            raise ConfigError(f"port must be an integer in [1, 65535]")
        if not isinstance(self.link_templates, dict):
            raise ConfigError("link_templates must be an object")
        for otype, template in self.link_templates.items():
            if not isinstance(otype, str) or not isinstance(template, str):
                raise ConfigError("link_templates must map object types to "
                                  "URL templates")


def load_config(path) -> EngineConfig:
    """Parse and validate a config file.

    Raises ConfigError on unreadable files, bad JSON, unknown keys,
    missing keys or out-of-range values.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")

    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key in ("taxonomy", "corpus", "index", "group_map"):
        if key not in data:
            raise ConfigError(f"config is missing required key {key!r}")

    base = path.resolve().parent

    def resolve(key: str) -> Path:
        value = data[key]
        if not isinstance(value, str) or not value:
            raise ConfigError(f"{key} must be a non-empty path string")
        candidate = Path(value)
        return candidate if candidate.is_absolute() else base / candidate

    config = EngineConfig(
        taxonomy=resolve("taxonomy"),
        corpus=resolve("corpus"),
        index=resolve("index"),
        group_map=data["group_map"],
        alpha=data.get("alpha", 0.9),
        measure=data.get("measure", "interest_factor"),
        delta=data.get("delta", 1.0),
        contingency=data.get("contingency", "standard"),
        port=data.get("port", 8080),
        link_templates=data.get("link_templates", {}),
    )
    config.validate()
    return config
