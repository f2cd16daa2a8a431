"""Pipeline configuration: a flat key = value file plus flag overrides.

The file format is a TOML-like subset (strings, numbers, booleans,
comma-separated lists, ``#`` comments) so a full run can be reproduced
from one checked-in file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .llmclient import DEFAULT_BASE_URL, Mode


class ConfigError(Exception):
    pass


_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _parse_value(raw: str) -> Any:
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    if "," in raw:
        return [part.strip().strip('"') for part in raw.split(",") if part.strip()]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config_file(path: str | Path) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            continue  # section headers are cosmetic
        key, sep, value = stripped.partition("=")
        key = key.strip()
        if not sep or not _KEY_RE.match(key):
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        value = value.split("#", 1)[0] if not value.strip().startswith('"') else value
        values[key] = _parse_value(value)
    return values


@dataclass
class PipelineConfig:
    """Every knob the subcommands read; paths may stay unset until the
    subcommand that needs them runs."""

    dump: str | None = None
    wordnet_dir: str | None = None
    transcripts: str = "transcripts"
    kb_dir: str = "kb"
    reports_dir: str = "reports"
    quarantine_dir: str = "quarantine"
    keywords: str | None = None
    excluded: str | None = None
    roots: list[str] = field(default_factory=list)
    base_url: str = DEFAULT_BASE_URL
    model_id: str = "gpt-4-1106-preview"
    mode: str = "replay"
    rpm: float | None = None
    seed: int | None = None
    question_cap: int | None = 1000
    batch_size: int = 50
    max_prompts: int = 64
    jobs: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.roots, str):
            self.roots = [self.roots]
        try:
            Mode(self.mode)
        except ValueError:
            raise ConfigError(
                f"mode must be one of live/record/replay, got {self.mode!r}"
            )

    @property
    def llm_mode(self) -> Mode:
        return Mode(self.mode)

    def require_path(self, name: str, must_exist: bool = True) -> Path:
        value = getattr(self, name)
        if not value:
            raise ConfigError(f"config value {name!r} is required")
        path = Path(value)
        if must_exist and not path.exists():
            raise ConfigError(f"{name} path {path} does not exist")
        return path


def load_config(path: str | Path | None, overrides: dict[str, Any]) -> PipelineConfig:
    values: dict[str, Any] = {}
    if path is not None:
        values.update(parse_config_file(path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return PipelineConfig(**values)
