"""Flat key=value pipeline configuration with environment overrides.

One documented key per line, ``#`` starts a comment. Every key can be
overridden by an environment variable named ``TOPICVD_<KEY>`` (upper-cased),
which takes precedence over the file. The seed has no default on purpose:
runs must be reproducible from the config alone, never from wall-clock state.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

ENV_PREFIX = "TOPICVD_"


@dataclass
class PipelineConfig:
    source_srt: str
    target_srt: str
    out_dir: str
    seed: int
    documentary: str = ""
    topic: str = "Nature"
    vectors: str = ""
    score_threshold: float | None = None
    strict_parse: bool = False
    symbol_blacklist: str = "♪♫♬♩☆★"
    terminal_marks_source: str = ".!?…"
    terminal_marks_target: str = "。！？…"
    max_gap_ms: int = 5000
    max_cues: int = 8
    frame_rate_hz: float = 1.0
    frame_ssim_threshold: float = 0.5
    g_function: str = "identity"

    def __post_init__(self):
        if not self.documentary:
            self.documentary = Path(self.source_srt).stem
        if self.max_gap_ms <= 0 or self.max_cues < 1:
            raise ConfigError("max_gap_ms must be positive and max_cues at least 1")
        if self.frame_rate_hz <= 0:
            raise ConfigError(f"frame_rate_hz must be positive, got {self.frame_rate_hz}")
        if not 0.0 <= self.frame_ssim_threshold <= 1.0:
            raise ConfigError("frame_ssim_threshold must lie in [0, 1]")


_REQUIRED = ("source_srt", "target_srt", "out_dir", "seed")


def _parse_bool(raw: str) -> bool:
    return {"true": True, "false": False, "1": True, "0": False}[raw.lower()]


def _coerce(name: str, raw: str, annotation: str):
    if annotation == "float | None":
        annotation = "float"
    parser = {"int": int, "float": float, "str": str, "bool": _parse_bool}.get(annotation)
    if parser is None:
        raise ConfigError(f"key {name} has unsupported type {annotation}")
    try:
        return parser(raw)
    except (ValueError, KeyError):
        raise ConfigError(f"key {name}: cannot parse {raw!r} as {annotation}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Raw key=value lines to a string map, rejecting unknown or repeated keys."""
    known = {f.name for f in fields(PipelineConfig)}
    values: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{line_no}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ConfigError(f"{source}:{line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{line_no}: repeated key {key!r}")
        values[key] = value
    return values


def _apply_env(values: dict[str, str]) -> dict[str, str]:
    for spec in fields(PipelineConfig):
        env_value = os.environ.get(ENV_PREFIX + spec.name.upper())
        if env_value is not None:
            values[spec.name] = env_value
    return values


def load_config(path: str | Path) -> PipelineConfig:
    """Parse, apply TOPICVD_ overrides, type-check, and verify input files."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = _apply_env(parse_config_text(path.read_text(encoding="utf-8"), str(path)))

    missing = [key for key in _REQUIRED if key not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    kwargs = {}
    for spec in fields(PipelineConfig):
        if spec.name in values:
            kwargs[spec.name] = _coerce(spec.name, values[spec.name], spec.type)
    config = PipelineConfig(**kwargs)

    for name in ("source_srt", "target_srt"):
        if not Path(getattr(config, name)).is_file():
            raise ConfigError(f"{name} does not exist: {getattr(config, name)}")
    return config
