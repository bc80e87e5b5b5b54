"""Run configuration: flags > environment (PCAT_*) > config file > defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .category import DEFAULT_BUDGET, DEFAULT_DEGREE

ENV_PREFIX = "PCAT_"
DEFAULT_CONFIG_FILE = "pcat.cfg"
FORMATS = ("text", "structured")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    degree: int = DEFAULT_DEGREE
    bound: int | None = None  # None means degree + 4
    ambient: int = 3
    budget: int = DEFAULT_BUDGET
    cache_dir: str | None = None
    format: str = "text"

    @property
    def effective_bound(self) -> int:
        return self.degree + 4 if self.bound is None else self.bound

    def validate(self) -> RunConfig:
        if self.degree < 0:
            raise ConfigError("degree must be nonnegative")
        if self.effective_bound < self.degree:
            raise ConfigError(f"bound {self.effective_bound} is smaller than degree {self.degree}")
        if self.ambient < 1:
            raise ConfigError("ambient dimension must be positive")
        if self.budget <= 0:
            raise ConfigError("budget must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        return self


_INT_FIELDS = {"degree", "bound", "ambient", "budget"}
# environment / file keys that differ from the field name
_ALIASES = {"cache": "cache_dir", "cache-dir": "cache_dir"}


def _coerce(key: str, value: str):
    if key in _INT_FIELDS:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from exc
    return value


def read_config_file(path: str | os.PathLike) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments are ignored."""
    names = {f.name for f in fields(RunConfig)}
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = _ALIASES.get(key.lower(), key.lower().replace("-", "_"))
        if key not in names:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def read_environment(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    names = {f.name for f in fields(RunConfig)}
    out = {}
    for var, value in environ.items():
        if not var.startswith(ENV_PREFIX):
            continue
        key = var[len(ENV_PREFIX) :].lower()
        key = _ALIASES.get(key, key)
        if key in names:
            out[key] = _coerce(key, value)
    return out


def resolve(flags: dict, config_file: str | None = None, environ=None) -> RunConfig:
    """Merge the layers; ``flags`` holds only options given on the command line."""
    values: dict = {}
    environ = os.environ if environ is None else environ
    path = config_file or environ.get(ENV_PREFIX + "CONFIG")
    if path is None and Path(DEFAULT_CONFIG_FILE).is_file():
        path = DEFAULT_CONFIG_FILE
    if path is not None:
        values.update(read_config_file(path))
    values.update(read_environment(environ))
    values.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**values).validate()
