"""Run configuration: a JSON file whose sections mirror the dataclasses below.

Unknown keys are rejected at every level. Missing keys take defaults.
Example::

    {
      "chain": {"seed": 7, "mean_interblock": 13.0},
      "cost": {"eur_per_eth": 144.86},
      "offchain": {"transport": "http", "outage_start": 0.0, "outage_duration": 60.0},
      "oracles": {"location": "Linz", "retry_backoff": [0.5, 1.0, 2.0]},
      "benchmark": {"pattern": "push-inbound", "n": 500},
      "output": {"csv": "push-inbound.csv"}
    }
"""

from __future__ import annotations

import dataclasses
import json
import os
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .bench.cost import CostModel
from .chain import ChainConfig
from .oracles import PatternKind

CONFIG_ENV = "ORACLEFORGE_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OffchainConfig:
    transport: str = "http"
    host: str = "127.0.0.1"
    credit_port: int = 0
    erp_port: int = 0
    credit_fixtures: str | None = None
    credit_threshold: int = 50
    outage_start: float | None = None
    outage_duration: float = 0.0
    erp_dump: str | None = None

    def __post_init__(self):
        if self.transport not in ("http", "inprocess"):
            raise ValueError(f"transport must be 'http' or 'inprocess', got {self.transport!r}")
        if self.outage_duration < 0:
            raise ValueError("outage_duration must be non-negative")


@dataclass(frozen=True)
class EventFilter:
    """Contract address and event signature; None means the demo default."""

    address: str | None = None
    event: str | None = None


@dataclass(frozen=True)
class OracleConfig:
    location: str = "Linz"
    retry_backoff: tuple[float, ...] = (0.5, 1.0, 2.0)
    credit_endpoint: str | None = None
    erp_endpoint: str | None = None
    pull_inbound_filter: EventFilter = field(default_factory=EventFilter)
    push_outbound_filter: EventFilter = field(default_factory=EventFilter)

    def __post_init__(self):
        if not self.location:
            raise ValueError("location must be non-empty")
        if any(d < 0 for d in self.retry_backoff):
            raise ValueError("retry delays must be non-negative")


@dataclass(frozen=True)
class BenchmarkConfig:
    pattern: str = "pull-inbound"
    n: int = 100
    pipeline: bool = False

    def __post_init__(self):
        PatternKind(self.pattern)
        if self.n < 1:
            raise ValueError("benchmark n must be at least 1")


@dataclass(frozen=True)
class OutputConfig:
    csv: str | None = None
    summary: str | None = None


@dataclass(frozen=True)
class RunConfig:
    chain: ChainConfig = field(default_factory=ChainConfig)
    cost: CostModel = field(default_factory=CostModel)
    offchain: OffchainConfig = field(default_factory=OffchainConfig)
    oracles: OracleConfig = field(default_factory=OracleConfig)
    benchmark: BenchmarkConfig = field(default_factory=BenchmarkConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


def _check_scalar(value: Any, hint: Any, where: str) -> Any:
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _check_scalar(value, inner[0], where)
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where}: expected a list")
        return tuple(_check_scalar(v, args[0], f"{where}[{i}]") for i, v in enumerate(value))
    if dataclasses.is_dataclass(hint):
        return _build(hint, value, where)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
    elif hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
    elif hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        value = float(value)
    elif hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
    return value


def _build(cls: type, data: Any, where: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {', '.join(unknown)}")
    kwargs = {key: _check_scalar(value, hints[key], f"{where}.{key}") for key, value in data.items()}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def config_from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data, "config")


def load_config(path: str | Path | None = None) -> RunConfig:
    """Load ``path``, falling back to $ORACLEFORGE_CONFIG, then defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def with_overrides(config: RunConfig, **sections: dict) -> RunConfig:
    """Replace individual keys, e.g. ``with_overrides(cfg, chain={"seed": 7})``."""
    changes = {}
    for name, values in sections.items():
        values = {k: v for k, v in values.items() if v is not None}
        if values:
            try:
                changes[name] = dataclasses.replace(getattr(config, name), **values)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{name}: {exc}") from exc
    return dataclasses.replace(config, **changes)
