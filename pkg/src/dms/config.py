"""Service configuration, loadable from a JSON file or the DMS_CONFIG env var."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, IoError


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    backend: str = "memory"          # memory | disk
    data_dir: str | None = None      # required for the disk backend
    hold_ttl_s: float = 900.0
    session_ttl_s: float = 86_400.0
    mode_speeds_kmh: dict[str, float] = field(
        default_factory=lambda: {"walk": 5.0, "drive": 40.0}
    )
    hold_expiry_interval_s: float = 60.0
    hash_iterations: int = 200_000
    fsync: bool = True

    def validate(self) -> "ServiceConfig":
        if self.backend not in ("memory", "disk"):
            raise ConfigError(f"backend must be memory or disk, got {self.backend!r}")
        if self.backend == "disk" and not self.data_dir:
            raise ConfigError("disk backend requires data_dir")
        if not self.hold_ttl_s > 0:
            raise ConfigError(f"hold_ttl_s must be > 0, got {self.hold_ttl_s}")
        if not self.session_ttl_s > 0:
            raise ConfigError(f"session_ttl_s must be > 0, got {self.session_ttl_s}")
        if not self.hold_expiry_interval_s > 0:
            raise ConfigError("hold_expiry_interval_s must be > 0")
        if self.hash_iterations < 1:
            raise ConfigError("hash_iterations must be >= 1")
        for mode, speed in self.mode_speeds_kmh.items():
            if not speed > 0:
                raise ConfigError(f"speed for {mode!r} must be > 0, got {speed}")
        if not 0 <= self.port < 65536:
            raise ConfigError(f"port must be in 0..65535, got {self.port}")
        return self


def load_config(path: str | None = None) -> ServiceConfig:
    """Read config JSON from path, else from $DMS_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get("DMS_CONFIG")
    if path is None:
        return ServiceConfig().validate()
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    known = {f.name for f in fields(ServiceConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return ServiceConfig(**data).validate()
