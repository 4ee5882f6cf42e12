"""Service configuration: key=value file with upper-snake environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

CHUNK_BODY_LIMIT = 8 * 1024 * 1024  # server-side cap per chunk request


@dataclass
class ServiceConfig:
    listen_port: int = 8470
    data_dir: str = "data"
    max_upload_bytes: int = 512 * 1024 * 1024
    session_ttl_hours: float = 24.0
    outbox_path: str = ""  # default: {data_dir}/outbox/notifications.log
    seed_admin_username: str = "admin"
    seed_admin_password: str = ""  # generated at bootstrap when empty
    static_dir: str = "frontend/dist"  # mounted at / when present

    def resolved_outbox(self) -> Path:
        if self.outbox_path:
            return Path(self.outbox_path)
        return Path(self.data_dir) / "outbox" / "notifications.log"


def load_config(path: str | os.PathLike | None = None,
                env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    if path is not None:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    config = ServiceConfig()
    for f in fields(ServiceConfig):
        raw = env.get(f.name.upper(), values.get(f.name))
        if raw is None:
            continue
        if f.type in ("int", int):
            setattr(config, f.name, int(raw))
        elif f.type in ("float", float):
            setattr(config, f.name, float(raw))
        else:
            setattr(config, f.name, str(raw))
    return config
