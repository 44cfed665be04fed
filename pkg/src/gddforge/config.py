"""Service/CLI configuration: TOML file plus environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import tomli

from .backend import BackendConfig
from .errors import UsageError

ENV_PREFIX = "GDDFORGE_"


@dataclass(frozen=True)
class AppConfig:
    jobs_dir: str = "./gddforge-jobs"
    host: str = "127.0.0.1"
    port: int = 8000
    token: str = ""  # optional bearer token; empty = auth off
    static_dir: str = ""
    backend: BackendConfig = field(default_factory=BackendConfig)
    converters: dict = field(default_factory=dict)  # format -> command


def load_config(path: str | Path | None = None) -> AppConfig:
    """Read a TOML config file (optional) and apply environment overrides.

    Recognized env vars: GDDFORGE_JOBS_DIR, GDDFORGE_TOKEN, GDDFORGE_HOST,
    GDDFORGE_PORT, GDDFORGE_STATIC_DIR, GDDFORGE_BACKEND_KIND,
    GDDFORGE_BASE_URL, GDDFORGE_MODEL, GDDFORGE_CONCURRENCY.
    """
    data: dict = {}
    if path:
        p = Path(path)
        if not p.is_file():
            raise UsageError(f"config file not found: {p}")
        try:
            data = tomli.loads(p.read_text(encoding="utf-8"))
        except tomli.TOMLDecodeError as exc:
            raise UsageError(f"invalid config file {p}: {exc}") from exc

    svc = data.get("service", {})
    be = data.get("backend", {})
    backend = BackendConfig(
        kind=be.get("kind", "mock"),
        base_url=be.get("base_url", ""),
        model_name=be.get("model", "gddforge-mock"),
        api_key_ref=be.get("api_key_env", ""),
        timeout=float(be.get("timeout_s", 60)),
        max_retries=int(be.get("max_retries", 3)),
        temperature=float(be.get("temperature", 0.2)),
        concurrency=int(be.get("concurrency", 2)),
    )
    cfg = AppConfig(
        jobs_dir=svc.get("jobs_dir", "./gddforge-jobs"),
        host=svc.get("host", "127.0.0.1"),
        port=int(svc.get("port", 8000)),
        token=svc.get("token", ""),
        static_dir=svc.get("static_dir", ""),
        backend=backend,
        converters=dict(data.get("converters", {})),
    )
    return _apply_env(cfg)


def _apply_env(cfg: AppConfig) -> AppConfig:
    env = os.environ
    backend = cfg.backend
    if env.get(ENV_PREFIX + "BACKEND_KIND"):
        backend = replace(backend, kind=env[ENV_PREFIX + "BACKEND_KIND"])
    if env.get(ENV_PREFIX + "BASE_URL"):
        backend = replace(backend, base_url=env[ENV_PREFIX + "BASE_URL"])
    if env.get(ENV_PREFIX + "MODEL"):
        backend = replace(backend, model_name=env[ENV_PREFIX + "MODEL"])
    if env.get(ENV_PREFIX + "CONCURRENCY"):
        backend = replace(backend, concurrency=int(env[ENV_PREFIX + "CONCURRENCY"]))
    return replace(
        cfg,
        jobs_dir=env.get(ENV_PREFIX + "JOBS_DIR", cfg.jobs_dir),
        host=env.get(ENV_PREFIX + "HOST", cfg.host),
        port=int(env.get(ENV_PREFIX + "PORT", cfg.port)),
        token=env.get(ENV_PREFIX + "TOKEN", cfg.token),
        static_dir=env.get(ENV_PREFIX + "STATIC_DIR", cfg.static_dir),
        backend=backend,
    )
