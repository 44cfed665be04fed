"""Small shared helpers: hashing, canonical JSON, data-file loading."""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, no float surprises, LF only."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def digest_of(obj) -> str:
    return sha256_hex(canonical_json(obj))


def load_data_file(name: str, override: str | Path | None = None):
    """Load a bundled JSON data file, or an override path when given."""
    if override is not None:
        return json.loads(Path(override).read_text(encoding="utf-8"))
    ref = resources.files("gddforge").joinpath("data", name)
    return json.loads(ref.read_text(encoding="utf-8"))


def data_text(name: str) -> str:
    return resources.files("gddforge").joinpath("data", name).read_text(encoding="utf-8")
