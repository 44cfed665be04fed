"""Chat-completion backends: a real HTTP client and a deterministic mock.

The HTTP client speaks the de facto chat shape — request body carries
``messages=[{role, content}]``, the reply's first choice's message content is
the answer — so any OpenAI-style gateway or a bespoke FastAPI endpoint works.
The mock serves canned Unity scripts keyed by class name so the whole pipeline
runs offline and byte-reproducibly.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from importlib import resources

import requests

from .errors import (
    AuthFailure,
    BackendError,
    BackendTimeout,
    MalformedBackendResponse,
    RateLimited,
)

DEFAULT_TEMPERATURE = 0.2
_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"  # mock | http_chat
    base_url: str = ""
    model_name: str = "gddforge-mock"
    api_key_ref: str = ""  # env var NAME; the key itself never lands in config
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = DEFAULT_TEMPERATURE
    concurrency: int = 2
    backoff_base: float = 0.5
    fail_classes: tuple[str, ...] = ()  # mock-only fault injection

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "base_url": self.base_url,
            "model_name": self.model_name,
            "api_key_ref": self.api_key_ref,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
            "temperature": self.temperature,
            "concurrency": self.concurrency,
        }


class BackendCallResult(str):
    """Assistant text plus how many attempts the call took."""

    attempt: int = 1

    def __new__(cls, text: str, attempt: int = 1):
        obj = super().__new__(cls, text)
        obj.attempt = attempt
        return obj


def call_backend(cfg: BackendConfig, prompt) -> BackendCallResult:
    """Send one prompt bundle, return assistant text.

    Transient failures (timeouts, 429, 5xx) are retried with exponential
    backoff up to ``cfg.max_retries`` extra attempts.
    """
    if cfg.kind == "mock":
        return _call_mock(cfg, prompt)
    if cfg.kind == "http_chat":
        return _call_http(cfg, prompt)
    raise BackendError(f"unknown backend kind {cfg.kind!r}")


# --- http_chat ---------------------------------------------------------------


def _call_http(cfg: BackendConfig, prompt) -> BackendCallResult:
    if not cfg.base_url:
        raise BackendError("http_chat backend requires base_url")
    headers = {"Content-Type": "application/json"}
    if cfg.api_key_ref:
        key = os.environ.get(cfg.api_key_ref)
        if not key:
            raise AuthFailure(f"api key env var {cfg.api_key_ref} is not set")
        headers["Authorization"] = f"Bearer {key}"

    body = {
        "model": cfg.model_name,
        "temperature": cfg.temperature,
        "messages": [
            {"role": "system", "content": prompt.system_text},
            {"role": "user", "content": prompt.user_text},
        ],
    }

    last_error: Exception | None = None
    for attempt in range(1, cfg.max_retries + 2):
        try:
            resp = requests.post(cfg.base_url, json=body, headers=headers, timeout=cfg.timeout)
        except requests.Timeout as exc:
            last_error = BackendTimeout(f"backend timed out after {cfg.timeout}s")
            _sleep(cfg, attempt)
            continue
        except requests.RequestException as exc:
            last_error = BackendError(f"backend request failed: {exc}")
            _sleep(cfg, attempt)
            continue

        if resp.status_code in (401, 403):
            raise AuthFailure(f"backend rejected credentials ({resp.status_code})")
        if resp.status_code in _RETRYABLE_STATUS:
            if resp.status_code == 429:
                last_error = RateLimited("backend rate limited the request")
            else:
                last_error = BackendError(f"backend returned {resp.status_code}")
            _sleep(cfg, attempt)
            continue
        if resp.status_code != 200:
            raise BackendError(f"backend returned {resp.status_code}: {resp.text[:200]}")

        try:
            payload = resp.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedBackendResponse(f"unexpected response shape: {exc}") from exc
        if not isinstance(content, str):
            raise MalformedBackendResponse("message content is not text")
        return BackendCallResult(content, attempt=attempt)

    raise last_error if last_error else BackendError("backend retries exhausted")


def _sleep(cfg: BackendConfig, attempt: int):
    if attempt <= cfg.max_retries and cfg.backoff_base > 0:
        time.sleep(cfg.backoff_base * (2 ** (attempt - 1)))


# --- mock ---------------------------------------------------------------------

_GENERIC_TEMPLATES = {
    "enemy_ai": """using UnityEngine;

public class {name} : MonoBehaviour
{{
    [SerializeField] private float moveSpeed = 3f;
    [SerializeField] private float aggroRange = 5f;
    [SerializeField] private int contactDamage = 5;

    private Transform playerTransform;

    private void Awake()
    {{
        PlayerController player = FindObjectOfType<PlayerController>();
        if (player != null)
        {{
            playerTransform = player.transform;
        }}
    }}

    private void Update()
    {{
        if (InAggroRange())
        {{
            Advance();
        }}
    }}

    public bool InAggroRange()
    {{
        if (playerTransform == null)
        {{
            return false;
        }}
        return Vector2.Distance(transform.position, playerTransform.position) <= aggroRange;
    }}

    public void Advance()
    {{
        transform.position = Vector2.MoveTowards(transform.position, playerTransform.position, moveSpeed * Time.deltaTime);
    }}

    public int GetContactDamage()
    {{
        return contactDamage;
    }}
}}
""",
    "default": """using UnityEngine;

public class {name} : MonoBehaviour
{{
    [SerializeField] private bool activeOnStart = true;
    [SerializeField] private float tickInterval = 0.5f;

    private bool isActive;
    private float lastTickTime;

    private void Start()
    {{
        isActive = activeOnStart;
    }}

    private void Update()
    {{
        if (isActive && Time.time - lastTickTime >= tickInterval)
        {{
            lastTickTime = Time.time;
            Tick();
        }}
    }}

    public void SetActive(bool value)
    {{
        isActive = value;
    }}

    public bool IsActive()
    {{
        return isActive;
    }}

    private void Tick()
    {{
        // periodic system work goes here
    }}
}}
""",
}

_GAMESPEC_FIXTURE = {
    "title": "Mock Game",
    "genre": "platformer",
    "overview": "A deterministic fixture spec used by the mock backend.",
    "mechanics": {
        "movement": ["run", "jump"],
        "combat": [],
        "objectives": ["reach the exit"],
        "interactions": [],
    },
    "characters": {"player": "a brave square", "enemies": [], "boss": None},
    "levels": [],
    "provenance": {},
}


def _mock_library(class_name: str) -> str | None:
    ref = resources.files("gddforge").joinpath("data", "mock_scripts", f"{class_name}.cs")
    try:
        return ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None


def _call_mock(cfg: BackendConfig, prompt) -> BackendCallResult:
    target = getattr(prompt, "target_class", "") or ""
    if target in cfg.fail_classes:
        raise BackendError(f"injected failure for {target}", script=target)

    if target == "__gamespec__":
        return BackendCallResult(json.dumps(_GAMESPEC_FIXTURE), attempt=1)

    source = _mock_library(target)
    if source is None:
        category = getattr(prompt, "target_category", "") or "default"
        template = _GENERIC_TEMPLATES.get(category, _GENERIC_TEMPLATES["default"])
        source = template.format(name=target or "GeneratedBehaviour")

    rationale = getattr(prompt, "target_rationale", "") or ""
    header = f"// {target}: {rationale}\n" if rationale else ""
    text = (
        f"Here is the {target or 'requested'} implementation:\n\n"
        f"```csharp\n{header}{source.rstrip()}\n```\n\n"
        "Attach the script to an appropriate GameObject in your scene."
    )
    return BackendCallResult(text, attempt=1)
