"""Script generation: prompts in, parsed C# sources out, in dependency order.

Each script gets its own backend call. Dependency context travels as extracted
public signatures (not full sources) to keep prompts small. Scripts at the
same dependency depth may be generated concurrently; results are committed in
plan order so output is deterministic regardless of completion order.
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .analyze import ScriptPlan
from .backend import BackendConfig, call_backend
from .csharp import public_surface_summary, summarize_class
from .errors import (
    EmptyCodeBlock,
    GddForgeError,
    MissingDependency,
    NoCodeFound,
    StructureTooBroken,
)
from .gamespec import GameSpec, render_spec_text, resolve_field_path
from .util import sha256_hex

log = logging.getLogger(__name__)

SYSTEM_PROMPT = (
    "You are an expert Unity game developer. You write clean, idiomatic, "
    "production-quality C# scripts for Unity projects: MonoBehaviour-based "
    "components, serialized tuning fields, and Unity's input system where "
    "player input is involved. Reply with exactly one script."
)

_FENCE_RE = re.compile(r"```[a-zA-Z#+]*[ \t]*\n(.*?)(?:```|\Z)", re.DOTALL)
_CLASS_DECL_RE = re.compile(r"\bclass\s+([A-Za-z_]\w*)")


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    context_scripts: tuple[tuple[str, str], ...] = ()  # (class_name, public surface)
    token_estimate: int = 0
    target_class: str = ""
    target_category: str = ""
    target_rationale: str = ""

    def digest(self) -> str:
        return sha256_hex(self.system_text + "\x00" + self.user_text)

    @classmethod
    def for_spec_extraction(cls, user_text: str) -> "PromptBundle":
        system = "You extract structured game specifications from design documents as JSON."
        return cls(
            system_text=system,
            user_text=user_text,
            token_estimate=(len(system) + len(user_text)) // 4,
            target_class="__gamespec__",
        )


@dataclass(frozen=True)
class GeneratedScript:
    script_id: str
    class_name: str
    source: str
    file_name: str
    backend: str = ""
    prompt_digest: str = ""
    latency_ms: int = 0
    attempt: int = 1
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "script_id": self.script_id,
            "class_name": self.class_name,
            "source": self.source,
            "file_name": self.file_name,
            "backend": self.backend,
            "prompt_digest": self.prompt_digest,
            "latency_ms": self.latency_ms,
            "attempt": self.attempt,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratedScript":
        d = dict(d)
        d["warnings"] = tuple(d.get("warnings", ()))
        return cls(**d)


@dataclass(frozen=True)
class JobReport:
    """Outcome of one generation run: what got made, what broke, what was skipped."""

    scripts: tuple[GeneratedScript, ...]
    failed: tuple[tuple[str, str, str], ...] = ()  # (script_id, error_code, message)
    skipped: tuple[tuple[str, tuple[str, ...]], ...] = ()  # (script_id, blocking deps)

    @property
    def ok(self) -> bool:
        return not self.failed and not self.skipped

    def to_dict(self) -> dict:
        return {
            "generated": [s.to_dict() for s in self.scripts],
            "failed": [
                {"script_id": sid, "error": code, "message": msg} for sid, code, msg in self.failed
            ],
            "skipped": [
                {"script_id": sid, "blocked_on": list(deps)} for sid, deps in self.skipped
            ],
        }


def _spec_excerpt(spec: GameSpec, field_path: str) -> str:
    lines = [f"Game: {spec.title} ({spec.genre if spec.genre != 'other' else spec.genre_detail})"]
    if spec.overview:
        lines.append(f"Overview: {spec.overview}")
    if field_path:
        value = resolve_field_path(spec, field_path)
        if isinstance(value, list):
            rendered = "; ".join(
                v if isinstance(v, str) else ", ".join(str(x) for x in v.values() if x)
                for v in value
            )
        else:
            rendered = str(value)
        lines.append(f"Relevant detail ({field_path}): {rendered}")
    else:
        lines.append("Full specification:")
        lines.append(render_spec_text(spec))
    return "\n".join(lines)


def build_prompt(
    spec: GameSpec,
    plan: ScriptPlan,
    target: str,
    done: list[GeneratedScript],
) -> PromptBundle:
    """Assemble the prompt for one script; all dependencies must be in ``done``."""
    req = plan.requirement(target)
    done_by_id = {s.script_id: s for s in done}
    context: list[tuple[str, str]] = []
    for dep_id in sorted(plan.dependencies_of(target)):
        dep = done_by_id.get(dep_id)
        if dep is None:
            raise MissingDependency(
                f"{req.class_name} depends on {plan.class_of(dep_id)} which is not generated yet"
            )
        try:
            summaries = summarize_class(dep.source)
        except StructureTooBroken:
            summaries = []
        if summaries:
            context.append((dep.class_name, public_surface_summary(summaries[0])))
        else:
            context.append((dep.class_name, f"class {dep.class_name} (no summary available)"))

    parts = [
        f"Write the Unity C# script `{req.class_name}` ({req.category} component).",
        f"Why it is needed: {req.rationale}",
        "",
        _spec_excerpt(spec, req.field_path),
    ]
    if context:
        parts.append("")
        parts.append("Already-generated components you may reference:")
        for name, summary in context:
            parts.append(summary)
    parts += [
        "",
        f"Output a single file containing exactly one public class named {req.class_name}, "
        "inside one fenced code block (```csharp ... ```). No other classes, no prose inside the block.",
    ]
    user_text = "\n".join(parts)
    return PromptBundle(
        system_text=SYSTEM_PROMPT,
        user_text=user_text,
        context_scripts=tuple(context),
        token_estimate=(len(SYSTEM_PROMPT) + len(user_text)) // 4,
        target_class=req.class_name,
        target_category=req.category,
        target_rationale=req.rationale,
    )


def parse_response(raw: str, expected_class: str) -> GeneratedScript:
    """Pull the script source out of an assistant reply.

    Takes the first fenced code block; fenceless replies that start like code
    ("using ..." / "public class ...") are taken whole. A declared class name
    differing from the expected one is a warning, not an error: the file is
    renamed to match the declaration.
    """
    if not raw or not raw.strip():
        raise NoCodeFound("backend reply is empty")

    blocks = _FENCE_RE.findall(raw)
    if blocks:
        if len(blocks) > 1:
            log.info("reply for %s has %d code blocks; discarding all but the first", expected_class, len(blocks))
        source = blocks[0]
        if not source.strip():
            raise EmptyCodeBlock("fenced code block is empty")
    else:
        stripped = raw.lstrip()
        if stripped.startswith("using ") or stripped.startswith("public class"):
            source = raw
        else:
            raise NoCodeFound("no code block and reply does not look like C# source")

    source = source.strip("\n") + "\n"

    warnings: list[str] = []
    declared = _CLASS_DECL_RE.findall(source)
    class_name = expected_class
    if declared and expected_class not in declared:
        class_name = declared[0]
        warnings.append(f"NameMismatch: expected {expected_class}, declared {declared[0]}")
    elif not declared:
        warnings.append("NoClassDeclared: reply contains no class declaration")

    return GeneratedScript(
        script_id="",
        class_name=class_name,
        source=source,
        file_name=f"{class_name}.cs",
        warnings=tuple(warnings),
    )


def _depths(plan: ScriptPlan, order: list[str]) -> dict[str, int]:
    depth: dict[str, int] = {}
    selected = set(order)
    for sid in order:  # topological: deps come first
        deps = [d for d in plan.dependencies_of(sid) if d in selected]
        depth[sid] = 1 + max((depth[d] for d in deps), default=-1)
    return depth


def generate_all(
    spec: GameSpec,
    plan: ScriptPlan,
    cfg: BackendConfig,
    preexisting: list[GeneratedScript] | None = None,
    on_progress=None,
) -> JobReport:
    """Generate every selected script in dependency order.

    A script that fails (after the backend's own retries) is recorded and its
    transitive dependents are skipped; everything else proceeds. Scripts at
    equal dependency depth run concurrently up to ``cfg.concurrency``.

    ``preexisting`` scripts (from an earlier run) are kept as-is and only the
    missing ones are generated — the retry-failures path. ``on_progress``
    (statuses dict, total) is called after every script settles.
    """
    order = list(plan.generation_order)
    done: dict[str, GeneratedScript] = {}
    failed: list[tuple[str, str, str]] = []
    skipped: list[tuple[str, tuple[str, ...]]] = []
    unavailable: set[str] = set()

    statuses: dict[str, str] = {sid: "pending" for sid in order}
    for s in preexisting or []:
        if s.script_id in statuses:
            done[s.script_id] = s
            statuses[s.script_id] = "generated"

    def notify(sid: str, status: str):
        statuses[sid] = status
        if on_progress is not None:
            on_progress(dict(statuses), len(order))

    depth = _depths(plan, order)
    waves: dict[int, list[str]] = {}
    for sid in order:
        waves.setdefault(depth[sid], []).append(sid)

    def run_one(sid: str) -> GeneratedScript:
        req = plan.requirement(sid)
        bundle = build_prompt(spec, plan, sid, list(done.values()))
        start = time.monotonic()
        reply = call_backend(cfg, bundle)
        latency = int((time.monotonic() - start) * 1000)
        script = parse_response(str(reply), req.class_name)
        return replace(
            script,
            script_id=sid,
            backend=f"{cfg.kind}:{cfg.model_name}",
            prompt_digest=bundle.digest(),
            latency_ms=latency,
            attempt=getattr(reply, "attempt", 1),
        )

    max_workers = max(1, int(cfg.concurrency or 1))
    for level in sorted(waves):
        runnable: list[str] = []
        for sid in waves[level]:
            if sid in done:  # carried over from a previous run
                continue
            blocking = tuple(
                d for d in sorted(plan.dependencies_of(sid)) if d in unavailable
            )
            if blocking:
                skipped.append((sid, blocking))
                unavailable.add(sid)
                notify(sid, "skipped")
            else:
                runnable.append(sid)

        if not runnable:
            continue
        if max_workers == 1 or len(runnable) == 1:
            results = {}
            for sid in runnable:
                try:
                    results[sid] = run_one(sid)
                except GddForgeError as exc:
                    results[sid] = exc
        else:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                futures = {sid: pool.submit(run_one, sid) for sid in runnable}
                results = {}
                for sid, fut in futures.items():
                    try:
                        results[sid] = fut.result()
                    except GddForgeError as exc:
                        results[sid] = exc

        # commit in plan order for determinism
        for sid in runnable:
            outcome = results[sid]
            if isinstance(outcome, GeneratedScript):
                done[sid] = outcome
                notify(sid, "generated")
            else:
                failed.append((sid, outcome.code, outcome.message))
                unavailable.add(sid)
                notify(sid, "failed")
                log.warning("generation failed for %s: %s", sid, outcome.message)

    ordered_scripts = tuple(done[sid] for sid in order if sid in done)
    return JobReport(scripts=ordered_scripts, failed=tuple(failed), skipped=tuple(skipped))
