"""Documentation generation and template packaging.

Docs are rendered from validator summaries with per-category templates, not
from another LLM round-trip: deterministic, free, and always in sync with the
code that was actually generated. Packages are written atomically (staging
directory plus rename) with a manifest that digests every file.
"""

from __future__ import annotations

import io
import json
import os
import shutil
import zipfile
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analyze import ScriptPlan
from .csharp import summarize_class
from .errors import IoError, PackageExists, StructureTooBroken
from .generate import GeneratedScript
from .util import sha256_hex

_CATEGORY_DIRS = {
    "movement": "Movement",
    "combat": "Combat",
    "inventory": "Inventory",
    "environment_interaction": "Interaction",
    "character_controller": "Player",
    "camera": "Camera",
    "game_management": "Management",
    "enemy_ai": "Enemies",
    "ui": "UI",
}

_CATEGORY_SETUP = {
    "game_management": [
        "Create an empty GameObject named \"{cls}\" in your boot scene.",
        "Attach {cls} to it and review the serialized fields in the inspector.",
    ],
    "camera": [
        "Attach {cls} to the Main Camera object.",
        "Assign the player transform to the target field in the inspector.",
    ],
    "ui": [
        "Create a Canvas (UI > Canvas) if the scene has none.",
        "Attach {cls} to the Canvas and wire up the referenced UI elements.",
    ],
    "character_controller": [
        "Attach {cls} to the player GameObject.",
        "Add the physics components it drives (for example a Rigidbody2D and a Collider2D).",
        "Tune the serialized movement fields in the inspector.",
    ],
    "movement": [
        "Attach {cls} next to the player controller on the player GameObject.",
        "Adjust acceleration and speed fields to taste.",
    ],
    "combat": [
        "Attach {cls} to every combatant GameObject (player and enemies).",
        "Set the target layer mask so attacks can find opponents.",
    ],
    "enemy_ai": [
        "Attach {cls} to the enemy prefab.",
        "Assign patrol points or ranges in the inspector, then place instances in the scene.",
    ],
    "inventory": [
        "Attach {cls} to the player GameObject.",
        "Hook pickup triggers to its add/remove methods.",
    ],
    "environment_interaction": [
        "Attach {cls} to the player GameObject.",
        "Mark interactable objects with the configured layer.",
    ],
}

_GENERIC_SETUP = ["Attach {cls} to an appropriate GameObject and configure its fields."]


@dataclass(frozen=True)
class ScriptDoc:
    script_id: str
    class_name: str
    usage: str
    dependencies: tuple[str, ...]
    customization: tuple[tuple[str, str], ...]  # (field_name, guidance)
    setup_steps: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "script_id": self.script_id,
            "class_name": self.class_name,
            "usage": self.usage,
            "dependencies": list(self.dependencies),
            "customization": [list(c) for c in self.customization],
            "setup_steps": list(self.setup_steps),
        }


@dataclass(frozen=True)
class TemplateManifest:
    template_id: str
    created_at: str
    spec_digest: str
    plan_digest: str
    scripts: tuple[tuple[str, str, str], ...]  # (file_name, content_digest, category)
    backend: str
    tool_version: str
    template_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "template_id": self.template_id,
            "created_at": self.created_at,
            "spec_digest": self.spec_digest,
            "plan_digest": self.plan_digest,
            "scripts": [
                {"file_name": f, "content_digest": d, "category": c} for f, d, c in self.scripts
            ],
            "backend": self.backend,
            "tool_version": self.tool_version,
            "template_digest": self.template_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TemplateManifest":
        return cls(
            template_id=d["template_id"],
            created_at=d["created_at"],
            spec_digest=d["spec_digest"],
            plan_digest=d["plan_digest"],
            scripts=tuple((s["file_name"], s["content_digest"], s["category"]) for s in d["scripts"]),
            backend=d["backend"],
            tool_version=d["tool_version"],
            template_digest=d.get("template_digest", ""),
        )


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH makes package metadata reproducible when callers ask for it
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def new_manifest(spec_digest: str, plan_digest: str, backend: str) -> TemplateManifest:
    return TemplateManifest(
        template_id=f"tpl-{sha256_hex(spec_digest + plan_digest)[:12]}",
        created_at=_timestamp(),
        spec_digest=spec_digest,
        plan_digest=plan_digest,
        scripts=(),
        backend=backend,
        tool_version=__version__,
    )


def generate_docs(plan: ScriptPlan, scripts: list[GeneratedScript], reports=None) -> list[ScriptDoc]:
    """One ScriptDoc per generated script, templated from its class summary."""
    reports_by_id = {r.script_id: r for r in (reports or [])}
    docs: list[ScriptDoc] = []
    for script in scripts:
        req = plan.requirement(script.script_id)
        try:
            summaries = summarize_class(script.source)
        except StructureTooBroken:
            summaries = []
        summary = summaries[0] if summaries else None

        dep_classes = tuple(plan.class_of(d) for d in sorted(plan.dependencies_of(script.script_id)))

        usage_lines = [
            f"{script.class_name} implements the {req.category.replace('_', ' ')} behaviour for this template."
        ]
        usage_lines.append(f"Generated because: {req.rationale}.")
        if summary:
            if summary.public_methods:
                methods = ", ".join(f"{name}()" for name, _, _ in summary.public_methods)
                usage_lines.append(f"Public API: {methods}.")
            if summary.unity_messages:
                usage_lines.append(
                    "Engine hooks: " + ", ".join(sorted(summary.unity_messages)) + "."
                )
        report = reports_by_id.get(script.script_id)
        if report is not None:
            warnings = [f for f in report.findings if f.severity == "warning"]
            if warnings:
                usage_lines.append(
                    "Review notes: " + "; ".join(f"{w.code} (line {w.line})" for w in warnings) + "."
                )

        customization = []
        if summary:
            for f in summary.serialized_fields:
                where = "inspector" if f.exposure != "public" else "inspector or code"
                customization.append(
                    (f.name, f"Tune {f.name} ({f.type_text}) from the {where} to adjust behaviour.")
                )

        steps = [
            s.format(cls=script.class_name)
            for s in _CATEGORY_SETUP.get(req.category, _GENERIC_SETUP)
        ]
        if dep_classes:
            steps.append(
                "Make sure its dependencies are set up first: " + ", ".join(dep_classes) + "."
            )

        docs.append(
            ScriptDoc(
                script_id=script.script_id,
                class_name=script.class_name,
                usage=" ".join(usage_lines),
                dependencies=dep_classes,
                customization=tuple(customization),
                setup_steps=tuple(steps),
            )
        )
    return docs


def render_doc_markdown(doc: ScriptDoc) -> str:
    lines = [f"# {doc.class_name}", "", doc.usage, ""]
    lines.append("## Dependencies")
    lines.append("")
    if doc.dependencies:
        lines.extend(f"- {d}" for d in doc.dependencies)
    else:
        lines.append("- none")
    lines += ["", "## Customization", ""]
    if doc.customization:
        lines.extend(f"- **{name}** — {guidance}" for name, guidance in doc.customization)
    else:
        lines.append("- No serialized fields to tune.")
    lines += ["", "## Setup", ""]
    lines.extend(f"{i}. {step}" for i, step in enumerate(doc.setup_steps, start=1))
    lines.append("")
    return "\n".join(lines)


def _category_dir(category: str) -> str:
    return _CATEGORY_DIRS.get(category, "Misc")


def _render_files(
    plan: ScriptPlan,
    scripts: list[GeneratedScript],
    docs: list[ScriptDoc],
) -> dict[str, str]:
    """Relative path -> content for everything except manifest.json."""
    files: dict[str, str] = {}
    by_id = {s.script_id: s for s in scripts}
    for script in scripts:
        category = plan.requirement(script.script_id).category
        files[f"Scripts/{_category_dir(category)}/{script.file_name}"] = script.source
    for doc in docs:
        files[f"Docs/{doc.class_name}.md"] = render_doc_markdown(doc)

    guide = ["# Scene Setup Guide", ""]
    for sid in plan.generation_order:
        if sid not in by_id:
            continue
        doc = next((d for d in docs if d.script_id == sid), None)
        if doc is None:
            continue
        guide.append(f"## {doc.class_name}")
        guide.append("")
        guide.extend(f"{i}. {step}" for i, step in enumerate(doc.setup_steps, start=1))
        guide.append("")
    files["Docs/SETUP_GUIDE.md"] = "\n".join(guide)
    return files


def write_package(
    out_dir: str | Path,
    scripts: list[GeneratedScript],
    docs: list[ScriptDoc],
    manifest: TemplateManifest,
    plan: ScriptPlan,
    overwrite: bool = False,
) -> TemplateManifest:
    """Write the template directory atomically; returns the final manifest.

    Layout: Scripts/<Category>/<Class>.cs, Docs/<Class>.md, Docs/SETUP_GUIDE.md,
    manifest.json. An existing package is refused unless ``overwrite`` is set.
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and not overwrite:
        raise PackageExists(f"package already exists at {out_dir}")

    files = _render_files(plan, scripts, docs)

    script_entries = tuple(
        (s.file_name, sha256_hex(s.source), plan.requirement(s.script_id).category) for s in scripts
    )
    template_digest = sha256_hex(
        "\n".join(f"{path}\x00{sha256_hex(content)}" for path, content in sorted(files.items()))
    )
    final = replace(manifest, scripts=script_entries, template_digest=template_digest)

    staging = out_dir.parent / f".staging-{manifest.template_id}-{os.getpid()}"
    if staging.exists():
        shutil.rmtree(staging)
    try:
        for rel, content in files.items():
            target = staging / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8", newline="\n")
        (staging / "manifest.json").write_text(
            json.dumps(final.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
            newline="\n",
        )
        _commit(staging, out_dir, overwrite)
    except OSError as exc:
        shutil.rmtree(staging, ignore_errors=True)
        raise IoError(f"failed writing package: {exc}") from exc
    return final


def _commit(staging: Path, out_dir: Path, overwrite: bool):
    """Swap the staged tree into place. Split out so tests can fault-inject."""
    if out_dir.exists():
        if not overwrite:
            shutil.rmtree(staging, ignore_errors=True)
            raise PackageExists(f"package already exists at {out_dir}")
        shutil.rmtree(out_dir)
    os.replace(staging, out_dir)


def verify_manifest(manifest: TemplateManifest, package_dir: str | Path) -> list[str]:
    """Mismatch descriptions (empty list = coherent package)."""
    package_dir = Path(package_dir)
    problems: list[str] = []
    listed = {f: (d, c) for f, d, c in manifest.scripts}
    found: dict[str, str] = {}
    for path in package_dir.glob("Scripts/**/*.cs"):
        found[path.name] = sha256_hex(path.read_text(encoding="utf-8"))
    for file_name, (digest, _cat) in listed.items():
        if file_name not in found:
            problems.append(f"missing script file {file_name}")
        elif found[file_name] != digest:
            problems.append(f"digest mismatch for {file_name}")
    for file_name in found:
        if file_name not in listed:
            problems.append(f"unlisted script file {file_name}")
    return problems


def zip_package(package_dir: str | Path) -> bytes:
    """Deterministic zip of a written package (fixed timestamps, sorted entries)."""
    package_dir = Path(package_dir)
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for path in sorted(package_dir.rglob("*")):
            if not path.is_file():
                continue
            rel = path.relative_to(package_dir).as_posix()
            info = zipfile.ZipInfo(rel, date_time=(1980, 1, 1, 0, 0, 0))
            info.external_attr = 0o644 << 16
            zf.writestr(info, path.read_bytes())
    return buf.getvalue()
