"""Command-line interface over the pipeline.

Exit codes: 0 success, 1 usage, 2 validation, 3 backend, 4 io. Failures land
on stderr as one JSON object so scripts can consume them.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .analyze import analyze as analyze_spec
from .analyze import set_selection
from .config import AppConfig, load_config
from .csharp import check_structure
from .docgen import generate_docs, new_manifest, write_package
from .errors import GddForgeError, UsageError, ValidationFailed
from .evalharness import aggregate, ingest_scores, render_report
from .gamespec import export_training_pair, extract_spec, validate_spec
from .generate import generate_all
from .ingest import load_document, segment_sections
from .jobstore import JobStore
from .scoring import score_proxies


def _emit(data):
    click.echo(json.dumps(data, indent=2, ensure_ascii=False))


def _store(config: AppConfig, jobs_dir: str | None) -> JobStore:
    return JobStore(jobs_dir or config.jobs_dir)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="TOML config file.")
@click.option("--jobs-dir", default=None, help="Job store directory (overrides config).")
@click.pass_context
def cli(ctx, config_path, jobs_dir):
    """gddforge: game design documents in, Unity script templates out."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = load_config(config_path)
    ctx.obj["jobs_dir"] = jobs_dir


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", default=None, help="txt|md|pdf|docx (default: file extension).")
@click.option("--mode", default="heuristic", type=click.Choice(["heuristic", "llm_assisted"]))
@click.pass_context
def ingest(ctx, file, fmt, mode):
    """Load a GDD, extract its spec, and open a job."""
    config: AppConfig = ctx.obj["config"]
    path = Path(file)
    declared = fmt or path.suffix.lstrip(".").lower() or "txt"
    doc = load_document(path, declared, converters=config.converters)
    sectioned = segment_sections(doc)
    store = _store(config, ctx.obj["jobs_dir"])
    job = store.create(doc, sectioned)
    spec = extract_spec(sectioned, mode=mode, backend_cfg=config.backend)
    store.set_spec(job.job_id, spec)
    _emit(store.load(job.job_id).to_dict())


@cli.command()
@click.argument("job_id")
@click.option("--edit", "edit_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Replace the spec with the JSON in this file (re-validated).")
@click.pass_context
def spec(ctx, job_id, edit_file):
    """Print (or replace) a job's extracted GameSpec."""
    store = _store(ctx.obj["config"], ctx.obj["jobs_dir"])
    if edit_file:
        new_spec = validate_spec(Path(edit_file).read_text(encoding="utf-8"))
        store.load(job_id)
        store.set_spec(job_id, new_spec, edited=True)
    current = store.spec(job_id)
    if current is None:
        store.load(job_id)  # raises UnknownJob if the job itself is missing
        raise UsageError(f"job {job_id} has no spec yet")
    _emit(current.to_dict())


@cli.command()
@click.argument("job_id")
@click.pass_context
def plan(ctx, job_id):
    """Derive the script plan (requirements + dependency DAG) for a job."""
    store = _store(ctx.obj["config"], ctx.obj["jobs_dir"])
    current = store.spec(job_id)
    if current is None:
        store.load(job_id)
        raise UsageError(f"job {job_id} has no spec yet; run ingest first")
    new_plan = analyze_spec(current)
    store.set_plan(job_id, new_plan)
    _emit(new_plan.to_dict())


@cli.command()
@click.argument("job_id")
@click.argument("script_id")
@click.argument("state", type=click.Choice(["on", "off"]))
@click.pass_context
def select(ctx, job_id, script_id, state):
    """Toggle a planned script on or off (dependents cascade)."""
    store = _store(ctx.obj["config"], ctx.obj["jobs_dir"])
    current = store.plan(job_id)
    if current is None:
        store.load(job_id)
        raise UsageError(f"job {job_id} has no plan yet; run plan first")
    updated, cascade = set_selection(current, script_id, state == "on")
    store.update_plan(job_id, updated)
    _emit({"script_id": script_id, "selected": state == "on", "cascade": cascade,
           "generation_order": list(updated.generation_order)})


@cli.command()
@click.argument("job_id")
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "http_chat"]), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Also write the template package to this directory.")
@click.option("--overwrite", is_flag=True, default=False)
@click.pass_context
def generate(ctx, job_id, backend_kind, out_dir, overwrite):
    """Generate all selected scripts, validate them, optionally package."""
    config: AppConfig = ctx.obj["config"]
    store = _store(config, ctx.obj["jobs_dir"])
    spec_obj = store.spec(job_id)
    plan_obj = store.plan(job_id)
    if spec_obj is None or plan_obj is None:
        store.load(job_id)
        raise UsageError(f"job {job_id} needs spec and plan before generate")

    backend_cfg = config.backend
    if backend_kind:
        backend_cfg = replace(backend_cfg, kind=backend_kind)

    job = store.load(job_id)
    store.transition(job, "generating")
    report = generate_all(spec_obj, plan_obj, backend_cfg)
    validations, plan_validation = score_proxies(list(report.scripts), spec_obj, plan_obj)
    store.set_generation_result(job_id, report, validations, plan_validation)

    out = {
        "job_id": job_id,
        "state": store.load(job_id).state,
        "generated": [s.class_name for s in report.scripts],
        "failed": [{"script_id": sid, "error": code} for sid, code, _ in report.failed],
        "skipped": [{"script_id": sid, "blocked_on": list(deps)} for sid, deps in report.skipped],
        "proxy_scores": plan_validation.proxy_scores,
    }

    if out_dir:
        docs = generate_docs(plan_obj, list(report.scripts), validations)
        manifest = new_manifest(
            spec_obj.digest(), plan_obj.digest(),
            report.scripts[0].backend if report.scripts else backend_cfg.kind,
        )
        final = write_package(out_dir, list(report.scripts), docs, manifest, plan_obj,
                              overwrite=overwrite)
        store.set_packaged(job_id, str(out_dir))
        out["package"] = {"dir": str(out_dir), "template_digest": final.template_digest}
        out["state"] = store.load(job_id).state
    _emit(out)


@cli.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
def validate(directory):
    """Structurally validate every .cs file in a directory tree."""
    results = []
    broken = []
    for path in sorted(Path(directory).rglob("*.cs")):
        findings = check_structure(path.read_text(encoding="utf-8", errors="replace"))
        errors = [f for f in findings if f.severity == "error"]
        results.append(
            {
                "file": str(path),
                "structural_ok": not errors,
                "findings": [f.to_dict() for f in findings],
            }
        )
        if errors:
            broken.append(str(path))
    if not results:
        raise UsageError(f"no .cs files under {directory}")
    _emit({"files": results})
    if broken:
        raise ValidationFailed(f"{len(broken)} file(s) with structural errors", files=broken)


@cli.command("eval")
@click.argument("scores_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", default="table_text",
              type=click.Choice(["table_text", "json", "csv", "radar_csv"]))
@click.option("--model-order", default=None,
              help="Comma-separated model names fixing row order in the output.")
def eval_cmd(scores_file, fmt, model_order):
    """Aggregate rubric scores and render the comparison report."""
    records = ingest_scores(Path(scores_file))
    report = aggregate(records)
    order = [m.strip() for m in model_order.split(",")] if model_order else None
    click.echo(render_report(report, fmt, model_order=order), nl=False)


@cli.command("export-pairs")
@click.argument("job_id")
@click.option("--out", "out_file", type=click.Path(), required=True)
@click.pass_context
def export_pairs(ctx, job_id, out_file):
    """Append this job's (spec, scripts) as one JSONL training pair."""
    store = _store(ctx.obj["config"], ctx.obj["jobs_dir"])
    spec_obj = store.spec(job_id)
    scripts = store.scripts(job_id)
    if spec_obj is None or not scripts:
        store.load(job_id)
        raise UsageError(f"job {job_id} needs a spec and generated scripts to export")
    export_training_pair(spec_obj, scripts, out_path=out_file)
    _emit({"written": 1, "file": str(out_file)})


@cli.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config: AppConfig = ctx.obj["config"]
    if ctx.obj["jobs_dir"]:
        config = replace(config, jobs_dir=ctx.obj["jobs_dir"])
    uvicorn.run(create_app(config), host=host or config.host, port=port or config.port)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        sys.stderr.write(json.dumps({"error": "usage_error", "message": exc.format_message()}) + "\n")
        return 1
    except click.ClickException as exc:
        sys.stderr.write(json.dumps({"error": "cli_error", "message": exc.format_message()}) + "\n")
        return 1
    except GddForgeError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return exc.exit_code
    except click.exceptions.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
