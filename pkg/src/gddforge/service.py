"""HTTP service exposing the pipeline: upload, review, select, generate, package.

The programmatic stand-in for an editor integration: a small JSON API with
polling (no websockets), one directory per job on disk, and an optional static
mount for the web UI. Long steps (extraction, generation) run in background
threads; clients poll GET /jobs/{id}.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .analyze import analyze, set_selection
from .backend import BackendConfig
from .config import AppConfig, load_config
from .docgen import generate_docs, new_manifest, verify_manifest, write_package, zip_package
from .errors import (
    BackendError,
    GddForgeError,
    PackageExists,
    UnknownJob,
    UnknownScript,
    UsageError,
    WrongState,
)
from .evalharness import aggregate, ingest_scores, render_report
from .gamespec import extract_spec, gamespec_schema, validate_spec
from .generate import generate_all
from .ingest import SUPPORTED_FORMATS, load_document, segment_sections
from .jobstore import JobStore
from .scoring import score_proxies

log = logging.getLogger(__name__)


def _status_for(exc: GddForgeError) -> int:
    if isinstance(exc, (UnknownJob, UnknownScript)):
        return 404
    if isinstance(exc, (WrongState, PackageExists)):
        return 409
    if isinstance(exc, BackendError):
        return 502
    return 400


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or load_config()
    store = JobStore(config.jobs_dir)
    app = FastAPI(title="gddforge", version=__version__)
    app.state.config = config
    app.state.store = store

    @app.exception_handler(GddForgeError)
    async def _gddforge_error(_request: Request, exc: GddForgeError):
        return JSONResponse(status_code=_status_for(exc), content=exc.to_dict())

    if config.token:

        @app.middleware("http")
        async def _auth(request: Request, call_next):
            open_paths = ("/health", "/schema", "/ui", "/docs", "/openapi.json")
            if not any(request.url.path.startswith(p) for p in open_paths):
                header = request.headers.get("authorization", "")
                if header != f"Bearer {config.token}":
                    return JSONResponse(
                        status_code=401,
                        content={"error": "auth_failure", "message": "missing or bad bearer token"},
                    )
            return await call_next(request)

    # -- helpers ---------------------------------------------------------------

    def job_view(job_id: str) -> dict:
        job = store.load(job_id)
        view = job.to_dict()
        view["artifacts"] = store.artifacts_present(job_id)
        base = f"/jobs/{job_id}"
        view["links"] = {
            "self": base,
            "spec": f"{base}/spec",
            "plan": f"{base}/plan",
            "scripts": f"{base}/scripts",
            "reports": f"{base}/reports",
            "package": f"{base}/package",
        }
        return view

    def refuse_while_generating(job_id: str):
        job = store.load(job_id)
        if job.state == "generating":
            raise WrongState("job is generating; poll GET /jobs/{id} until it settles", state="generating")
        return job

    def run_async(target, *args):
        t = threading.Thread(target=target, args=args, daemon=True)
        t.start()
        return t

    def _extract_job(job_id: str, mode: str):
        with store.lock(job_id):
            try:
                sectioned = store.sections(job_id)
                spec = extract_spec(sectioned, mode=mode, backend_cfg=config.backend)
                store.set_spec(job_id, spec)
            except GddForgeError as exc:
                job = store.load(job_id)
                store.transition(job, "failed", error=f"{exc.code}: {exc.message}")
            except Exception as exc:  # pragma: no cover - defensive
                log.exception("extraction crashed for %s", job_id)
                job = store.load(job_id)
                store.transition(job, "failed", error=str(exc))

    def _generate_job(job_id: str, backend_cfg: BackendConfig, retry_failures: bool):
        with store.lock(job_id):
            try:
                spec = store.spec(job_id)
                plan = store.plan(job_id)
                preexisting = store.scripts(job_id) if retry_failures else None

                def on_progress(statuses, total):
                    store.record_progress(job_id, statuses, total)

                report = generate_all(
                    spec, plan, backend_cfg, preexisting=preexisting, on_progress=on_progress
                )
                validations, plan_validation = score_proxies(list(report.scripts), spec, plan)
                store.set_generation_result(job_id, report, validations, plan_validation)
            except GddForgeError as exc:
                job = store.load(job_id)
                store.transition(job, "failed", error=f"{exc.code}: {exc.message}", resumable=True)
            except Exception as exc:  # pragma: no cover - defensive
                log.exception("generation crashed for %s", job_id)
                job = store.load(job_id)
                store.transition(job, "failed", error=str(exc), resumable=True)

    # -- meta ----------------------------------------------------------------

    @app.get("/health")
    def health():
        return {"ok": True, "version": __version__}

    @app.get("/schema/gamespec")
    def schema():
        return gamespec_schema()

    # -- jobs -------------------------------------------------------------------

    @app.post("/jobs", status_code=201)
    def create_job(
        document: UploadFile = File(...),
        format: str = Form(""),
        mode: str = Form("heuristic"),
        sync: int = Form(0),
    ):
        declared = format or Path(document.filename or "").suffix.lstrip(".").lower() or "txt"
        if declared not in SUPPORTED_FORMATS:
            raise UsageError(f"format {declared!r} not in {SUPPORTED_FORMATS}")
        if mode not in ("heuristic", "llm_assisted"):
            raise UsageError(f"mode must be heuristic or llm_assisted, got {mode!r}")
        raw = document.file.read()
        name = Path(document.filename or "document").stem
        doc = load_document(
            raw, declared, converters=config.converters, origin="upload", source_name=name
        )
        sectioned = segment_sections(doc)
        job = store.create(doc, sectioned)
        if sync:
            _extract_job(job.job_id, mode)
        else:
            run_async(_extract_job, job.job_id, mode)
        return job_view(job.job_id)

    @app.get("/jobs")
    def list_jobs():
        return {"jobs": [job_view(j.job_id) for j in store.list_jobs()]}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return job_view(job_id)

    @app.get("/jobs/{job_id}/spec")
    def get_spec(job_id: str):
        store.load(job_id)
        spec = store.spec(job_id)
        if spec is None:
            raise UnknownJob(f"job {job_id} has no spec yet")
        return json.loads(spec.to_json())

    @app.put("/jobs/{job_id}/spec")
    def put_spec(job_id: str, body: dict):
        refuse_while_generating(job_id)
        with store.lock(job_id):
            job = store.load(job_id)
            store.require_state(
                job, ("spec_ready", "plan_ready", "validated", "packaged", "failed")
            )
            spec = validate_spec(json.dumps(body))
            store.set_spec(job_id, spec, edited=True)
            return job_view(job_id)

    # -- plan ---------------------------------------------------------------------

    @app.post("/jobs/{job_id}/plan")
    def make_plan(job_id: str):
        refuse_while_generating(job_id)
        with store.lock(job_id):
            job = store.load(job_id)
            store.require_state(job, ("spec_ready", "plan_ready"))
            spec = store.spec(job_id)
            plan = analyze(spec)
            store.set_plan(job_id, plan)
            return plan_view(job_id)

    def plan_view(job_id: str) -> dict:
        plan = store.plan(job_id)
        if plan is None:
            raise UnknownJob(f"job {job_id} has no plan yet")
        d = plan.to_dict()
        d["effective_selected"] = sorted(plan.effective_selected())
        return d

    @app.get("/jobs/{job_id}/plan")
    def get_plan(job_id: str):
        store.load(job_id)
        return plan_view(job_id)

    @app.patch("/jobs/{job_id}/plan/selection")
    def patch_selection(job_id: str, body: dict):
        if "script_id" not in body or "selected" not in body:
            raise UsageError("body must carry script_id and selected")
        refuse_while_generating(job_id)
        with store.lock(job_id):
            job = store.load(job_id)
            store.require_state(job, ("plan_ready",))
            plan = store.plan(job_id)
            plan, cascade = set_selection(plan, str(body["script_id"]), bool(body["selected"]))
            store.update_plan(job_id, plan)
            view = plan_view(job_id)
            return {"plan": view, "cascade": cascade}

    # -- generation ------------------------------------------------------------------

    @app.post("/jobs/{job_id}/generate", status_code=202)
    def generate(job_id: str, body: dict | None = None):
        body = body or {}
        overrides = body.get("backend", {})
        backend_cfg = config.backend
        if overrides:
            fields = {}
            mapping = {
                "kind": "kind",
                "base_url": "base_url",
                "model": "model_name",
                "api_key_env": "api_key_ref",
                "timeout_s": "timeout",
                "max_retries": "max_retries",
                "temperature": "temperature",
                "concurrency": "concurrency",
                "fail_classes": "fail_classes",
            }
            for key, attr in mapping.items():
                if key in overrides:
                    value = overrides[key]
                    if attr == "fail_classes":
                        value = tuple(value)
                    fields[attr] = value
            backend_cfg = replace(backend_cfg, **fields)

        refuse_while_generating(job_id)
        with store.lock(job_id):
            job = store.load(job_id)
            if job.state == "failed":
                if not (job.resumable and store.plan(job_id) is not None):
                    raise WrongState("failed job is not resumable", state=job.state)
            else:
                # validated jobs may regenerate (the UI retry path)
                store.require_state(job, ("plan_ready", "validated"))
            store.transition(job, "generating")
        run_async(_generate_job, job_id, backend_cfg, bool(body.get("retry_failures")))
        return job_view(job_id)

    @app.get("/jobs/{job_id}/scripts")
    def get_scripts(job_id: str):
        store.load(job_id)
        scripts = store.scripts(job_id)
        report = store.job_report(job_id)
        meta = []
        for s in scripts:
            d = s.to_dict()
            d.pop("source")
            d["href"] = f"/jobs/{job_id}/scripts/{s.script_id}"
            meta.append(d)
        out = {"scripts": meta}
        if report is not None:
            out["failed"] = [
                {"script_id": sid, "error": code, "message": msg} for sid, code, msg in report.failed
            ]
            out["skipped"] = [
                {"script_id": sid, "blocked_on": list(deps)} for sid, deps in report.skipped
            ]
        return out

    @app.get("/jobs/{job_id}/scripts/{script_id}")
    def get_script_source(job_id: str, script_id: str):
        store.load(job_id)
        for s in store.scripts(job_id):
            if s.script_id == script_id:
                return PlainTextResponse(s.source)
        raise UnknownScript(f"no generated script {script_id!r} in job {job_id}")

    @app.get("/jobs/{job_id}/reports")
    def get_reports(job_id: str):
        store.load(job_id)
        reports = store.reports(job_id)
        if reports is None:
            raise UnknownJob(f"job {job_id} has no validation reports yet")
        return reports

    @app.get("/jobs/{job_id}/docs")
    def get_docs(job_id: str):
        store.load(job_id)
        scripts = store.scripts(job_id)
        plan = store.plan(job_id)
        if not scripts or plan is None:
            raise UnknownJob(f"job {job_id} has no generated scripts yet")
        from .docgen import render_doc_markdown
        from .scoring import ValidationReport

        reports = store.reports(job_id)
        validations = (
            [ValidationReport.from_dict(r) for r in reports["per_script"]] if reports else None
        )
        docs = generate_docs(plan, scripts, validations)
        return {
            "docs": [
                {
                    "script_id": d.script_id,
                    "class_name": d.class_name,
                    "markdown": render_doc_markdown(d),
                }
                for d in docs
            ]
        }

    # -- packaging --------------------------------------------------------------------

    @app.post("/jobs/{job_id}/package")
    def package(job_id: str, body: dict | None = None):
        body = body or {}
        refuse_while_generating(job_id)
        with store.lock(job_id):
            job = store.load(job_id)
            store.require_state(job, ("validated", "packaged"))
            spec = store.spec(job_id)
            plan = store.plan(job_id)
            scripts = store.scripts(job_id)
            reports = store.reports(job_id)
            validations = None
            if reports:
                from .scoring import ValidationReport

                validations = [ValidationReport.from_dict(r) for r in reports["per_script"]]
            docs = generate_docs(plan, scripts, validations)
            manifest = new_manifest(spec.digest(), plan.digest(), job_or_backend(scripts))
            out_name = str(body.get("out_name") or manifest.template_id)
            out_dir = store.package_dir(job_id, out_name)
            final = write_package(
                out_dir, scripts, docs, manifest, plan, overwrite=bool(body.get("overwrite"))
            )
            store.set_packaged(job_id, out_name)
            return final.to_dict()

    def job_or_backend(scripts) -> str:
        return scripts[0].backend if scripts else "unknown"

    @app.get("/jobs/{job_id}/package")
    def download_package(job_id: str):
        job = store.load(job_id)
        store.require_state(job, ("packaged",))
        info = store.package_info(job_id)
        pkg_dir = store.package_dir(job_id, info["name"])
        data = zip_package(pkg_dir)
        return Response(
            content=data,
            media_type="application/zip",
            headers={"Content-Disposition": f'attachment; filename="{info["name"]}.zip"'},
        )

    @app.get("/jobs/{job_id}/package/verify")
    def verify_package(job_id: str):
        job = store.load(job_id)
        store.require_state(job, ("packaged",))
        info = store.package_info(job_id)
        pkg_dir = store.package_dir(job_id, info["name"])
        from .docgen import TemplateManifest

        manifest = TemplateManifest.from_dict(
            json.loads((pkg_dir / "manifest.json").read_text(encoding="utf-8"))
        )
        problems = verify_manifest(manifest, pkg_dir)
        return {"ok": not problems, "problems": problems}

    # -- evaluation -------------------------------------------------------------------

    @app.post("/eval/scores")
    def upload_scores(scores: UploadFile = File(...)):
        raw = scores.file.read()
        records = ingest_scores(raw, fmt="jsonl" if (scores.filename or "").endswith((".jsonl", ".ndjson")) else "csv")
        (store.root / "eval_scores.json").write_text(
            json.dumps([r.__dict__ for r in records]), encoding="utf-8"
        )
        return {"records": len(records)}

    @app.get("/eval/report")
    def eval_report(format: str = "json"):
        path = store.root / "eval_scores.json"
        if not path.is_file():
            raise UnknownJob("no scores uploaded yet")
        from .evalharness import ScoreRecord

        records = [ScoreRecord(**r) for r in json.loads(path.read_text(encoding="utf-8"))]
        report = aggregate(records)
        if format == "json":
            return report.to_dict()
        return PlainTextResponse(render_report(report, format))

    # -- static UI ---------------------------------------------------------------------

    static_dir = Path(config.static_dir) if config.static_dir else None
    if static_dir and static_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def main():  # pragma: no cover - thin runner
    import uvicorn

    config = load_config()
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":  # pragma: no cover
    main()
