"""On-disk job store: one directory per job, artifacts as plain JSON files.

The lifecycle is a forward-only state machine (failed is reachable from
anywhere); the only sanctioned backward move is an explicit spec edit, which
resets to spec_ready and invalidates downstream artifacts. Jobs found in
``generating`` at startup were interrupted: they reload as failed with a
resumable flag.
"""

from __future__ import annotations

import json
import shutil
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .analyze import ScriptPlan
from .errors import UnknownJob, WrongState
from .gamespec import GameSpec, spec_from_dict
from .generate import GeneratedScript, JobReport
from .ingest import SectionedDocument, SourceDocument
from .scoring import ValidationReport

STATES = ("ingested", "spec_ready", "plan_ready", "generating", "validated", "packaged", "failed")

_ORDER = {s: i for i, s in enumerate(STATES[:-1])}


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _atomic_write(path: Path, text: str):
    # readers may poll concurrently; never let them see a half-written file
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


@dataclass
class Job:
    job_id: str
    state: str
    timestamps: dict = field(default_factory=dict)
    error: str | None = None
    resumable: bool = False
    source_name: str = ""
    format: str = ""
    progress: dict = field(default_factory=dict)  # {statuses: {sid: status}, total: n}

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "timestamps": dict(self.timestamps),
            "error": self.error,
            "resumable": self.resumable,
            "source_name": self.source_name,
            "format": self.format,
            "progress": dict(self.progress),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Job":
        return cls(
            job_id=d["job_id"],
            state=d["state"],
            timestamps=dict(d.get("timestamps", {})),
            error=d.get("error"),
            resumable=d.get("resumable", False),
            source_name=d.get("source_name", ""),
            format=d.get("format", ""),
            progress=dict(d.get("progress", {})),
        )


class JobStore:
    """Filesystem-backed job registry; per-job operations serialize on a lock."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._recover_interrupted()

    # -- locking ------------------------------------------------------------

    def lock(self, job_id: str) -> threading.Lock:
        with self._locks_guard:
            if job_id not in self._locks:
                self._locks[job_id] = threading.Lock()
            return self._locks[job_id]

    # -- paths ---------------------------------------------------------------

    def job_dir(self, job_id: str) -> Path:
        return self.root / job_id

    def _state_path(self, job_id: str) -> Path:
        return self.job_dir(job_id) / "state.json"

    def _artifact(self, job_id: str, name: str) -> Path:
        return self.job_dir(job_id) / name

    # -- crash recovery --------------------------------------------------------

    def _recover_interrupted(self):
        for state_file in self.root.glob("*/state.json"):
            try:
                job = Job.from_dict(json.loads(state_file.read_text(encoding="utf-8")))
            except (json.JSONDecodeError, KeyError):
                continue
            if job.state == "generating":
                job.state = "failed"
                job.error = "generation interrupted by service restart"
                job.resumable = True
                job.timestamps["failed"] = _now()
                state_file.write_text(json.dumps(job.to_dict(), indent=2), encoding="utf-8")

    # -- core ------------------------------------------------------------------

    def create(self, doc: SourceDocument, sectioned: SectionedDocument) -> Job:
        job_id = uuid.uuid4().hex[:12]
        jdir = self.job_dir(job_id)
        jdir.mkdir(parents=True)
        job = Job(
            job_id=job_id,
            state="ingested",
            timestamps={"ingested": _now()},
            source_name=doc.source_name,
            format=doc.format,
        )
        self._write_json(job_id, "document.json", doc.to_dict())
        self._write_json(job_id, "sections.json", sectioned.to_dict())
        self._save(job)
        return job

    def load(self, job_id: str) -> Job:
        path = self._state_path(job_id)
        if not path.is_file():
            raise UnknownJob(f"no job {job_id!r}")
        return Job.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_jobs(self) -> list[Job]:
        jobs = []
        for state_file in sorted(self.root.glob("*/state.json")):
            try:
                jobs.append(Job.from_dict(json.loads(state_file.read_text(encoding="utf-8"))))
            except (json.JSONDecodeError, KeyError):
                continue
        jobs.sort(key=lambda j: j.timestamps.get("ingested", ""))
        return jobs

    def _save(self, job: Job):
        _atomic_write(self._state_path(job.job_id), json.dumps(job.to_dict(), indent=2))

    def _write_json(self, job_id: str, name: str, data):
        _atomic_write(
            self._artifact(job_id, name), json.dumps(data, indent=2, ensure_ascii=False)
        )

    def _read_json(self, job_id: str, name: str):
        path = self._artifact(job_id, name)
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    # -- transitions ------------------------------------------------------------

    def require_state(self, job: Job, allowed: tuple[str, ...]):
        if job.state not in allowed:
            raise WrongState(
                f"operation requires state in {allowed}, job is {job.state!r}", state=job.state
            )

    def transition(self, job: Job, new_state: str, error: str | None = None, resumable: bool = False):
        job.state = new_state
        job.error = error
        job.resumable = resumable
        job.timestamps[new_state] = _now()
        self._save(job)

    # -- artifact accessors --------------------------------------------------------

    def document(self, job_id: str) -> SourceDocument | None:
        d = self._read_json(job_id, "document.json")
        return SourceDocument.from_dict(d) if d else None

    def sections(self, job_id: str) -> SectionedDocument | None:
        d = self._read_json(job_id, "sections.json")
        return SectionedDocument.from_dict(d) if d else None

    def spec(self, job_id: str) -> GameSpec | None:
        d = self._read_json(job_id, "spec.json")
        return spec_from_dict(d) if d else None

    def set_spec(self, job_id: str, spec: GameSpec, *, edited: bool = False) -> Job:
        """Store the spec; an edit invalidates the plan and later artifacts."""
        job = self.load(job_id)
        self._write_json(job_id, "spec.json", spec.to_dict())
        if edited:
            for name in ("plan.json", "scripts.json", "job_report.json", "reports.json"):
                self._artifact(job_id, name).unlink(missing_ok=True)
            pkg_dir = self._artifact(job_id, "packages")
            if pkg_dir.exists():
                shutil.rmtree(pkg_dir)
        self.transition(job, "spec_ready")
        return job

    def plan(self, job_id: str) -> ScriptPlan | None:
        d = self._read_json(job_id, "plan.json")
        return ScriptPlan.from_dict(d) if d else None

    def set_plan(self, job_id: str, plan: ScriptPlan) -> Job:
        job = self.load(job_id)
        self._write_json(job_id, "plan.json", plan.to_dict())
        self.transition(job, "plan_ready")
        return job

    def update_plan(self, job_id: str, plan: ScriptPlan):
        self._write_json(job_id, "plan.json", plan.to_dict())

    def record_progress(self, job_id: str, statuses: dict, total: int):
        job = self.load(job_id)
        job.progress = {"statuses": statuses, "total": total}
        self._save(job)

    def scripts(self, job_id: str) -> list[GeneratedScript]:
        d = self._read_json(job_id, "scripts.json")
        return [GeneratedScript.from_dict(s) for s in d] if d else []

    def job_report(self, job_id: str) -> JobReport | None:
        d = self._read_json(job_id, "job_report.json")
        if d is None:
            return None
        return JobReport(
            scripts=tuple(GeneratedScript.from_dict(s) for s in d["generated"]),
            failed=tuple((f["script_id"], f["error"], f["message"]) for f in d["failed"]),
            skipped=tuple((s["script_id"], tuple(s["blocked_on"])) for s in d["skipped"]),
        )

    def set_generation_result(
        self,
        job_id: str,
        report: JobReport,
        validations: list[ValidationReport],
        plan_validation: ValidationReport,
    ) -> Job:
        job = self.load(job_id)
        self._write_json(job_id, "scripts.json", [s.to_dict() for s in report.scripts])
        self._write_json(job_id, "job_report.json", report.to_dict())
        self._write_json(
            job_id,
            "reports.json",
            {
                "per_script": [v.to_dict() for v in validations],
                "plan": plan_validation.to_dict(),
            },
        )
        if report.scripts:
            self.transition(job, "validated")
        else:
            self.transition(job, "failed", error="every selected script failed", resumable=True)
        return job

    def reports(self, job_id: str) -> dict | None:
        return self._read_json(job_id, "reports.json")

    def package_dir(self, job_id: str, name: str) -> Path:
        return self._artifact(job_id, "packages") / name

    def set_packaged(self, job_id: str, package_name: str) -> Job:
        job = self.load(job_id)
        self._write_json(job_id, "package.json", {"name": package_name})
        self.transition(job, "packaged")
        return job

    def package_info(self, job_id: str) -> dict | None:
        return self._read_json(job_id, "package.json")

    def artifacts_present(self, job_id: str) -> dict:
        return {
            "document": self._artifact(job_id, "document.json").is_file(),
            "spec": self._artifact(job_id, "spec.json").is_file(),
            "plan": self._artifact(job_id, "plan.json").is_file(),
            "scripts": self._artifact(job_id, "scripts.json").is_file(),
            "reports": self._artifact(job_id, "reports.json").is_file(),
            "package": self._artifact(job_id, "package.json").is_file(),
        }
