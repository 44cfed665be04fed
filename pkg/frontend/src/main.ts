// App wiring: one active job, panels shown as the lifecycle advances.
// Exported as a class so tests can drive the same actions the DOM handlers use.

import { ApiClient, ApiFailure } from "./api.js";
import {
  pollJob,
  progressFraction,
  scriptBadges,
  type PollHandle,
} from "./state.js";
import {
  markFieldError,
  renderCode,
  renderDocs,
  renderError,
  renderPlan,
  renderProgress,
  renderReports,
  renderScriptList,
  renderSpecForm,
} from "./render.js";
import type { GameSpec, Job, Plan, Reports, ScriptsResult } from "./types.js";

interface Panels {
  error: HTMLElement;
  status: HTMLElement;
  spec: HTMLElement;
  plan: HTMLElement;
  progress: HTMLElement;
  scripts: HTMLElement;
  code: HTMLElement;
  reports: HTMLElement;
  docs: HTMLElement;
  download: HTMLElement;
}

export class App {
  job: Job | null = null;
  spec: GameSpec | null = null;
  plan: Plan | null = null;
  scriptsResult: ScriptsResult | null = null;
  reports: Reports | null = null;
  lastCascade: string[] = [];
  private poller: PollHandle | null = null;

  constructor(
    public api: ApiClient,
    public panels: Panels,
    public pollIntervalMs = 1000,
  ) {}

  private fail(err: unknown): void {
    const msg =
      err instanceof ApiFailure ? `${err.code}: ${err.message}` : String(err);
    renderError(this.panels.error, msg);
  }

  private setStatus(text: string): void {
    this.panels.status.textContent = text;
  }

  stopPolling(): void {
    this.poller?.stop();
    this.poller = null;
  }

  /** Upload a GDD and poll until its spec is ready, then show the form. */
  async uploadDocument(file: File): Promise<void> {
    renderError(this.panels.error, null);
    this.stopPolling();
    this.spec = null;
    this.plan = null;
    this.scriptsResult = null;
    this.panels.plan.replaceChildren();
    this.panels.progress.replaceChildren();

    const job = await this.api.uploadDocument(file);
    this.job = job;
    this.setStatus(`job ${job.job_id}: ${job.state}`);

    await new Promise<void>((resolve, reject) => {
      this.poller = pollJob(
        () => this.api.getJob(job.job_id),
        (j) => j.state === "spec_ready" || j.state === "failed",
        (j) => {
          this.job = j;
          this.setStatus(`job ${j.job_id}: ${j.state}`);
          if (j.state === "failed") {
            this.fail(new Error(j.error ?? "extraction failed"));
            resolve();
          } else if (j.state === "spec_ready") {
            resolve();
          }
        },
        (err) => {
          this.fail(err);
          reject(err);
        },
        this.pollIntervalMs,
      );
    });

    if (this.job?.state === "spec_ready") {
      this.spec = await this.api.getSpec(job.job_id);
      renderSpecForm(this.panels.spec, this.spec, {
        onSave: (edited) => void this.saveSpec(edited),
      });
    }
  }

  async saveSpec(edited: GameSpec): Promise<void> {
    if (!this.job) return;
    renderError(this.panels.error, null);
    try {
      this.job = await this.api.putSpec(this.job.job_id, edited);
      this.spec = await this.api.getSpec(this.job.job_id);
      this.plan = null;
      this.panels.plan.replaceChildren();
      renderSpecForm(this.panels.spec, this.spec, {
        onSave: (s) => void this.saveSpec(s),
      });
      this.setStatus(`job ${this.job.job_id}: ${this.job.state} (spec saved)`);
    } catch (err) {
      if (err instanceof ApiFailure && err.code === "schema_violation") {
        markFieldError(
          this.panels.spec,
          String(err.detail?.field_path ?? "$"),
          err.message,
        );
      } else {
        this.fail(err);
      }
    }
  }

  async buildPlan(): Promise<void> {
    if (!this.job) return;
    renderError(this.panels.error, null);
    this.plan = await this.api.buildPlan(this.job.job_id);
    this.lastCascade = [];
    this.renderPlanPanel();
    this.job = await this.api.getJob(this.job.job_id);
    this.setStatus(`job ${this.job.job_id}: ${this.job.state}`);
  }

  private renderPlanPanel(): void {
    if (!this.plan) return;
    renderPlan(this.panels.plan, this.plan, this.lastCascade, {
      onToggle: (scriptId, selected) => void this.toggleScript(scriptId, selected),
    });
  }

  async toggleScript(scriptId: string, selected: boolean): Promise<void> {
    if (!this.job) return;
    try {
      const { plan, cascade } = await this.api.setSelection(this.job.job_id, scriptId, selected);
      this.plan = plan;
      this.lastCascade = cascade;
      this.renderPlanPanel();
    } catch (err) {
      if (err instanceof ApiFailure && err.status === 409) {
        this.fail(new Error(`state changed on the server (${err.message}); refresh the job`));
      } else {
        this.fail(err);
      }
    }
  }

  /** Kick off generation and poll progress until the job settles. */
  async startGeneration(retryFailures = false): Promise<void> {
    if (!this.job || !this.plan) return;
    renderError(this.panels.error, null);
    const jobId = this.job.job_id;
    this.scriptsResult = null;
    await this.api.startGeneration(jobId, retryFailures);

    await new Promise<void>((resolve, reject) => {
      this.poller = pollJob(
        () => this.api.getJob(jobId),
        (j) => j.state === "validated" || j.state === "failed",
        (j) => {
          this.job = j;
          this.setStatus(`job ${jobId}: ${j.state}`);
          this.renderProgressPanel();
          if (j.state === "validated" || j.state === "failed") resolve();
        },
        (err) => {
          this.fail(err);
          reject(err);
        },
        this.pollIntervalMs,
      );
    });

    if (this.job?.state === "validated") {
      this.scriptsResult = await this.api.getScripts(jobId);
      this.reports = await this.api.getReports(jobId);
      this.renderProgressPanel();
      renderScriptList(this.panels.scripts, this.scriptsResult, (sid) => void this.openScript(sid));
      renderReports(this.panels.reports, this.reports);
      const docs = await this.api.getDocs(jobId);
      renderDocs(this.panels.docs, docs.docs);
    } else if (this.job?.state === "failed") {
      this.fail(new Error(this.job.error ?? "generation failed"));
    }
  }

  renderProgressPanel(): void {
    if (!this.job || !this.plan) return;
    renderProgress(
      this.panels.progress,
      progressFraction(this.job, this.plan),
      scriptBadges(this.plan, this.job, this.scriptsResult),
    );
  }

  async openScript(scriptId: string): Promise<void> {
    if (!this.job) return;
    const source = await this.api.getScriptSource(this.job.job_id, scriptId);
    const report = this.reports?.per_script.find((r) => r.script_id === scriptId);
    renderCode(this.panels.code, source, report?.findings ?? []);
  }

  async packageAndDownload(): Promise<ArrayBuffer> {
    if (!this.job) throw new Error("no job");
    const jobId = this.job.job_id;
    const manifest = await this.api.createPackage(jobId);
    const zip = await this.api.downloadPackage(jobId);
    this.job = await this.api.getJob(jobId);
    this.setStatus(`job ${jobId}: ${this.job.state}`);
    this.panels.download.replaceChildren();
    const note = document.createElement("p");
    note.className = "download-note";
    note.textContent = `package ${String(manifest.template_id)} ready (${zip.byteLength} bytes)`;
    this.panels.download.append(note);
    return zip;
  }
}

export function bootstrap(root: Document = document): App | null {
  const byId = (id: string) => root.getElementById(id);
  const required = [
    "error-box", "status-line", "spec-panel", "plan-panel", "progress-panel",
    "scripts-panel", "code-panel", "reports-panel", "docs-panel", "download-panel",
  ];
  if (required.some((id) => byId(id) === null)) return null;

  const app = new App(new ApiClient(""), {
    error: byId("error-box")!,
    status: byId("status-line")!,
    spec: byId("spec-panel")!,
    plan: byId("plan-panel")!,
    progress: byId("progress-panel")!,
    scripts: byId("scripts-panel")!,
    code: byId("code-panel")!,
    reports: byId("reports-panel")!,
    docs: byId("docs-panel")!,
    download: byId("download-panel")!,
  });

  byId("upload-form")!.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = byId("file-input") as HTMLInputElement;
    const file = input.files?.[0];
    if (file) void app.uploadDocument(file);
  });
  byId("plan-button")!.addEventListener("click", () => void app.buildPlan());
  byId("generate-button")!.addEventListener("click", () => void app.startGeneration());
  byId("retry-button")!.addEventListener("click", () => void app.startGeneration(true));
  byId("download-button")!.addEventListener("click", () => {
    void app.packageAndDownload().then((zip) => {
      const blob = new Blob([zip], { type: "application/zip" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "template.zip";
      a.click();
      URL.revokeObjectURL(a.href);
    });
  });
  return app;
}

const isTestRunner = (globalThis as Record<string, unknown>)["process"] !== undefined;
if (typeof window !== "undefined" && !isTestRunner) {
  bootstrap();
}
