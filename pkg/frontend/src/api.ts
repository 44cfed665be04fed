// Thin typed client over the service API. Every method returns parsed JSON or
// throws ApiFailure carrying the server's structured error body.

import type {
  GameSpec,
  Job,
  Plan,
  Reports,
  ScriptDoc,
  ScriptsResult,
} from "./types.js";

export class ApiFailure extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: Record<string, unknown>,
  ) {
    super(message);
  }
}

async function parseFailure(resp: Response): Promise<never> {
  let code = "http_error";
  let message = `${resp.status} ${resp.statusText}`;
  let detail: Record<string, unknown> | undefined;
  try {
    const body = await resp.json();
    code = body.error ?? code;
    message = body.message ?? message;
    detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiFailure(resp.status, code, message, detail);
}

export class ApiClient {
  constructor(public baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) await parseFailure(resp);
    return (await resp.json()) as T;
  }

  uploadDocument(file: File, format?: string): Promise<Job> {
    const form = new FormData();
    form.append("document", file);
    if (format) form.append("format", format);
    return this.request<Job>("/jobs", { method: "POST", body: form });
  }

  getJob(jobId: string): Promise<Job> {
    return this.request<Job>(`/jobs/${jobId}`);
  }

  getSpec(jobId: string): Promise<GameSpec> {
    return this.request<GameSpec>(`/jobs/${jobId}/spec`);
  }

  putSpec(jobId: string, spec: GameSpec): Promise<Job> {
    return this.request<Job>(`/jobs/${jobId}/spec`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(spec),
    });
  }

  buildPlan(jobId: string): Promise<Plan> {
    return this.request<Plan>(`/jobs/${jobId}/plan`, { method: "POST" });
  }

  getPlan(jobId: string): Promise<Plan> {
    return this.request<Plan>(`/jobs/${jobId}/plan`);
  }

  setSelection(
    jobId: string,
    scriptId: string,
    selected: boolean,
  ): Promise<{ plan: Plan; cascade: string[] }> {
    return this.request(`/jobs/${jobId}/plan/selection`, {
      method: "PATCH",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ script_id: scriptId, selected }),
    });
  }

  startGeneration(jobId: string, retryFailures = false): Promise<Job> {
    return this.request<Job>(`/jobs/${jobId}/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(retryFailures ? { retry_failures: true } : {}),
    });
  }

  getScripts(jobId: string): Promise<ScriptsResult> {
    return this.request<ScriptsResult>(`/jobs/${jobId}/scripts`);
  }

  async getScriptSource(jobId: string, scriptId: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/jobs/${jobId}/scripts/${scriptId}`);
    if (!resp.ok) await parseFailure(resp);
    return resp.text();
  }

  getReports(jobId: string): Promise<Reports> {
    return this.request<Reports>(`/jobs/${jobId}/reports`);
  }

  getDocs(jobId: string): Promise<{ docs: ScriptDoc[] }> {
    return this.request(`/jobs/${jobId}/docs`);
  }

  createPackage(jobId: string, outName?: string): Promise<Record<string, unknown>> {
    return this.request(`/jobs/${jobId}/package`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(outName ? { out_name: outName, overwrite: true } : { overwrite: true }),
    });
  }

  async downloadPackage(jobId: string): Promise<ArrayBuffer> {
    const resp = await fetch(`${this.baseUrl}/jobs/${jobId}/package`);
    if (!resp.ok) await parseFailure(resp);
    return resp.arrayBuffer();
  }
}
