// @vitest-environment node
//
// Full-loop test against the real service (mock generation backend):
// upload -> review spec -> toggle selection (cascade badge) -> generate ->
// inspect -> download zip and verify the manifest digests.
//
// Runs in the node environment so fetch/FormData/File are one consistent
// built-in family (the jsdom environment's Blob breaks undici's multipart
// serialization); the DOM comes from an explicit JSDOM instance instead.

import { spawn, type ChildProcess } from "node:child_process";
import { createHash } from "node:crypto";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import JSZip from "jszip";
import { JSDOM } from "jsdom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

const dom = new JSDOM("<!doctype html><html><body></body></html>");
(globalThis as Record<string, unknown>).document = dom.window.document;
(globalThis as Record<string, unknown>).HTMLElement = dom.window.HTMLElement;
(globalThis as Record<string, unknown>).Event = dom.window.Event;
const NodeFile = File;

import { ApiClient } from "../src/api.js";
import { App } from "../src/main.js";

const PORT = 18732 + Math.floor(Math.random() * 2000);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(__dirname, "..", "..");

let service: ChildProcess;

async function waitForHealth(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service never became healthy");
}

beforeAll(async () => {
  const jobsDir = mkdtempSync(join(tmpdir(), "gddforge-e2e-"));
  service = spawn(
    "python3",
    [
      "-c",
      "from gddforge.config import load_config\n" +
        "from gddforge.service import create_app\n" +
        "import uvicorn\n" +
        `uvicorn.run(create_app(load_config()), host='127.0.0.1', port=${PORT}, log_level='warning')`,
    ],
    {
      env: {
        ...process.env,
        GDDFORGE_JOBS_DIR: jobsDir,
        GDDFORGE_BACKEND_KIND: "mock",
      },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  service.stderr?.on("data", (chunk) => {
    const text = String(chunk);
    if (text.includes("Traceback")) console.error("[service]", text);
  });
  await waitForHealth();
}, 45000);

afterAll(() => {
  service?.kill("SIGTERM");
});

function makePanels() {
  const ids = [
    "error", "status", "spec", "plan", "progress",
    "scripts", "code", "reports", "docs", "download",
  ] as const;
  const panels = {} as Record<(typeof ids)[number], HTMLElement>;
  for (const id of ids) {
    const node = document.createElement("div");
    node.id = `${id}-panel-e2e`;
    document.body.append(node);
    panels[id] = node;
  }
  return panels;
}

describe("upload -> review -> select -> generate -> download", () => {
  it("completes on the platformer fixture and the zip manifest verifies", async () => {
    document.body.replaceChildren();
    const panels = makePanels();
    const app = new App(new ApiClient(BASE), panels, 1000);

    // upload and wait for the extracted spec
    const gddBytes = readFileSync(join(REPO_ROOT, "tests", "fixtures", "gdds", "platformer.md"));
    const file = new NodeFile([gddBytes], "platformer.md") as unknown as File;
    await app.uploadDocument(file);
    expect(app.job?.state).toBe("spec_ready");

    // spec form shows the extracted title and genre
    const title = panels.spec.querySelector("#spec-title") as HTMLInputElement;
    const genre = panels.spec.querySelector("#spec-genre") as HTMLSelectElement;
    expect(title.value).toBe("Sky Hopper");
    expect(genre.value).toBe("platformer");

    // edit the spec through the form path and save (PUT + re-render)
    title.value = "Sky Hopper DX";
    (panels.spec.querySelector("#spec-form") as HTMLFormElement).dispatchEvent(
      new Event("submit", { bubbles: true, cancelable: true }),
    );
    await new Promise((r) => setTimeout(r, 300));
    expect((panels.spec.querySelector("#spec-title") as HTMLInputElement).value).toBe(
      "Sky Hopper DX",
    );

    // derive the plan, then deselect PlayerController: cascade badge appears
    await app.buildPlan();
    expect(panels.plan.querySelectorAll(".plan-item").length).toBeGreaterThanOrEqual(8);
    await app.toggleScript("player_controller", false);
    const cascadeBadges = panels.plan.querySelectorAll(".cascade-badge");
    expect(cascadeBadges.length).toBeGreaterThan(0);
    const combatRow = panels.plan.querySelector('[data-script="combat_system"]')!;
    expect(combatRow.querySelector(".cascade-badge")).not.toBeNull();
    const combatBox = panels.plan.querySelector("#sel-combat_system") as HTMLInputElement;
    expect(combatBox.checked).toBe(false); // checkbox auto-clears with the badge

    // reselect and generate everything
    await app.toggleScript("player_controller", true);
    expect(app.plan!.effective_selected.length).toBe(app.plan!.requirements.length);
    await app.startGeneration();
    expect(app.job?.state).toBe("validated");

    // progress reached all-selected and the badges are all "generated"
    expect(panels.progress.querySelector(".progress-text")!.textContent).toMatch(
      /^(\d+)\/\1 scripts generated$/,
    );
    expect(panels.progress.querySelectorAll(".script-badge.status-generated").length).toBe(
      app.plan!.effective_selected.length,
    );

    // code viewer shows a source with findings wired to lines
    await app.openScript("player_controller");
    expect(panels.code.textContent).toContain("class PlayerController");

    // reports table is rendered with the proxy disclaimer
    expect(panels.reports.textContent).toContain("automated proxy");

    // docs tab renders markdown per script
    expect(panels.docs.querySelectorAll(".doc-entry").length).toBe(
      app.plan!.effective_selected.length,
    );

    // download the zip and verify every manifest digest against the archive
    const zipBytes = await app.packageAndDownload();
    expect(app.job?.state).toBe("packaged");
    const zip = await JSZip.loadAsync(zipBytes);
    const manifest = JSON.parse(await zip.file("manifest.json")!.async("string"));
    expect(manifest.scripts.length).toBe(app.plan!.effective_selected.length);

    for (const entry of manifest.scripts as { file_name: string; content_digest: string }[]) {
      const matches = zip.file(new RegExp(`^Scripts/.*/${entry.file_name}$`));
      expect(matches, entry.file_name).toHaveLength(1);
      const content = await matches[0].async("uint8array");
      const digest = createHash("sha256").update(content).digest("hex");
      expect(digest).toBe(entry.content_digest);
    }

    // SETUP_GUIDE and per-script docs are in the package too
    expect(zip.file("Docs/SETUP_GUIDE.md")).not.toBeNull();
  }, 120000);

  it("fault-injected failure surfaces failed and skipped badges with reasons", async () => {
    document.body.replaceChildren();
    const panels = makePanels();
    const app = new App(new ApiClient(BASE), panels, 1000);

    const gddBytes = readFileSync(join(REPO_ROOT, "tests", "fixtures", "gdds", "platformer.md"));
    await app.uploadDocument(new NodeFile([gddBytes], "platformer.md") as unknown as File);
    await app.buildPlan();

    // inject a CombatSystem failure through the documented backend override
    await app.api.startGeneration(app.job!.job_id, false);
    // wait for the default run to settle, then retry with fault injection via raw API
    // (the UI retry path reuses startGeneration; fault injection itself is a test-only knob)
    await new Promise<void>((resolve) => {
      const poll = setInterval(async () => {
        const job = await app.api.getJob(app.job!.job_id);
        if (job.state === "validated") {
          clearInterval(poll);
          resolve();
        }
      }, 500);
    });

    await fetch(`${BASE}/jobs/${app.job!.job_id}/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ backend: { fail_classes: ["CombatSystem"] } }),
    });
    await new Promise<void>((resolve) => {
      const poll = setInterval(async () => {
        const job = await app.api.getJob(app.job!.job_id);
        if (job.state === "validated") {
          clearInterval(poll);
          app.job = job;
          resolve();
        }
      }, 500);
    });

    app.scriptsResult = await app.api.getScripts(app.job!.job_id);
    app.renderProgressPanel();

    const failedBadge = panels.progress.querySelector(".script-badge.status-failed");
    expect(failedBadge).not.toBeNull();
    expect(failedBadge!.getAttribute("data-script")).toBe("combat_system");
    const skipped = [...panels.progress.querySelectorAll(".script-badge.status-skipped")];
    expect(skipped.length).toBeGreaterThanOrEqual(3); // slime_ai, hawk_ai, boss_controller
    expect(skipped.map((n) => n.textContent).join(" ")).toContain("dependency failed");
  }, 120000);
});
