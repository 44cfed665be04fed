// Display-state derivation and the poll loop. Pure functions over API data:
// the server decides everything (cascades, ordering, scores); this file only
// reshapes its answers for rendering.

import type { Job, Plan, ScriptStatus, ScriptsResult } from "./types.js";

export const POLL_INTERVAL_MS = 1000; // never hammer the service

export interface ScriptBadge {
  scriptId: string;
  className: string;
  status: ScriptStatus | "deselected";
  note: string;
}

export function progressFraction(job: Job, plan: Plan | null): number {
  const statuses = job.progress?.statuses;
  if (!statuses) return job.state === "validated" || job.state === "packaged" ? 1 : 0;
  const selected = plan ? plan.effective_selected.length : (job.progress.total ?? 0);
  if (selected === 0) return 0;
  const generated = Object.values(statuses).filter((s) => s === "generated").length;
  return Math.min(1, generated / selected);
}

export function scriptBadges(plan: Plan, job: Job, result: ScriptsResult | null): ScriptBadge[] {
  const statuses = job.progress?.statuses ?? {};
  const effective = new Set(plan.effective_selected);
  const failedById = new Map((result?.failed ?? []).map((f) => [f.script_id, f]));
  const skippedById = new Map((result?.skipped ?? []).map((s) => [s.script_id, s]));

  return plan.requirements.map((req) => {
    const id = req.script_id;
    if (!effective.has(id)) {
      return { scriptId: id, className: req.class_name, status: "deselected", note: "not selected" };
    }
    const failed = failedById.get(id);
    if (failed) {
      return { scriptId: id, className: req.class_name, status: "failed", note: failed.message };
    }
    const skipped = skippedById.get(id);
    if (skipped) {
      return {
        scriptId: id,
        className: req.class_name,
        status: "skipped",
        note: `skipped (dependency failed: ${skipped.blocked_on.join(", ")})`,
      };
    }
    const live = statuses[id] ?? "pending";
    return { scriptId: id, className: req.class_name, status: live, note: live };
  });
}

/** Dependency list for indentation: children listed under what they depend on. */
export function dependencyOutline(plan: Plan): { scriptId: string; depth: number }[] {
  const depends = new Map<string, string[]>();
  for (const [from, to] of plan.edges) {
    depends.set(from, [...(depends.get(from) ?? []), to]);
  }
  const depth = new Map<string, number>();
  const order = plan.requirements.map((r) => r.script_id);
  const resolve = (id: string): number => {
    if (depth.has(id)) return depth.get(id)!;
    depth.set(id, 0); // cycle guard; plans are acyclic by construction
    const deps = depends.get(id) ?? [];
    const d = deps.length === 0 ? 0 : 1 + Math.max(...deps.map(resolve));
    depth.set(id, d);
    return d;
  };
  order.forEach(resolve);
  return order
    .map((id) => ({ scriptId: id, depth: depth.get(id) ?? 0 }))
    .sort((a, b) => a.depth - b.depth || a.scriptId.localeCompare(b.scriptId));
}

export type PollHandle = { stop: () => void };

/** Poll a job until `done(job)` returns true or `onError` is invoked. */
export function pollJob(
  fetchJob: () => Promise<Job>,
  done: (job: Job) => boolean,
  onUpdate: (job: Job) => void,
  onError: (err: unknown) => void,
  intervalMs: number = POLL_INTERVAL_MS,
): PollHandle {
  let stopped = false;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const tick = async () => {
    if (stopped) return;
    try {
      const job = await fetchJob();
      if (stopped) return;
      onUpdate(job);
      if (done(job)) return;
    } catch (err) {
      if (!stopped) onError(err);
      return;
    }
    timer = setTimeout(tick, Math.max(intervalMs, 1000));
  };

  void tick();
  return {
    stop: () => {
      stopped = true;
      if (timer) clearTimeout(timer);
    },
  };
}
