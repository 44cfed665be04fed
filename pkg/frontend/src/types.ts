// Shapes mirrored from the HTTP API. The UI derives all display state from
// these; it never recomputes server-side decisions.

export type JobState =
  | "ingested"
  | "spec_ready"
  | "plan_ready"
  | "generating"
  | "validated"
  | "packaged"
  | "failed";

export type ScriptStatus = "pending" | "generated" | "failed" | "skipped";

export interface Job {
  job_id: string;
  state: JobState;
  timestamps: Record<string, string>;
  error: string | null;
  resumable: boolean;
  source_name: string;
  format: string;
  progress: { statuses?: Record<string, ScriptStatus>; total?: number };
  artifacts: Record<string, boolean>;
}

export interface GameSpec {
  title: string;
  genre: string;
  genre_detail?: string;
  overview: string;
  mechanics: {
    movement: string[];
    combat: string[];
    objectives: string[];
    interactions: string[];
  };
  characters: { player: string | null; enemies: string[]; boss: string | null };
  levels: { name: string; environment_theme?: string; description?: string }[];
  provenance: Record<string, string>;
}

export interface Requirement {
  script_id: string;
  class_name: string;
  category: string;
  rationale: string;
  field_path: string;
  selected: boolean;
}

export interface Plan {
  spec_digest: string;
  requirements: Requirement[];
  edges: [string, string][]; // [dependent, dependency]
  generation_order: string[];
  effective_selected: string[];
}

export interface ScriptMeta {
  script_id: string;
  class_name: string;
  file_name: string;
  backend: string;
  latency_ms: number;
  attempt: number;
  warnings: string[];
  href: string;
}

export interface ScriptsResult {
  scripts: ScriptMeta[];
  failed?: { script_id: string; error: string; message: string }[];
  skipped?: { script_id: string; blocked_on: string[] }[];
}

export interface Finding {
  severity: "error" | "warning" | "info";
  code: string;
  line: number;
  message: string;
}

export interface ValidationReport {
  script_id: string;
  structural_ok: boolean;
  findings: Finding[];
  proxy_scores: Record<string, number>;
  metrics: Record<string, number>;
}

export interface Reports {
  per_script: ValidationReport[];
  plan: ValidationReport;
}

export interface ScriptDoc {
  script_id: string;
  class_name: string;
  markdown: string;
}

export interface ApiError {
  error: string;
  message: string;
  detail?: Record<string, unknown>;
}
