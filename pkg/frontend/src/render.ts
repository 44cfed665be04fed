// DOM builders for each panel. All decisions (cascades, ordering, scores)
// arrive from the server; these functions only lay them out.

import { highlightWithLines } from "./highlight.js";
import { renderMarkdown } from "./markdown.js";
import type { ScriptBadge } from "./state.js";
import { dependencyOutline } from "./state.js";
import type {
  Finding,
  GameSpec,
  Plan,
  Reports,
  Requirement,
  ScriptDoc,
  ScriptsResult,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function renderError(container: HTMLElement, message: string | null): void {
  container.textContent = message ?? "";
  container.classList.toggle("visible", message !== null);
}

// --- spec form ---------------------------------------------------------------

export interface SpecFormHandlers {
  onSave: (spec: GameSpec) => void;
}

function textInput(id: string, label: string, value: string): HTMLElement {
  return el(
    "div",
    { class: "field" },
    el("label", { for: id }, label),
    el("input", { id, type: "text", value }),
  );
}

function textArea(id: string, label: string, value: string, rows = 3): HTMLElement {
  const area = el("textarea", { id, rows: String(rows) });
  area.value = value;
  return el("div", { class: "field" }, el("label", { for: id }, label), area);
}

function listToText(items: string[]): string {
  return items.join("\n");
}

function textToList(text: string): string[] {
  return text
    .split("\n")
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

export function renderSpecForm(
  container: HTMLElement,
  spec: GameSpec,
  handlers: SpecFormHandlers,
): void {
  container.replaceChildren();

  const identity = el(
    "fieldset",
    {},
    el("legend", {}, "Identity"),
    textInput("spec-title", "Title", spec.title),
    el(
      "div",
      { class: "field" },
      el("label", { for: "spec-genre" }, "Genre"),
      (() => {
        const sel = el("select", { id: "spec-genre" });
        for (const g of ["platformer", "action_rpg", "puzzle", "other"]) {
          const opt = el("option", { value: g }, g);
          if (g === spec.genre) opt.setAttribute("selected", "selected");
          sel.append(opt);
        }
        return sel;
      })(),
    ),
    textInput("spec-genre-detail", "Genre detail (when other)", spec.genre_detail ?? ""),
    textArea("spec-overview", "Overview", spec.overview),
  );

  const mech = spec.mechanics;
  const mechanics = el(
    "fieldset",
    {},
    el("legend", {}, "Mechanics (one phrase per line)"),
    textArea("spec-movement", "Movement", listToText(mech.movement)),
    textArea("spec-combat", "Combat", listToText(mech.combat)),
    textArea("spec-objectives", "Objectives", listToText(mech.objectives)),
    textArea("spec-interactions", "Interactions", listToText(mech.interactions)),
  );

  const characters = el(
    "fieldset",
    {},
    el("legend", {}, "Characters"),
    textInput("spec-player", "Player", spec.characters.player ?? ""),
    textArea("spec-enemies", "Enemies (one per line)", listToText(spec.characters.enemies)),
    textInput("spec-boss", "Boss", spec.characters.boss ?? ""),
  );

  const levels = el(
    "fieldset",
    {},
    el("legend", {}, "Levels (name | theme | description, one per line)"),
    textArea(
      "spec-levels",
      "Levels",
      spec.levels
        .map((lv) => [lv.name, lv.environment_theme ?? "", lv.description ?? ""].join(" | "))
        .join("\n"),
      4,
    ),
  );

  const rawArea = el("textarea", { id: "spec-raw", rows: "10" });
  rawArea.value = JSON.stringify(spec, null, 2);
  const raw = el(
    "details",
    { class: "raw-json" },
    el("summary", {}, "Raw JSON (escape hatch)"),
    rawArea,
    el("button", { type: "button", id: "spec-raw-apply" }, "Apply raw JSON"),
  );

  const saveButton = el("button", { type: "submit", id: "spec-save" }, "Save spec");
  const form = el("form", { id: "spec-form" }, identity, mechanics, characters, levels, raw, saveButton);

  const collect = (): GameSpec => {
    const val = (id: string) => (container.querySelector(`#${id}`) as HTMLInputElement).value;
    const area = (id: string) => (container.querySelector(`#${id}`) as HTMLTextAreaElement).value;
    const genre = (container.querySelector("#spec-genre") as HTMLSelectElement).value;
    const levelsList = textToList(area("spec-levels")).map((line) => {
      const [name = "", theme = "", description = ""] = line.split("|").map((p) => p.trim());
      return { name, environment_theme: theme, description };
    });
    const out: GameSpec = {
      title: val("spec-title"),
      genre,
      overview: area("spec-overview"),
      mechanics: {
        movement: textToList(area("spec-movement")),
        combat: textToList(area("spec-combat")),
        objectives: textToList(area("spec-objectives")),
        interactions: textToList(area("spec-interactions")),
      },
      characters: {
        player: val("spec-player") || null,
        enemies: textToList(area("spec-enemies")),
        boss: val("spec-boss") || null,
      },
      levels: levelsList,
      provenance: spec.provenance,
    };
    if (genre === "other") out.genre_detail = val("spec-genre-detail") || "unspecified";
    return out;
  };

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    handlers.onSave(collect());
  });
  raw.querySelector("#spec-raw-apply")!.addEventListener("click", () => {
    try {
      handlers.onSave(JSON.parse(rawArea.value) as GameSpec);
    } catch (err) {
      markFieldError(container, "$raw", String(err));
    }
  });

  container.append(form);
}

const FIELD_IDS: Record<string, string> = {
  title: "spec-title",
  genre: "spec-genre",
  genre_detail: "spec-genre-detail",
  overview: "spec-overview",
  "mechanics.movement": "spec-movement",
  "mechanics.combat": "spec-combat",
  "mechanics.objectives": "spec-objectives",
  "mechanics.interactions": "spec-interactions",
  "characters.player": "spec-player",
  "characters.enemies": "spec-enemies",
  "characters.boss": "spec-boss",
  levels: "spec-levels",
};

/** Surface a SchemaViolation next to the offending form field. */
export function markFieldError(container: HTMLElement, fieldPath: string, message: string): void {
  container.querySelectorAll(".field-error").forEach((n) => n.remove());
  const root = fieldPath.split(".").slice(0, 2).join(".").replace(/\[\d+\]/g, "");
  const id = FIELD_IDS[root] ?? FIELD_IDS[root.split(".")[0]];
  const note = el("p", { class: "field-error", role: "alert" }, `${fieldPath}: ${message}`);
  const target = id ? container.querySelector(`#${id}`) : null;
  if (target && target.parentElement) {
    target.parentElement.append(note);
  } else {
    container.prepend(note);
  }
}

// --- plan panel ------------------------------------------------------------------

export interface PlanHandlers {
  onToggle: (scriptId: string, selected: boolean) => void;
}

export function renderPlan(
  container: HTMLElement,
  plan: Plan,
  cascade: string[],
  handlers: PlanHandlers,
): void {
  container.replaceChildren();
  const effective = new Set(plan.effective_selected);
  const cascadeSet = new Set(cascade);
  const byId = new Map(plan.requirements.map((r) => [r.script_id, r]));

  const list = el("ul", { class: "plan-list" });
  for (const { scriptId, depth } of dependencyOutline(plan)) {
    const req = byId.get(scriptId) as Requirement;
    const checkbox = el("input", {
      type: "checkbox",
      id: `sel-${scriptId}`,
      "data-script": scriptId,
    }) as HTMLInputElement;
    checkbox.checked = effective.has(scriptId);
    checkbox.addEventListener("change", () => handlers.onToggle(scriptId, checkbox.checked));

    const deps = plan.edges.filter(([f]) => f === scriptId).map(([, t]) => byId.get(t)?.class_name ?? t);
    const meta = el(
      "span",
      { class: "req-meta" },
      `${req.category}` + (deps.length ? ` — depends on ${deps.join(", ")}` : ""),
    );

    const item = el(
      "li",
      { class: "plan-item", "data-depth": String(depth), "data-script": scriptId },
      checkbox,
      el("label", { for: `sel-${scriptId}`, class: "req-name" }, req.class_name),
      meta,
      el("span", { class: "req-rationale", title: req.rationale }, req.rationale),
    );
    (item.style as CSSStyleDeclaration).marginLeft = `${depth * 1.5}rem`;

    if (cascadeSet.has(scriptId)) {
      item.append(el("span", { class: "cascade-badge", role: "status" }, "cascade deselected"));
    }
    if (!effective.has(scriptId) && req.selected && !cascadeSet.has(scriptId)) {
      item.append(el("span", { class: "blocked-badge" }, "blocked by deselected dependency"));
    }
    list.append(item);
  }

  container.append(
    el("p", { class: "order-preview" }, "Generation order: " +
      plan.generation_order.map((sid) => byId.get(sid)?.class_name ?? sid).join(" → ")),
    list,
  );
}

// --- generation progress -------------------------------------------------------------

export function renderProgress(
  container: HTMLElement,
  fraction: number,
  badges: ScriptBadge[],
): void {
  container.replaceChildren();
  const generated = badges.filter((b) => b.status === "generated").length;
  const selected = badges.filter((b) => b.status !== "deselected").length;
  const bar = el("div", { class: "progress-bar", role: "progressbar", "aria-valuenow": String(Math.round(fraction * 100)) });
  const fill = el("div", { class: "progress-fill" });
  (fill.style as CSSStyleDeclaration).width = `${Math.round(fraction * 100)}%`;
  bar.append(fill);

  const list = el("ul", { class: "badge-list" });
  for (const badge of badges) {
    list.append(
      el(
        "li",
        { class: `script-badge status-${badge.status}`, "data-script": badge.scriptId },
        el("span", { class: "badge-name" }, badge.className),
        el("span", { class: "badge-status" }, badge.status === "skipped" ? badge.note : badge.status),
      ),
    );
  }
  container.append(
    el("p", { class: "progress-text" }, `${generated}/${selected} scripts generated`),
    bar,
    list,
  );
}

// --- code viewer + findings ----------------------------------------------------------

export function renderScriptList(
  container: HTMLElement,
  result: ScriptsResult,
  onOpen: (scriptId: string) => void,
): void {
  container.replaceChildren();
  const list = el("ul", { class: "script-list" });
  for (const s of result.scripts) {
    const btn = el("button", { type: "button", "data-script": s.script_id }, s.file_name);
    btn.addEventListener("click", () => onOpen(s.script_id));
    list.append(el("li", {}, btn));
  }
  container.append(list);
}

export function renderCode(
  container: HTMLElement,
  source: string,
  findings: Finding[],
): void {
  container.replaceChildren();
  const code = el("div", { class: "code-view" });
  code.innerHTML = highlightWithLines(source);

  const findingList = el("ul", { class: "finding-list" });
  for (const f of findings) {
    const link = el(
      "a",
      { href: `#`, class: `finding severity-${f.severity}`, "data-line": String(f.line) },
      `${f.severity} ${f.code} (line ${f.line}): ${f.message}`,
    );
    link.addEventListener("click", (ev) => {
      ev.preventDefault();
      const target = code.querySelector(`[data-line="${f.line}"]`);
      if (target && typeof target.scrollIntoView === "function") {
        target.scrollIntoView({ block: "center" });
      }
      target?.classList.add("flash");
    });
    findingList.append(el("li", {}, link));
  }
  container.append(code, findings.length ? findingList : el("p", {}, "No findings."));
}

export function renderReports(container: HTMLElement, reports: Reports): void {
  container.replaceChildren();
  const table = el("table", { class: "report-table" });
  table.append(
    el(
      "tr",
      {},
      ...["Script", "OK", "Compilation*", "Adherence*", "BestPractices*", "Modularity*"].map((h) =>
        el("th", {}, h),
      ),
    ),
  );
  for (const r of reports.per_script) {
    table.append(
      el(
        "tr",
        {},
        el("td", {}, r.script_id),
        el("td", {}, r.structural_ok ? "yes" : "NO"),
        ...["compilation", "adherence", "best_practices", "modularity"].map((c) =>
          el("td", {}, r.proxy_scores[c].toFixed(1)),
        ),
      ),
    );
  }
  container.append(
    table,
    el("p", { class: "proxy-note" }, "* automated proxy scores (heuristic), not human rubric scores"),
  );
}

export function renderDocs(container: HTMLElement, docs: ScriptDoc[]): void {
  container.replaceChildren();
  for (const doc of docs) {
    const body = el("div", { class: "doc-body" });
    body.innerHTML = renderMarkdown(doc.markdown);
    container.append(el("details", { class: "doc-entry", "data-script": doc.script_id },
      el("summary", {}, doc.class_name), body));
  }
}
