"""Script analysis: map a GameSpec to required scripts plus a dependency DAG.

The mapping lives in a declarative rule table (bundled JSON, overridable), so
what triggers which script stays testable and tunable without code changes.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, replace

from .errors import CycleDetected, UnknownScript
from .gamespec import GameSpec
from .util import digest_of, load_data_file

CATEGORIES = (
    "movement",
    "combat",
    "inventory",
    "environment_interaction",
    "character_controller",
    "camera",
    "game_management",
    "enemy_ai",
    "ui",
)


@dataclass(frozen=True)
class ScriptRequirement:
    script_id: str
    class_name: str
    category: str
    rationale: str
    field_path: str = ""
    selected: bool = True

    def to_dict(self) -> dict:
        return {
            "script_id": self.script_id,
            "class_name": self.class_name,
            "category": self.category,
            "rationale": self.rationale,
            "field_path": self.field_path,
            "selected": self.selected,
        }


@dataclass(frozen=True)
class ScriptPlan:
    spec_digest: str
    requirements: tuple[ScriptRequirement, ...]
    edges: tuple[tuple[str, str], ...]  # (from, to): from depends on to
    generation_order: tuple[str, ...]

    def requirement(self, script_id: str) -> ScriptRequirement:
        for r in self.requirements:
            if r.script_id == script_id:
                return r
        raise UnknownScript(f"no script {script_id!r} in plan")

    def class_of(self, script_id: str) -> str:
        return self.requirement(script_id).class_name

    def dependencies_of(self, script_id: str) -> tuple[str, ...]:
        return tuple(t for f, t in self.edges if f == script_id)

    def dependents_of(self, script_id: str) -> tuple[str, ...]:
        return tuple(f for f, t in self.edges if t == script_id)

    def transitive_dependents(self, script_id: str) -> set[str]:
        out: set[str] = set()
        frontier = [script_id]
        while frontier:
            node = frontier.pop()
            for dep in self.dependents_of(node):
                if dep not in out:
                    out.add(dep)
                    frontier.append(dep)
        return out

    def effective_selected(self) -> set[str]:
        """Selection closed under depends-on: a script counts only when its
        whole dependency chain is selected too. Computed as a shrinking
        fixpoint so pathological (cyclic) edge sets cannot hang it."""
        effective = {r.script_id for r in self.requirements if r.selected}
        deps = {r.script_id: self.dependencies_of(r.script_id) for r in self.requirements}
        changed = True
        while changed:
            changed = False
            for sid in sorted(effective):
                if any(d not in effective for d in deps[sid]):
                    effective.discard(sid)
                    changed = True
        return effective

    def to_dict(self) -> dict:
        return {
            "spec_digest": self.spec_digest,
            "requirements": [r.to_dict() for r in self.requirements],
            "edges": [list(e) for e in self.edges],
            "generation_order": list(self.generation_order),
        }

    def digest(self) -> str:
        return digest_of(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ScriptPlan":
        return cls(
            spec_digest=d["spec_digest"],
            requirements=tuple(
                ScriptRequirement(
                    script_id=r["script_id"],
                    class_name=r["class_name"],
                    category=r["category"],
                    rationale=r["rationale"],
                    field_path=r.get("field_path", ""),
                    selected=r.get("selected", True),
                )
                for r in d["requirements"]
            ),
            edges=tuple((f, t) for f, t in d["edges"]),
            generation_order=tuple(d["generation_order"]),
        )


def _snake(name: str) -> str:
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", "_", name).lower()


def _pascal(text: str) -> str:
    words = re.findall(r"[A-Za-z0-9]+", text)
    return "".join(w[:1].upper() + w[1:].lower() for w in words)


def _excerpt(value, limit: int = 80) -> str:
    if isinstance(value, (list, tuple)):
        text = "; ".join(str(v) for v in value)
    elif isinstance(value, dict):
        text = "; ".join(str(v) for v in value.values() if v)
    else:
        text = str(value)
    text = re.sub(r"\s+", " ", text).strip()
    return text[:limit]


def toposort(plan: ScriptPlan, restrict: set[str] | None = None) -> list[str]:
    """Topological order of the plan DAG (dependencies first), restricted to
    ``restrict`` (default: the effectively selected set). Ties are broken by
    lexicographic class name.
    """
    nodes = restrict if restrict is not None else plan.effective_selected()
    class_of = {r.script_id: r.class_name for r in plan.requirements}
    deps: dict[str, set[str]] = {n: set() for n in nodes}
    dependents: dict[str, list[str]] = {n: [] for n in nodes}
    for f, t in plan.edges:
        if f in nodes and t in nodes:
            deps[f].add(t)
            dependents[t].append(f)

    ready = [(class_of[n], n) for n in nodes if not deps[n]]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        _, node = heapq.heappop(ready)
        order.append(node)
        for d in dependents[node]:
            deps[d].discard(node)
            if not deps[d]:
                heapq.heappush(ready, (class_of[d], d))

    if len(order) != len(nodes):
        raise CycleDetected("dependency cycle detected", cycle=_find_cycle(plan, nodes - set(order)))
    return order


def _find_cycle(plan: ScriptPlan, candidates: set[str]) -> list[str]:
    deps = {n: [t for f, t in plan.edges if f == n and t in candidates] for n in candidates}
    seen: set[str] = set()
    for start in sorted(candidates):
        path: list[str] = []
        on_path: set[str] = set()

        def dfs(node: str) -> list[str] | None:
            if node in on_path:
                return path[path.index(node):] + [node]
            if node in seen:
                return None
            seen.add(node)
            on_path.add(node)
            path.append(node)
            for nxt in deps[node]:
                found = dfs(nxt)
                if found:
                    return found
            path.pop()
            on_path.discard(node)
            return None

        cycle = dfs(start)
        if cycle:
            return cycle
    return sorted(candidates)


def _resolve_depends(entries, present: dict[str, str], enemy_ids: list[str]) -> list[str]:
    """Resolve rule-table depends_on entries to script_ids that exist."""
    out: list[str] = []
    for entry in entries:
        if isinstance(entry, dict) and "first_of" in entry:
            for cand in entry["first_of"]:
                if cand == "__enemy__":
                    if enemy_ids:
                        out.append(enemy_ids[0])
                        break
                elif cand in present:
                    out.append(present[cand])
                    break
        elif isinstance(entry, str) and entry in present:
            out.append(present[entry])
    return out


def analyze(spec: GameSpec, rule_table_path=None) -> ScriptPlan:
    """Derive the script plan for a spec by applying the rule table.

    Always includes GameManager, CameraController and UIManager; deterministic
    for equal specs.
    """
    table = load_data_file("rule_table.json", rule_table_path)

    mech = spec.mechanics
    field_values = {
        "mechanics.movement": mech.movement,
        "mechanics.combat": mech.combat,
        "mechanics.objectives": mech.objectives,
        "mechanics.interactions": mech.interactions,
        "characters.enemies": spec.characters.enemies,
        "characters.boss": spec.characters.boss,
        "characters.player": spec.characters.player,
        "levels": tuple(lv.name for lv in spec.levels),
        "title": spec.title,
    }

    pending: list[dict] = []  # {class_name, category, rationale, field_path, depends_on}

    for rule in table["rules"]:
        trig = rule["trigger"]
        fp = trig["field_path"]
        keyword = trig.get("keyword")
        if keyword:
            pat = re.compile(keyword, re.IGNORECASE)
            matched_path = None
            if fp == "mechanics":
                for sub in ("movement", "combat", "objectives", "interactions"):
                    if any(pat.search(p) for p in getattr(mech, sub)):
                        matched_path = f"mechanics.{sub}"
                        break
            else:
                val = field_values.get(fp)
                if val and any(pat.search(str(p)) for p in (val if isinstance(val, tuple) else (val,))):
                    matched_path = fp
            if not matched_path:
                continue
            value = field_values[matched_path]
            pending.append(
                {
                    "class_name": rule["class_name"],
                    "category": rule["category"],
                    "field_path": matched_path,
                    "rationale": f"{matched_path} mentions {keyword!r}: {_excerpt(value)}",
                    "depends_on": rule["depends_on"],
                }
            )
        else:
            value = field_values.get(fp)
            if not value:
                continue
            pending.append(
                {
                    "class_name": rule["class_name"],
                    "category": rule["category"],
                    "field_path": fp,
                    "rationale": f"{fp}: {_excerpt(value)}",
                    "depends_on": rule["depends_on"],
                }
            )

    # enemy archetypes, capped; overflow merges back into one EnemyAI
    enemy_cfg = table["enemies"]
    enemies = list(spec.characters.enemies)
    enemy_classes: list[dict] = []
    if enemies:
        cap = enemy_cfg["max_archetypes"]
        merged = len(enemies) > cap
        if len(enemies) == 1 or merged and cap == 1:
            archetypes = [enemy_cfg["single_class_name"]]
        elif merged:
            archetypes = [_enemy_class(e) for e in enemies[: cap - 1]] + [enemy_cfg["single_class_name"]]
        else:
            archetypes = [_enemy_class(e) if len(enemies) > 1 else enemy_cfg["single_class_name"] for e in enemies]
        seen: set[str] = set()
        for cls in archetypes:
            if cls in seen:
                continue
            seen.add(cls)
            enemy_classes.append(
                {
                    "class_name": cls,
                    "category": enemy_cfg["category"],
                    "field_path": enemy_cfg["trigger_field"],
                    "rationale": f"{enemy_cfg['trigger_field']}: {_excerpt(enemies)}",
                    "depends_on": enemy_cfg["depends_on"],
                }
            )

    boss_cfg = table["boss"]
    boss_entry = None
    if spec.characters.boss:
        boss_entry = {
            "class_name": boss_cfg["class_name"],
            "category": boss_cfg["category"],
            "field_path": boss_cfg["trigger_field"],
            "rationale": f"{boss_cfg['trigger_field']}: {_excerpt(spec.characters.boss)}",
            "depends_on": boss_cfg["depends_on"],
        }

    always = [
        {
            "class_name": a["class_name"],
            "category": a["category"],
            "field_path": "",
            "rationale": f"baseline {a['category']} script included in every plan",
            "depends_on": a["depends_on"],
        }
        for a in table["always"]
    ]

    candidates = always + pending + enemy_classes + ([boss_entry] if boss_entry else [])

    # enforce the plan-size cap: merge enemy archetypes first, then drop tail
    max_req = table.get("max_requirements", 12)
    if len(candidates) > max_req and len(enemy_classes) > 1:
        merged_enemy = dict(enemy_classes[0])
        merged_enemy["class_name"] = enemy_cfg["single_class_name"]
        candidates = always + pending + [merged_enemy] + ([boss_entry] if boss_entry else [])
        enemy_classes = [merged_enemy]
    candidates = candidates[:max_req]

    # dedupe class names (custom tables could collide)
    by_class: dict[str, dict] = {}
    for c in candidates:
        by_class.setdefault(c["class_name"], c)
    candidates = list(by_class.values())

    present = {c["class_name"]: _snake(c["class_name"]) for c in candidates}
    enemy_ids = [_snake(e["class_name"]) for e in enemy_classes if e["class_name"] in by_class]

    requirements = tuple(
        ScriptRequirement(
            script_id=_snake(c["class_name"]),
            class_name=c["class_name"],
            category=c["category"],
            rationale=c["rationale"],
            field_path=c["field_path"],
        )
        for c in candidates
    )

    edges: list[tuple[str, str]] = []
    for c in candidates:
        src = _snake(c["class_name"])
        for dep_id in _resolve_depends(c["depends_on"], present, enemy_ids):
            if dep_id != src and (src, dep_id) not in edges:
                edges.append((src, dep_id))

    plan = ScriptPlan(
        spec_digest=spec.digest(),
        requirements=requirements,
        edges=tuple(sorted(edges)),
        generation_order=(),
    )
    toposort(plan, {r.script_id for r in requirements})  # acyclicity gate, raises on cycles
    return replace(plan, generation_order=tuple(toposort(plan)))


def _enemy_class(enemy_text: str) -> str:
    words = _pascal(enemy_text)
    return (words[:24] or "Enemy") + "AI"


def set_selection(plan: ScriptPlan, script_id: str, selected: bool) -> tuple[ScriptPlan, list[str]]:
    """Toggle one requirement's selection flag.

    Returns the updated plan and the cascade: scripts whose effective
    (dependency-closed) selection changed as a consequence, target excluded.
    Toggling the same script twice restores the original plan.
    """
    ids = {r.script_id for r in plan.requirements}
    if script_id not in ids:
        raise UnknownScript(f"no script {script_id!r} in plan")

    before = plan.effective_selected()
    new_reqs = tuple(
        replace(r, selected=selected) if r.script_id == script_id else r for r in plan.requirements
    )
    new_plan = replace(plan, requirements=new_reqs, generation_order=())
    after = new_plan.effective_selected()
    cascade = sorted((before ^ after) - {script_id})
    new_plan = replace(new_plan, generation_order=tuple(toposort(new_plan)))
    return new_plan, cascade
