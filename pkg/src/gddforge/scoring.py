"""Automated proxy metrics for the four review criteria.

These are heuristics computed from token-level structure — labeled
"automated proxy" everywhere and kept strictly apart from human rubric
scores. Weights and thresholds live in a bundled data file and can be
overridden.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .analyze import ScriptPlan
from .csharp import ClassSummary, Finding, check_structure, summarize_class, tokenize
from .errors import StructureTooBroken
from .gamespec import GameSpec, resolve_field_path
from .generate import GeneratedScript
from .util import load_data_file

CRITERIA = ("compilation", "adherence", "best_practices", "modularity")

_UPDATE_METHODS = frozenset(["Update", "FixedUpdate", "LateUpdate"])
_WORD_RE = re.compile(r"[A-Z][a-z0-9]*|[a-z0-9]+")


@dataclass(frozen=True)
class ValidationReport:
    script_id: str
    structural_ok: bool
    findings: tuple[Finding, ...]
    proxy_scores: dict[str, float]
    metrics: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "script_id": self.script_id,
            "structural_ok": self.structural_ok,
            "findings": [f.to_dict() for f in self.findings],
            "proxy_scores": dict(self.proxy_scores),
            "metrics": dict(self.metrics),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        return cls(
            script_id=d["script_id"],
            structural_ok=d["structural_ok"],
            findings=tuple(Finding(**f) for f in d["findings"]),
            proxy_scores=dict(d["proxy_scores"]),
            metrics=dict(d["metrics"]),
        )


def _clamp(x: float) -> float:
    return max(0.0, min(5.0, x))


def compilation_score(findings: list[Finding], weights: dict) -> float:
    """5 * (1 - capped weighted error mass); adding an error never raises it."""
    table = weights["compilation"]["error_weights"]
    mass = 0.0
    for f in findings:
        if f.severity == "error":
            mass += table.get(f.code, table["default"])
    return _clamp(5.0 * (1.0 - min(1.0, mass)))


def _keywords_for(spec: GameSpec, plan: ScriptPlan, script_id: str, weights: dict) -> set[str]:
    adher = weights["adherence"]
    stop = set(adher["stopwords"])
    min_len = adher["min_keyword_length"]

    req = plan.requirement(script_id)
    words: set[str] = set()
    value = resolve_field_path(spec, req.field_path) if req.field_path else None
    if value:
        texts: list[str] = []
        stack = [value]
        while stack:
            v = stack.pop()
            if isinstance(v, str):
                texts.append(v)
            elif isinstance(v, (list, tuple)):
                stack.extend(v)
            elif isinstance(v, dict):
                stack.extend(x for x in v.values() if x)
        for t in texts:
            words.update(w.lower() for w in _WORD_RE.findall(t))
    if not words:
        # baseline scripts: fall back to the class name and category
        words.update(w.lower() for w in _WORD_RE.findall(req.class_name))
        words.update(w.lower() for w in req.category.split("_"))
    return {w for w in words if len(w) >= min_len and w not in stop}


def adherence_score(source: str, keywords: set[str]) -> tuple[float, int, int]:
    """Coverage of spec keywords in identifiers and comments: 5 * matched/total."""
    if not keywords:
        return 5.0, 0, 0
    ident_words: set[str] = set()
    comment_text: list[str] = []
    for tok in tokenize(source):
        if tok.kind == "identifier":
            ident_words.update(w.lower() for w in _WORD_RE.findall(tok.text))
        elif tok.kind == "comment":
            comment_text.append(tok.text.lower())
    haystack = " ".join(comment_text)
    matched = sum(1 for kw in keywords if kw in ident_words or kw in haystack)
    return _clamp(5.0 * matched / len(keywords)), matched, len(keywords)


def best_practices_check(
    summaries: list[ClassSummary], category: str, weights: dict
) -> tuple[float, list[Finding]]:
    cfg = weights["best_practices"]
    findings: list[Finding] = []
    applicable = 0.0
    passed = 0.0

    mono = cfg["monobehaviour_base"]
    if category in mono["categories"]:
        applicable += mono["weight"]
        if summaries and any(s.is_monobehaviour() for s in summaries):
            passed += mono["weight"]
        else:
            findings.append(
                Finding("warning", "NoMonoBehaviourBase", 1, f"{category} script should derive from MonoBehaviour")
            )

    gc = cfg["no_getcomponent_in_update"]
    applicable += gc["weight"]
    offenders = [
        m
        for s in summaries
        for m in s.methods
        if m.name in _UPDATE_METHODS and "GetComponent" in m.body_identifiers
    ]
    if offenders:
        for m in offenders:
            findings.append(
                Finding(
                    "warning",
                    "GetComponentInUpdate",
                    m.decl_line,
                    f"GetComponent called inside {m.name}; cache the reference in Awake/Start",
                )
            )
    else:
        passed += gc["weight"]

    ser = cfg["serialized_tuning_fields"]
    applicable += ser["weight"]
    if any(s.serialized_fields for s in summaries):
        passed += ser["weight"]
    else:
        findings.append(
            Finding("info", "NoSerializedFields", 1, "no serialized tuning fields exposed to the inspector")
        )

    inp = cfg["input_handling"]
    if category in inp["categories"]:
        applicable += inp["weight"]
        has_input = any(
            "Input" in ident or ident.startswith("On")
            for s in summaries
            for ident in s.identifiers
        )
        if has_input:
            passed += inp["weight"]
        else:
            findings.append(
                Finding("warning", "NoInputHandling", 1, "movement script reads no player input")
            )

    score = _clamp(5.0 * passed / applicable) if applicable else 5.0
    return score, findings


def modularity_check(summaries: list[ClassSummary], weights: dict) -> tuple[float, list[Finding], dict]:
    cfg = weights["modularity"]
    findings: list[Finding] = []
    total_w = 0.0
    passed_w = 0.0
    metrics: dict[str, float] = {}

    mpc = cfg["methods_per_class"]
    total_w += mpc["weight"]
    method_count = len(summaries[0].methods) if summaries else 0
    metrics["method_count"] = method_count
    if mpc["min"] <= method_count <= mpc["max"]:
        passed_w += mpc["weight"]
    elif method_count < mpc["min"]:
        findings.append(
            Finding("info", "TooFewMethods", 1, f"{method_count} methods; under {mpc['min']} suggests a god-method design")
        )
    else:
        findings.append(
            Finding("info", "TooManyMethods", 1, f"{method_count} methods; over {mpc['max']} suggests splitting the class")
        )

    mml = cfg["max_method_lines"]
    total_w += mml["weight"]
    longest = 0
    longest_name = ""
    for s in summaries:
        for name, lines in s.method_lines.items():
            if lines > longest:
                longest, longest_name = lines, name
    metrics["max_method_lines"] = longest
    if longest <= mml["limit"]:
        passed_w += mml["weight"]
    else:
        findings.append(
            Finding("info", "MethodTooLong", 1, f"{longest_name} spans {longest} lines (limit {mml['limit']})")
        )

    scf = cfg["single_class_per_file"]
    total_w += scf["weight"]
    metrics["class_count"] = len(summaries)
    if len(summaries) == 1:
        passed_w += scf["weight"]
    else:
        findings.append(
            Finding("warning", "MultipleClassesInFile", 1, f"{len(summaries)} top-level classes in one file")
        )

    return _clamp(5.0 * passed_w / total_w), findings, metrics


def score_script(
    script: GeneratedScript,
    spec: GameSpec,
    plan: ScriptPlan,
    weights: dict | None = None,
) -> ValidationReport:
    """Full validation of one generated script: structure plus the four proxies."""
    weights = weights or load_data_file("proxy_weights.json")
    req = plan.requirement(script.script_id)

    findings = list(check_structure(script.source))
    try:
        summaries = summarize_class(script.source)
    except StructureTooBroken:
        summaries = []

    comp = compilation_score(findings, weights)
    keywords = _keywords_for(spec, plan, script.script_id, weights)
    adher, matched, total = adherence_score(script.source, keywords)
    best, bp_findings = best_practices_check(summaries, req.category, weights)
    findings.extend(bp_findings)
    if summaries:
        modular, mod_findings, mod_metrics = modularity_check(summaries, weights)
        findings.extend(mod_findings)
    else:
        modular, mod_metrics = 0.0, {"method_count": 0, "max_method_lines": 0, "class_count": 0}

    error_count = sum(1 for f in findings if f.severity == "error")
    metrics = {
        "error_findings": error_count,
        "warning_findings": sum(1 for f in findings if f.severity == "warning"),
        "keyword_total": total,
        "keyword_matched": matched,
        "serialized_field_count": sum(len(s.serialized_fields) for s in summaries),
        "line_total": script.source.count("\n") + 1,
        **mod_metrics,
    }

    return ValidationReport(
        script_id=script.script_id,
        structural_ok=error_count == 0,
        findings=tuple(findings),
        proxy_scores={
            "compilation": comp,
            "adherence": adher,
            "best_practices": best,
            "modularity": modular,
        },
        metrics=metrics,
    )


def score_proxies(
    scripts: list[GeneratedScript],
    spec: GameSpec,
    plan: ScriptPlan,
    weights_path=None,
) -> tuple[list[ValidationReport], ValidationReport]:
    """Per-script reports plus a plan-level aggregate (mean of each proxy)."""
    weights = load_data_file("proxy_weights.json", weights_path)
    reports = [score_script(s, spec, plan, weights) for s in scripts]

    agg = {c: 0.0 for c in CRITERIA}
    for r in reports:
        for c in CRITERIA:
            agg[c] += r.proxy_scores[c]
    n = len(reports) or 1
    plan_report = ValidationReport(
        script_id="__plan__",
        structural_ok=all(r.structural_ok for r in reports),
        findings=(),
        proxy_scores={c: round(agg[c] / n, 3) for c in CRITERIA},
        metrics={
            "scripts_validated": len(reports),
            "scripts_structural_ok": sum(1 for r in reports if r.structural_ok),
        },
    )
    return reports, plan_report
