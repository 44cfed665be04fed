"""Rubric score ingestion and aggregation.

Scores arrive as one integer 0-5 per (model, game type, evaluator, criterion).
Aggregation is two-level: criterion mean over the flat record pool, then the
overall average of the four criterion means, both rounded half-up to one
decimal. Exact arithmetic (Fraction -> Decimal) so 4.675 rounds to 4.7, not
whatever binary floats feel like.

Automated proxy scores ride in separate columns and are never blended into
the human numbers.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .errors import DuplicateRecord, IncompleteGrid, ParseError, ScoreRangeError

CRITERIA = ("compilation", "adherence", "best_practices", "modularity")
GAME_TYPES = ("platformer", "action_rpg", "puzzle")
CSV_HEADER = ["model", "game_type", "evaluator", "criterion", "score"]

TABLE_COLUMNS = [
    ("compilation", "Comp."),
    ("adherence", "Adher."),
    ("best_practices", "BestPrac."),
    ("modularity", "Modular."),
]


@dataclass(frozen=True)
class ScoreRecord:
    model: str
    game_type: str
    evaluator: str
    criterion: str
    score: int

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.model, self.game_type, self.evaluator, self.criterion)


@dataclass(frozen=True)
class EvaluationReport:
    per_model: dict  # model -> {"criterion_means": {criterion: float}, "overall": float}
    n_records: int
    proxy_columns: dict | None = None  # model -> {criterion: float}

    def to_dict(self) -> dict:
        d = {"per_model": self.per_model, "n_records": self.n_records}
        if self.proxy_columns:
            d["proxy_columns"] = self.proxy_columns
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        return cls(
            per_model=d["per_model"],
            n_records=d["n_records"],
            proxy_columns=d.get("proxy_columns"),
        )


def round1(value: Fraction | Decimal) -> Decimal:
    """Round half-up to one decimal, exactly."""
    with localcontext() as ctx:
        ctx.prec = 50
        if isinstance(value, Fraction):
            value = Decimal(value.numerator) / Decimal(value.denominator)
        return value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def _make_record(row: dict, where: str) -> ScoreRecord:
    for col in CSV_HEADER:
        if col not in row or row[col] in (None, ""):
            raise ParseError(f"{where}: missing column {col!r}")
    model = str(row["model"]).strip()
    game_type = str(row["game_type"]).strip()
    evaluator = str(row["evaluator"]).strip()
    criterion = str(row["criterion"]).strip()
    if game_type not in GAME_TYPES:
        raise ParseError(f"{where}: unknown game_type {game_type!r} (expected one of {GAME_TYPES})")
    if criterion not in CRITERIA:
        raise ParseError(f"{where}: unknown criterion {criterion!r} (expected one of {CRITERIA})")
    raw_score = row["score"]
    try:
        score = int(str(raw_score).strip())
        if str(raw_score).strip() != str(score):
            raise ValueError
    except (TypeError, ValueError):
        raise ScoreRangeError(f"{where}: score {raw_score!r} is not an integer 0-5") from None
    if not 0 <= score <= 5:
        raise ScoreRangeError(f"{where}: score {score} outside 0-5")
    return ScoreRecord(model, game_type, evaluator, criterion, score)


def ingest_scores(source: str | Path | bytes, fmt: str | None = None) -> list[ScoreRecord]:
    """Load and validate score records from CSV or JSON-lines content.

    ``source`` may be a path or raw content. Duplicate
    (model, game_type, evaluator, criterion) rows are rejected.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        if fmt is None:
            fmt = "jsonl" if path.suffix in (".jsonl", ".ndjson", ".json") else "csv"
    else:
        text = source.decode("utf-8") if isinstance(source, bytes) else source
        if fmt is None:
            fmt = "jsonl" if text.lstrip()[:1] == "{" else "csv"

    records: list[ScoreRecord] = []
    seen: set[tuple[str, str, str, str]] = set()

    def add(rec: ScoreRecord, where: str):
        if rec.key in seen:
            raise DuplicateRecord(f"{where}: duplicate record for {rec.key}")
        seen.add(rec.key)
        records.append(rec)

    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty scores file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(f"bad CSV header {header!r}; expected exactly {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise ParseError(f"row {lineno}: expected {len(CSV_HEADER)} columns, got {len(row)}")
            add(_make_record(dict(zip(CSV_HEADER, row)), f"row {lineno}"), f"row {lineno}")
    elif fmt == "jsonl":
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ParseError(f"line {lineno}: expected a JSON object")
            add(_make_record(obj, f"line {lineno}"), f"line {lineno}")
    else:
        raise ParseError(f"unknown scores format {fmt!r}")

    return records


def aggregate(records: list[ScoreRecord], proxy_columns: dict | None = None) -> EvaluationReport:
    """Two-level aggregation: flat per-criterion means, then their average.

    Every model must have at least one record for every criterion.
    """
    if not records:
        raise IncompleteGrid("no records to aggregate")

    pools: dict[str, dict[str, list[int]]] = {}
    for rec in records:
        pools.setdefault(rec.model, {}).setdefault(rec.criterion, []).append(rec.score)

    per_model: dict[str, dict] = {}
    for model in sorted(pools):
        means: dict[str, Decimal] = {}
        for criterion in CRITERIA:
            scores = pools[model].get(criterion)
            if not scores:
                raise IncompleteGrid(f"model {model!r} has no records for criterion {criterion!r}")
            means[criterion] = round1(Fraction(sum(scores), len(scores)))
        overall = round1(sum(means.values()) / Decimal(4))
        per_model[model] = {
            "criterion_means": {c: float(means[c]) for c in CRITERIA},
            "overall": float(overall),
        }

    return EvaluationReport(per_model=per_model, n_records=len(records), proxy_columns=proxy_columns)


def render_report(
    report: EvaluationReport,
    format: str = "table_text",
    model_order: list[str] | None = None,
) -> str:
    """Render a report as a text table, JSON, wide CSV, or radar-chart CSV."""
    models = model_order or list(report.per_model)
    unknown = [m for m in models if m not in report.per_model]
    if unknown:
        raise ParseError(f"model_order names absent models: {unknown}")

    if format == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True)

    if format == "csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["model", *CRITERIA, "overall"])
        for m in models:
            pm = report.per_model[m]
            w.writerow([m, *(pm["criterion_means"][c] for c in CRITERIA), pm["overall"]])
        return out.getvalue()

    if format == "radar_csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["model", *CRITERIA])
        for m in models:
            pm = report.per_model[m]
            w.writerow([m, *(pm["criterion_means"][c] for c in CRITERIA)])
        return out.getvalue()

    if format == "table_text":
        headers = ["Model", *(label for _, label in TABLE_COLUMNS), "Avg"]
        rows = []
        for m in models:
            pm = report.per_model[m]
            rows.append(
                [m]
                + [f"{pm['criterion_means'][c]:.1f}" for c, _ in TABLE_COLUMNS]
                + [f"{pm['overall']:.1f}"]
            )
        if report.proxy_columns:
            headers += [f"{label}*" for _, label in TABLE_COLUMNS]
            for m, row in zip(models, rows):
                proxies = report.proxy_columns.get(m, {})
                row += [
                    f"{proxies[c]:.1f}" if c in proxies else "-" for c, _ in TABLE_COLUMNS
                ]
        widths = [max(len(str(r[i])) for r in [headers, *rows]) for i in range(len(headers))]
        lines = [
            "  ".join(str(headers[i]).ljust(widths[i]) for i in range(len(headers))).rstrip(),
            "  ".join("-" * widths[i] for i in range(len(headers))).rstrip(),
        ]
        for r in rows:
            lines.append("  ".join(str(r[i]).ljust(widths[i]) for i in range(len(headers))).rstrip())
        if report.proxy_columns:
            lines.append("")
            lines.append("* automated proxy scores (heuristic), not human rubric scores")
        return "\n".join(lines) + "\n"

    raise ParseError(f"unknown report format {format!r}")
