"""GameSpec: the standardized structured form of a game design document.

Holds the schema-validated domain types, the heuristic extractor that fills
them from a sectioned document, an optional LLM-assisted extraction path with
a single schema-repair retry, and the JSONL training-pair exporter.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

import jsonschema

from .errors import ParseError, SchemaViolation
from .ingest import Section, SectionedDocument
from .util import canonical_json, digest_of, load_data_file

log = logging.getLogger(__name__)

GENRES = ("platformer", "action_rpg", "puzzle", "other")

_BULLET_RE = re.compile(r"^\s*(?:[-*+]|\d+[.)])\s+(.*\S)\s*$")
_GENRE_LINE_RE = re.compile(r"\bgenre\s*[:\-]\s*(.+)", re.IGNORECASE)
_ARTICLE_RE = re.compile(r"^(?:a|an|the)\s+", re.IGNORECASE)
_TITLE_SUFFIX_RE = re.compile(r"\s*[-—:]\s*(?:game design document|gdd|design document)\s*$", re.IGNORECASE)

FILE_DELIMITER = "// ──── FILE: {name} ────"


# --- domain types ----------------------------------------------------------

@dataclass(frozen=True)
class MechanicSet:
    movement: tuple[str, ...] = ()
    combat: tuple[str, ...] = ()
    objectives: tuple[str, ...] = ()
    interactions: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "movement": list(self.movement),
            "combat": list(self.combat),
            "objectives": list(self.objectives),
            "interactions": list(self.interactions),
        }


@dataclass(frozen=True)
class CharacterSet:
    player: str | None = None
    enemies: tuple[str, ...] = ()
    boss: str | None = None

    def to_dict(self) -> dict:
        return {"player": self.player, "enemies": list(self.enemies), "boss": self.boss}


@dataclass(frozen=True)
class LevelSpec:
    name: str
    environment_theme: str = ""
    description: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "environment_theme": self.environment_theme,
            "description": self.description,
        }


@dataclass(frozen=True)
class GameSpec:
    title: str
    genre: str
    overview: str = ""
    genre_detail: str = ""
    mechanics: MechanicSet = field(default_factory=MechanicSet)
    characters: CharacterSet = field(default_factory=CharacterSet)
    levels: tuple[LevelSpec, ...] = ()
    provenance: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        d = {
            "title": self.title,
            "genre": self.genre,
            "overview": self.overview,
            "mechanics": self.mechanics.to_dict(),
            "characters": self.characters.to_dict(),
            "levels": [lv.to_dict() for lv in self.levels],
            "provenance": dict(self.provenance),
        }
        if self.genre == "other" or self.genre_detail:
            d["genre_detail"] = self.genre_detail or "unspecified"
        return d

    def to_json(self) -> str:
        """Canonical serialization; equal specs serialize bitwise-equal."""
        return canonical_json(self.to_dict())

    def digest(self) -> str:
        return digest_of(self.to_dict())

    def provenance_for(self, field_path: str) -> str | None:
        return dict(self.provenance).get(field_path)


def resolve_field_path(spec: GameSpec, path: str):
    """Resolve a dotted field path like ``mechanics.movement`` to its value.

    Returns None when the path does not exist.
    """
    obj: object = spec.to_dict()
    for part in path.split("."):
        if isinstance(obj, dict) and part in obj:
            obj = obj[part]
        else:
            return None
    return obj


# --- schema validation ------------------------------------------------------

_SCHEMA = None
_VALIDATOR = None


def gamespec_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = load_data_file("gamespec.schema.json")
    return _SCHEMA


def _validator() -> jsonschema.Validator:
    global _VALIDATOR
    if _VALIDATOR is None:
        _VALIDATOR = jsonschema.Draft202012Validator(gamespec_schema())
    return _VALIDATOR


def _json_path(error: jsonschema.ValidationError) -> str:
    parts = []
    for p in error.absolute_path:
        if isinstance(p, int):
            if parts:
                parts[-1] += f"[{p}]"
            else:
                parts.append(f"[{p}]")
        else:
            parts.append(str(p))
    path = ".".join(parts)
    if not path and error.validator == "required":
        # surface the missing property as the offending path
        m = re.search(r"'([^']+)' is a required property", error.message)
        if m:
            return m.group(1)
    return path or "$"


def validate_spec(json_text: str) -> GameSpec:
    """Parse and validate GameSpec JSON; raises on any schema or invariant breach."""
    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return spec_from_dict(data)


def spec_from_dict(data) -> GameSpec:
    errors = sorted(_validator().iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        raise SchemaViolation(first.message, field_path=_json_path(first))

    mech = data["mechanics"]
    for key in ("movement", "combat", "objectives", "interactions"):
        for i, phrase in enumerate(mech[key]):
            if phrase != phrase.strip():
                raise SchemaViolation(
                    f"phrase not trimmed: {phrase!r}", field_path=f"mechanics.{key}[{i}]"
                )

    chars = data.get("characters", {})
    enemies = list(chars.get("enemies", []))
    folded = [e.casefold().strip() for e in enemies]
    if len(set(folded)) != len(folded):
        raise SchemaViolation("enemies not distinct after case-folding", field_path="characters.enemies")

    genre = data["genre"]
    return GameSpec(
        title=data["title"],
        genre=genre,
        genre_detail=data.get("genre_detail", "unspecified" if genre == "other" else ""),
        overview=data.get("overview", ""),
        mechanics=MechanicSet(
            movement=tuple(mech["movement"]),
            combat=tuple(mech["combat"]),
            objectives=tuple(mech["objectives"]),
            interactions=tuple(mech["interactions"]),
        ),
        characters=CharacterSet(
            player=chars.get("player"),
            enemies=tuple(enemies),
            boss=chars.get("boss"),
        ),
        levels=tuple(
            LevelSpec(lv["name"], lv.get("environment_theme", ""), lv.get("description", ""))
            for lv in data["levels"]
        ),
        provenance=tuple(sorted(data.get("provenance", {}).items())),
    )


# --- heuristic extraction ---------------------------------------------------

def _load_lexicon(override=None) -> dict:
    return load_data_file("heading_lexicon.json", override)


def _match_field(heading: str, lexicon: dict) -> str | None:
    low = heading.lower()
    for fld in lexicon["precedence"]:
        for kw in lexicon["fields"][fld]:
            if re.search(rf"\b{re.escape(kw)}\b", low):
                return fld
    return None


def _bullets(body: str) -> list[str]:
    out = []
    for line in body.split("\n"):
        m = _BULLET_RE.match(line)
        if m:
            out.append(re.sub(r"\s+", " ", m.group(1)).rstrip("."))
    return out


def _sentence_phrases(body: str, cap: int = 12) -> list[str]:
    """Leading phrase of each sentence: articles stripped, cut at 6 words."""
    phrases = []
    text = re.sub(r"\s+", " ", body).strip()
    for sentence in re.split(r"(?<=[.!?])\s+|\n", text):
        sentence = _ARTICLE_RE.sub("", sentence.strip())
        sentence = re.split(r"[,;:.!?]", sentence)[0]
        words = sentence.split()
        if len(words) >= 1 and len(sentence) >= 3:
            phrases.append(" ".join(words[:6]))
        if len(phrases) >= cap:
            break
    return phrases


def _phrases(section: Section) -> list[str]:
    return _bullets(section.body)[:12] or _sentence_phrases(section.body)


def _normalize_genre(raw: str, lexicon: dict) -> tuple[str, str]:
    low = raw.strip().lower()
    if not low:
        return "other", "unspecified"
    for genre, keys in lexicon["genre_normalization"].items():
        for kw in keys:
            if kw in low:
                return genre, ""
    return "other", raw.strip()


def _extract_characters(sections: list[Section]) -> tuple[CharacterSet, dict[str, str]]:
    player = None
    boss = None
    enemies: list[str] = []
    prov: dict[str, str] = {}

    def add_enemy(text: str, heading: str):
        t = re.sub(r"\s+", " ", text).strip().rstrip(".")
        if t and t.casefold() not in {e.casefold() for e in enemies}:
            enemies.append(t)
            prov.setdefault("characters.enemies", heading)

    for sec in sections:
        low = sec.heading.lower()
        bullets = _bullets(sec.body)
        if re.search(r"\bboss(es)?\b", low):
            cand = bullets[0] if bullets else sec.body.strip().split("\n")[0].strip()
            if cand and boss is None:
                boss = cand.rstrip(".")
                prov["characters.boss"] = sec.heading
            continue
        if re.search(r"\benem(y|ies)\b|\bcreatures\b", low):
            for b in bullets:
                add_enemy(b, sec.heading)
            continue
        if re.search(r"\bplayer\b", low):
            cand = bullets[0] if bullets else sec.body.strip().split("\n")[0].strip()
            if cand and player is None:
                player = cand.rstrip(".")
                prov["characters.player"] = sec.heading
            continue
        # generic character section: look for prefixed bullets
        for b in bullets:
            m = re.match(r"(player|boss|enemy|enemies)\s*[:\-]\s*(.+)", b, re.IGNORECASE)
            if not m:
                continue
            kind, rest = m.group(1).lower(), m.group(2).strip()
            if kind == "player" and player is None:
                player = rest
                prov["characters.player"] = sec.heading
            elif kind == "boss" and boss is None:
                boss = rest
                prov["characters.boss"] = sec.heading
            else:
                for part in re.split(r",\s*", rest):
                    add_enemy(part, sec.heading)

    return CharacterSet(player=player, enemies=tuple(enemies), boss=boss), prov


def _extract_levels(sections: list[Section]) -> tuple[tuple[LevelSpec, ...], dict[str, str]]:
    levels: list[LevelSpec] = []
    prov: dict[str, str] = {}
    for sec in sections:
        bullets = _bullets(sec.body)
        if bullets:
            for b in bullets:
                parts = re.split(r"\s+[-—–]\s+|\s*:\s+", b, maxsplit=1)
                name = parts[0].strip()
                rest = parts[1].strip() if len(parts) > 1 else ""
                if name:
                    levels.append(LevelSpec(name=name, environment_theme=rest, description=rest))
        elif sec.body.strip():
            levels.append(
                LevelSpec(
                    name=sec.heading,
                    environment_theme="",
                    description=re.sub(r"\s+", " ", sec.body.strip())[:200],
                )
            )
        if sec.body.strip():
            prov.setdefault("levels", sec.heading)
    return tuple(levels), prov


def extract_spec(
    doc: SectionedDocument,
    mode: str = "heuristic",
    *,
    backend_cfg=None,
    lexicon_path=None,
    strict: bool = False,
) -> GameSpec:
    """Fill a GameSpec from a sectioned document.

    ``heuristic`` matches section headings against the keyword lexicon and
    pulls phrase lists from matched sections. ``llm_assisted`` asks the
    generation backend for schema-conforming JSON (one repair retry), falling
    back to the heuristic result unless ``strict`` is set.
    """
    if not doc.sections:
        raise ParseError("document has no sections")
    if mode == "heuristic":
        return _extract_heuristic(doc, lexicon_path)
    if mode == "llm_assisted":
        return _extract_llm(doc, backend_cfg, lexicon_path, strict)
    raise ParseError(f"unknown extraction mode {mode!r}")


def _extract_heuristic(doc: SectionedDocument, lexicon_path=None) -> GameSpec:
    lexicon = _load_lexicon(lexicon_path)
    by_field: dict[str, list[Section]] = {}
    for sec in doc.sections:
        fld = _match_field(sec.heading, lexicon)
        if fld:
            by_field.setdefault(fld, []).append(sec)

    prov: dict[str, str] = {}

    # title: first heading that is not a content-field heading
    title = ""
    for sec in doc.sections:
        if sec.heading == "DOCUMENT":
            continue
        if _match_field(sec.heading, lexicon) is None:
            title = _TITLE_SUFFIX_RE.sub("", sec.heading).strip()
            if title:
                prov["title"] = sec.heading
            break
    if not title:
        title = doc.source_name or "Untitled Game"

    # genre: dedicated section, else a "Genre: X" line anywhere
    genre, genre_detail = "other", "unspecified"
    for sec in by_field.get("genre", []):
        m = _GENRE_LINE_RE.search(sec.heading) or _GENRE_LINE_RE.search(sec.body)
        raw = m.group(1) if m else sec.body.strip()
        raw = raw.strip().split("\n")[0]
        if raw:
            genre, genre_detail = _normalize_genre(raw, lexicon)
            prov["genre"] = sec.heading
            break
    if "genre" not in prov:
        for sec in doc.sections:
            m = _GENRE_LINE_RE.search(sec.body)
            if m:
                genre, genre_detail = _normalize_genre(m.group(1).split("\n")[0], lexicon)
                prov["genre"] = sec.heading
                break

    overview = ""
    for sec in by_field.get("overview", []):
        body = re.sub(r"\s+", " ", sec.body).strip()
        if body:
            overview = body
            prov["overview"] = sec.heading
            break

    mech_lists: dict[str, tuple[str, ...]] = {}
    for fld in ("movement", "combat", "objectives", "interactions"):
        phrases: list[str] = []
        for sec in by_field.get(fld, []):
            got = _phrases(sec)
            if got:
                phrases.extend(p for p in got if p not in phrases)
                prov.setdefault(f"mechanics.{fld}", sec.heading)
        mech_lists[fld] = tuple(phrases)

    characters, char_prov = _extract_characters(by_field.get("characters", []))
    prov.update(char_prov)

    levels, lvl_prov = _extract_levels(by_field.get("levels", []))
    prov.update(lvl_prov)

    return GameSpec(
        title=title,
        genre=genre,
        genre_detail=genre_detail if genre == "other" else "",
        overview=overview,
        mechanics=MechanicSet(**mech_lists),
        characters=characters,
        levels=levels,
        provenance=tuple(sorted(prov.items())),
    )


def _document_text(doc: SectionedDocument) -> str:
    parts = []
    for sec in doc.sections:
        parts.append(f"{'#' * sec.level} {sec.heading}\n{sec.body.strip()}\n")
    return "\n".join(parts)


def _extract_llm(doc: SectionedDocument, backend_cfg, lexicon_path, strict: bool) -> GameSpec:
    from .backend import call_backend  # late import: backend pulls no spec types
    from .generate import PromptBundle

    if backend_cfg is None:
        raise ParseError("llm_assisted extraction requires a backend config")

    schema_text = canonical_json(gamespec_schema())
    base_prompt = (
        "Extract the game specification from the design document below.\n"
        "Respond with a single JSON object conforming exactly to this JSON schema "
        "(no prose, no code fences):\n"
        f"{schema_text}\n\n--- DOCUMENT ---\n{_document_text(doc)}"
    )

    def attempt(user_text: str) -> GameSpec:
        bundle = PromptBundle.for_spec_extraction(user_text)
        raw = call_backend(backend_cfg, bundle)
        cleaned = _strip_fences(raw)
        return validate_spec(cleaned)

    try:
        return attempt(base_prompt)
    except (ParseError, SchemaViolation) as first_err:
        log.warning("llm extraction failed validation (%s); retrying once", first_err)
        repair = (
            base_prompt
            + "\n\nYour previous answer failed validation: "
            + str(first_err)
            + (f" (at {first_err.field_path})" if isinstance(first_err, SchemaViolation) else "")
            + "\nReturn corrected JSON only."
        )
        try:
            return attempt(repair)
        except (ParseError, SchemaViolation) as second_err:
            if strict:
                if isinstance(second_err, SchemaViolation):
                    raise
                raise SchemaViolation(str(second_err)) from second_err
            log.warning("llm extraction failed twice (%s); falling back to heuristic", second_err)
            return _extract_heuristic(doc, lexicon_path)


def _strip_fences(text: str) -> str:
    m = re.search(r"```(?:json)?\s*\n(.*?)```", text, re.DOTALL)
    return m.group(1) if m else text


# --- training-pair export ----------------------------------------------------

def render_spec_text(spec: GameSpec) -> str:
    """Human-readable rendering of a GameSpec, used in prompts and exports."""
    lines = [f"Title: {spec.title}"]
    genre = spec.genre if spec.genre != "other" else f"other ({spec.genre_detail})"
    lines.append(f"Genre: {genre}")
    if spec.overview:
        lines.append(f"Overview: {spec.overview}")
    mech = spec.mechanics
    for label, items in (
        ("Movement", mech.movement),
        ("Combat", mech.combat),
        ("Objectives", mech.objectives),
        ("Interactions", mech.interactions),
    ):
        if items:
            lines.append(f"{label}: " + "; ".join(items))
    if spec.characters.player:
        lines.append(f"Player: {spec.characters.player}")
    if spec.characters.enemies:
        lines.append("Enemies: " + "; ".join(spec.characters.enemies))
    if spec.characters.boss:
        lines.append(f"Boss: {spec.characters.boss}")
    for lv in spec.levels:
        desc = f" — {lv.environment_theme}" if lv.environment_theme else ""
        lines.append(f"Level: {lv.name}{desc}")
    return "\n".join(lines)


def export_training_pair(spec: GameSpec, scripts, out_path=None) -> str:
    """Render one JSONL prompt/response record from a spec and its scripts.

    Returns the record as a single JSON line; appends it to ``out_path``
    (plus newline) when given. ``scripts`` must be non-empty.
    """
    scripts = list(scripts)
    if not scripts:
        raise ParseError("export requires at least one generated script")
    response_parts = []
    for s in scripts:
        response_parts.append(FILE_DELIMITER.format(name=s.file_name))
        response_parts.append(s.source.rstrip("\n"))
    record = {
        "prompt": render_spec_text(spec),
        "response": "\n".join(response_parts) + "\n",
    }
    line = json.dumps(record, ensure_ascii=False)
    if out_path is not None:
        with open(out_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
    return line
