"""Document ingestion: load a GDD, normalize it, split it into titled sections.

txt/md inputs are decoded in-process; pdf/docx are routed through an external
converter command (``cmd <file>`` writing UTF-8 text to stdout) so conversion
quality stays out of the pipeline's hair.
"""

from __future__ import annotations

import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    ConverterUnavailable,
    EmptyDocument,
    EncodingError,
    UnsupportedFormat,
)
from .util import sha256_hex

SUPPORTED_FORMATS = ("txt", "md", "pdf", "docx")
CONVERTER_FORMATS = ("pdf", "docx")

_ATX_RE = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")
_NUMBERED_RE = re.compile(r"^\d+[.)]\s")

#: plain-text heading heuristic bounds
MAX_HEADING_LEN = 60


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    origin: str  # "file" | "upload"
    format: str  # txt | md | pdf | docx
    raw_bytes_digest: str
    text: str
    char_count: int
    source_name: str = "document"

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "origin": self.origin,
            "format": self.format,
            "raw_bytes_digest": self.raw_bytes_digest,
            "text": self.text,
            "char_count": self.char_count,
            "source_name": self.source_name,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SourceDocument":
        return cls(**d)


@dataclass(frozen=True)
class Section:
    heading: str
    level: int
    body: str
    char_span: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "heading": self.heading,
            "level": self.level,
            "body": self.body,
            "char_span": list(self.char_span),
        }


@dataclass(frozen=True)
class SectionedDocument:
    doc_id: str
    sections: tuple[Section, ...]
    source_name: str = "document"

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "source_name": self.source_name,
            "sections": [s.to_dict() for s in self.sections],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SectionedDocument":
        sections = tuple(
            Section(s["heading"], s["level"], s["body"], tuple(s["char_span"]))
            for s in d["sections"]
        )
        return cls(doc_id=d["doc_id"], sections=sections, source_name=d.get("source_name", "document"))


def normalize_text(text: str) -> str:
    """CRLF/CR to LF; strip a UTF-8 BOM if present."""
    if text.startswith("﻿"):
        text = text[1:]
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _decode(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc


def _run_converter(cmd: str, path: Path) -> str:
    argv = shlex.split(cmd) + [str(path)]
    try:
        proc = subprocess.run(argv, capture_output=True, timeout=120)
    except FileNotFoundError as exc:
        raise ConverterUnavailable(f"converter command not found: {argv[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise ConverterUnavailable(f"converter timed out: {cmd}") from exc
    if proc.returncode != 0:
        raise ConverterUnavailable(
            f"converter exited {proc.returncode}",
            stderr=proc.stderr.decode("utf-8", "replace")[:500],
        )
    return _decode(proc.stdout)


def load_document(
    path_or_bytes: str | Path | bytes,
    declared_format: str,
    *,
    converters: dict[str, str] | None = None,
    origin: str | None = None,
    source_name: str | None = None,
) -> SourceDocument:
    """Load and normalize one document.

    ``converters`` maps format -> external command for pdf/docx extraction.
    Accepts a filesystem path or raw bytes (an upload).
    """
    fmt = (declared_format or "").lower().lstrip(".")
    if fmt not in SUPPORTED_FORMATS:
        raise UnsupportedFormat(f"format {declared_format!r} not in {SUPPORTED_FORMATS}")

    if isinstance(path_or_bytes, (str, Path)):
        path = Path(path_or_bytes)
        raw = path.read_bytes()
        origin = origin or "file"
        source_name = source_name or path.stem
    else:
        raw = bytes(path_or_bytes)
        path = None
        origin = origin or "upload"
        source_name = source_name or "document"

    if not raw:
        raise EmptyDocument("input is empty")

    if fmt in CONVERTER_FORMATS:
        cmd = (converters or {}).get(fmt)
        if not cmd:
            raise ConverterUnavailable(f"no converter configured for {fmt}")
        if path is None:
            with tempfile.NamedTemporaryFile(suffix=f".{fmt}", delete=False) as tf:
                tf.write(raw)
                tmp = Path(tf.name)
            try:
                text = _run_converter(cmd, tmp)
            finally:
                tmp.unlink(missing_ok=True)
        else:
            text = _run_converter(cmd, path)
    else:
        text = _decode(raw)

    text = normalize_text(text)
    if not text.strip():
        raise EmptyDocument("document contains no non-whitespace text")

    return SourceDocument(
        doc_id="doc-" + sha256_hex(raw)[:16],
        origin=origin,
        format=fmt,
        raw_bytes_digest=sha256_hex(raw),
        text=text,
        char_count=len(text),
        source_name=source_name,
    )


def _is_plain_heading(line: str, prev_blank: bool) -> bool:
    stripped = line.strip()
    if not prev_blank or not stripped or len(stripped) > MAX_HEADING_LEN:
        return False
    if stripped.endswith("."):
        return False
    first = stripped[0]
    if not (first.isalpha() or first.isdigit()):
        return False
    if _NUMBERED_RE.match(stripped):
        return False
    letters = [c for c in stripped if c.isalpha()]
    if not letters:
        return False
    if all(not c.islower() for c in letters):
        return True  # ALL CAPS
    words = [w for w in stripped.split() if any(c.isalpha() for c in w)]
    return bool(words) and all(w[0].isupper() for w in words)  # Title Case


def segment_sections(doc: SourceDocument) -> SectionedDocument:
    """Split normalized text into sections on markdown and plain-text headings.

    Text above the first heading (or a document with no headings at all)
    lands in a level-1 section titled "DOCUMENT". Section spans tile the
    whole text.
    """
    text = doc.text
    lines = text.split("\n")

    # (offset, heading_text, level, heading_line_len)
    marks: list[tuple[int, str, int]] = []
    offset = 0
    prev_blank = True
    for line in lines:
        m = _ATX_RE.match(line)
        if m:
            marks.append((offset, m.group(2).strip() or "DOCUMENT", len(m.group(1))))
        elif _is_plain_heading(line, prev_blank):
            marks.append((offset, line.strip(), 1))
        prev_blank = line.strip() == ""
        offset += len(line) + 1  # account for the LF

    # headings with no following non-blank content are not headings
    def has_body_after(start: int) -> bool:
        nl = text.find("\n", start)
        return nl != -1 and text[nl:].strip() != ""

    marks = [m for m in marks if has_body_after(m[0])] or []

    sections: list[Section] = []
    if not marks:
        return SectionedDocument(
            doc_id=doc.doc_id,
            sections=(Section("DOCUMENT", 1, text, (0, len(text))),),
            source_name=doc.source_name,
        )

    # (span_start, heading_offset, heading, level); span may absorb leading
    # whitespace so that spans tile [0, len(text))
    spans = [(off, off, heading, level) for off, heading, level in marks]
    if spans[0][0] > 0:
        pre = text[: spans[0][0]]
        if pre.strip():
            sections.append(Section("DOCUMENT", 1, pre, (0, spans[0][0])))
        else:
            spans[0] = (0, spans[0][1], spans[0][2], spans[0][3])

    for i, (start, head_off, heading, level) in enumerate(spans):
        end = spans[i + 1][0] if i + 1 < len(spans) else len(text)
        line_end = text.find("\n", head_off)
        if line_end == -1 or line_end >= end:
            body = ""
        else:
            body = text[line_end + 1 : end]
        sections.append(Section(heading, level, body, (start, end)))

    return SectionedDocument(doc_id=doc.doc_id, sections=tuple(sections), source_name=doc.source_name)
