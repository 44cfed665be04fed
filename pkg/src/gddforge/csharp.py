"""Lightweight C# structural analysis: tokenizer, structure checks, class summaries.

Deliberately not a grammar. Generated templates use a narrow language subset,
so a total token-stream scanner beats a real parser here: it must never fail,
on any input, and must reconstruct its input exactly (each token carries the
whitespace that preceded it; a zero-width tail token holds trailing space).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import StructureTooBroken

KEYWORDS = frozenset(
    """abstract as base bool break byte case catch char checked class const continue
    decimal default delegate do double else enum event explicit extern false finally
    fixed float for foreach goto if implicit in int interface internal is lock long
    namespace new null object operator out override params private protected public
    readonly ref return sbyte sealed short sizeof stackalloc static string struct
    switch this throw true try typeof uint ulong unchecked unsafe ushort using var
    virtual void volatile while yield async await partial where get set""".split()
)

UNITY_MESSAGES = frozenset(
    [
        "Awake",
        "Start",
        "Update",
        "FixedUpdate",
        "LateUpdate",
        "OnEnable",
        "OnDisable",
        "OnDestroy",
        "OnCollisionEnter",
        "OnTriggerEnter",
    ]
)

MODIFIERS = frozenset(
    """public private protected internal static virtual override sealed abstract
    async new readonly partial extern unsafe const event""".split()
)

_MULTI_OPS = (
    "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "??", "?.", "::", "<<", ">>",
)

_ATTRIBUTE_PREV = frozenset("{};,(")
_MAX_ATTRIBUTE_SPAN = 2000
_FENCE_RE = re.compile(r"^\s*```")


@dataclass(frozen=True)
class CSharpToken:
    kind: str  # identifier|keyword|string_lit|char_lit|number|comment|punct|attribute
    text: str
    line: int
    pre: str = ""  # whitespace between the previous token and this one


@dataclass(frozen=True)
class Finding:
    severity: str  # error|warning|info
    code: str
    line: int
    message: str

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code, "line": self.line, "message": self.message}


def reconstruct(tokens: list[CSharpToken]) -> str:
    return "".join(t.pre + t.text for t in tokens)


def tokenize(source: str) -> list[CSharpToken]:
    """Total tokenizer: any input yields tokens that reconstruct it exactly."""
    tokens, _ = _tokenize_ex(source)
    return tokens


def _tokenize_ex(source: str) -> tuple[list[CSharpToken], list[tuple[str, int, bool]]]:
    """Returns (tokens, diagnostics); diagnostics are (code, line, reaches_eof)."""
    tokens: list[CSharpToken] = []
    diags: list[tuple[str, int, bool]] = []
    i = 0
    n = len(source)
    line = 1
    ws_start = 0
    prev_sig: CSharpToken | None = None

    while i < n:
        c = source[i]
        if c.isspace():
            if c == "\n":
                line += 1
            i += 1
            continue
        pre = source[ws_start:i]
        tok_line = line
        kind, end = _scan_token(source, i, tok_line, diags, prev_sig)
        text = source[i:end]
        line += text.count("\n")
        token = CSharpToken(kind, text, tok_line, pre)
        tokens.append(token)
        if text and kind != "comment":
            prev_sig = token
        i = end
        ws_start = i

    if ws_start < n:
        tokens.append(CSharpToken("punct", "", line, source[ws_start:n]))
    return tokens, diags


def _scan_token(source, i, line, diags, prev) -> tuple[str, int]:
    n = len(source)
    c = source[i]

    if source.startswith("//", i):
        end = source.find("\n", i)
        return "comment", n if end == -1 else end
    if source.startswith("/*", i):
        end = source.find("*/", i + 2)
        if end == -1:
            diags.append(("unterminated_comment", line, True))
            return "comment", n
        return "comment", end + 2

    # string prefixes: "  @"  $"  @$"  $@"
    for prefix in ('@$"', '$@"', '@"', '$"', '"'):
        if source.startswith(prefix, i):
            verbatim = "@" in prefix
            return _scan_string(source, i, i + len(prefix), verbatim, line, diags)

    if c == "'":
        end = _scan_char(source, i)
        if end is not None:
            return "char_lit", end
        return "punct", i + 1

    if c == "@" and i + 1 < n and (source[i + 1].isalpha() or source[i + 1] == "_"):
        return "identifier", _scan_word(source, i + 1)

    if c.isalpha() or c == "_":
        end = _scan_word(source, i)
        return ("keyword" if source[i:end] in KEYWORDS else "identifier"), end

    if c.isdigit():
        j = i + 1
        while j < n and (source[j].isalnum() or source[j] in "._"):
            j += 1
        return "number", j

    if c == "[":
        allowed = prev is None or prev.kind == "attribute" or (
            prev.kind == "punct" and prev.text in _ATTRIBUTE_PREV
        )
        if allowed:
            end = _scan_attribute(source, i)
            if end is not None:
                return "attribute", end

    for op in _MULTI_OPS:
        if source.startswith(op, i):
            return "punct", i + len(op)

    return "punct", i + 1


def _scan_word(source, i) -> int:
    n = len(source)
    j = i + 1
    while j < n and (source[j].isalnum() or source[j] == "_"):
        j += 1
    return j


def _scan_string(source, i, body_start, verbatim, line, diags) -> tuple[str, int]:
    n = len(source)
    j = body_start
    while j < n:
        c = source[j]
        if verbatim:
            if c == '"':
                if j + 1 < n and source[j + 1] == '"':
                    j += 2
                    continue
                return "string_lit", j + 1
            j += 1
        else:
            if c == "\\" and j + 1 < n:
                j += 2
                continue
            if c == '"':
                return "string_lit", j + 1
            if c == "\n":
                diags.append(("unterminated_string", line, False))
                return "string_lit", j
            j += 1
    diags.append(("unterminated_string", line, True))
    return "string_lit", n


def _scan_char(source, i) -> int | None:
    n = len(source)
    j = i + 1
    content = 0
    while j < n and content <= 10:
        c = source[j]
        if c == "\n":
            return None
        if c == "\\" and j + 1 < n:
            j += 2
            content += 2
            continue
        if c == "'":
            return j + 1 if content > 0 else None
        j += 1
        content += 1
    return None


def _scan_attribute(source, i) -> int | None:
    """Span of a [...] attribute group, string-aware; None when not attribute-shaped."""
    n = len(source)
    j = i + 1
    while j < n and source[j] in " \t":
        j += 1
    if j >= n or not (source[j].isalpha() or source[j] in "_@"):
        return None
    depth = 1
    while j < n and j - i <= _MAX_ATTRIBUTE_SPAN:
        c = source[j]
        if c == '"':
            k = j + 1
            while k < n:
                if source[k] == "\\" and k + 1 < n:
                    k += 2
                    continue
                if source[k] == '"' or source[k] == "\n":
                    break
                k += 1
            if k >= n or source[k] == "\n":
                return None
            j = k + 1
            continue
        if c == "'":
            end = _scan_char(source, j)
            if end is None:
                return None
            j = end
            continue
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
            if depth == 0:
                return j + 1
        j += 1
    return None


# --- structure checks -------------------------------------------------------


def check_structure(source: str) -> list[Finding]:
    """Structural error findings; a total function over arbitrary text."""
    tokens, diags = _tokenize_ex(source)
    findings: list[Finding] = []
    eof_truncated = False

    for code, line, reaches_eof in diags:
        if code == "unterminated_string":
            findings.append(Finding("error", "UnterminatedString", line, "string literal never closes"))
        else:
            findings.append(Finding("error", "UnterminatedComment", line, "block comment never closes"))
        eof_truncated = eof_truncated or reaches_eof

    for lineno, text in enumerate(source.split("\n"), start=1):
        if _FENCE_RE.match(text):
            findings.append(
                Finding("error", "MarkdownFenceArtifact", lineno, "markdown code fence left in source")
            )

    sig = [t for t in tokens if t.text and t.kind != "comment"]

    for open_c, close_c, code, label in (
        ("{", "}", "UnbalancedBraces", "braces"),
        ("(", ")", "UnbalancedParens", "parentheses"),
        ("[", "]", "UnbalancedBrackets", "brackets"),
    ):
        depth = 0
        bad_line = None
        last_line = 1
        for t in sig:
            if t.kind != "punct":
                continue
            last_line = t.line
            if t.text == open_c:
                depth += 1
            elif t.text == close_c:
                depth -= 1
                if depth < 0 and bad_line is None:
                    bad_line = t.line
        if bad_line is not None:
            findings.append(Finding("error", code, bad_line, f"extra closing {label}"))
        elif depth != 0:
            findings.append(Finding("error", code, last_line, f"{depth} unclosed {label}"))
            if open_c == "{":
                eof_truncated = True

    class_names: list[tuple[str, int]] = []
    for idx, t in enumerate(sig):
        if t.kind == "keyword" and t.text == "class" and idx + 1 < len(sig):
            nxt = sig[idx + 1]
            if nxt.kind == "identifier":
                class_names.append((nxt.text, nxt.line))
    if not class_names:
        findings.append(Finding("error", "NoClassDeclared", 1, "no class declaration found"))
    seen: set[str] = set()
    for name, line in class_names:
        if name in seen:
            findings.append(Finding("error", "DuplicateClass", line, f"duplicate class name {name}"))
        seen.add(name)

    findings.extend(_top_level_statements(sig))

    if eof_truncated:
        findings.append(
            Finding("error", "TruncatedFile", source.count("\n") + 1, "file appears cut off mid-structure")
        )
    return findings


_TOP_LEVEL_OK = frozenset(["using", "namespace", "extern", "delegate"])


def _top_level_statements(sig: list[CSharpToken]) -> list[Finding]:
    findings = []
    depth = 0
    chunk: list[CSharpToken] = []
    for t in sig:
        if t.kind == "punct" and t.text in "{}":
            depth += 1 if t.text == "{" else -1
            chunk = []
            continue
        if depth > 0:
            continue
        if t.kind == "punct" and t.text == ";":
            if chunk and not any(c.kind == "keyword" and c.text in _TOP_LEVEL_OK for c in chunk):
                findings.append(
                    Finding("error", "StatementOutsideType", t.line, "statement outside any type declaration")
                )
            chunk = []
        else:
            chunk.append(t)
    return findings


# --- class summaries ----------------------------------------------------------


@dataclass(frozen=True)
class MethodInfo:
    name: str
    parameter_count: int
    return_type_text: str
    is_public: bool
    body_lines: int
    body_identifiers: frozenset[str] = frozenset()
    decl_line: int = 0


@dataclass(frozen=True)
class FieldInfo:
    name: str
    type_text: str
    exposure: str  # public | serialize_field_attribute


@dataclass(frozen=True)
class ClassSummary:
    class_name: str
    base_types: tuple[str, ...]
    methods: tuple[MethodInfo, ...]
    serialized_fields: tuple[FieldInfo, ...]
    line_total: int
    identifiers: frozenset[str] = frozenset()

    @property
    def public_methods(self) -> list[tuple[str, int, str]]:
        return [(m.name, m.parameter_count, m.return_type_text) for m in self.methods if m.is_public]

    @property
    def unity_messages(self) -> frozenset[str]:
        return frozenset(m.name for m in self.methods) & UNITY_MESSAGES

    @property
    def method_lines(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for m in self.methods:
            out[m.name] = max(out.get(m.name, 0), m.body_lines)
        return out

    def is_monobehaviour(self) -> bool:
        return any(b.split(".")[-1] == "MonoBehaviour" for b in self.base_types)


def _matching_brace(sig: list[CSharpToken], open_idx: int) -> int:
    depth = 0
    for k in range(open_idx, len(sig)):
        t = sig[k]
        if t.kind == "punct":
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth == 0:
                    return k
    return len(sig) - 1


def _skip_generics(sig: list[CSharpToken], j: int) -> int:
    if j < len(sig) and sig[j].kind == "punct" and sig[j].text == "<":
        depth = 0
        while j < len(sig):
            if sig[j].text == "<":
                depth += 1
            elif sig[j].text == ">":
                depth -= 1
                if depth == 0:
                    return j + 1
            j += 1
    return j


def summarize_class(source: str) -> list[ClassSummary]:
    """Extract per-class summaries by token scanning. Raises StructureTooBroken
    when brace balance is off (spans would be meaningless)."""
    tokens, _ = _tokenize_ex(source)
    sig = [t for t in tokens if t.text and t.kind != "comment"]

    depth = 0
    for t in sig:
        if t.kind == "punct":
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth < 0:
                    raise StructureTooBroken("extra closing brace")
    if depth != 0:
        raise StructureTooBroken("unbalanced braces")

    total_lines = source.count("\n") + 1
    summaries: list[ClassSummary] = []
    i = 0
    while i < len(sig):
        t = sig[i]
        if t.kind == "keyword" and t.text == "class" and i + 1 < len(sig) and sig[i + 1].kind == "identifier":
            name = sig[i + 1].text
            j = _skip_generics(sig, i + 2)
            base_types: list[str] = []
            if j < len(sig) and sig[j].kind == "punct" and sig[j].text == ":":
                j += 1
                parts: list[str] = []
                while j < len(sig) and sig[j].text not in ("{", "where"):
                    tok = sig[j]
                    if tok.kind == "punct" and tok.text == ",":
                        if parts:
                            base_types.append("".join(parts))
                        parts = []
                        j += 1
                    elif tok.kind == "punct" and tok.text == "<":
                        j = _skip_generics(sig, j)
                    elif tok.kind in ("identifier", "keyword") or (tok.kind == "punct" and tok.text == "."):
                        parts.append(tok.text)
                        j += 1
                    else:
                        j += 1
                if parts:
                    base_types.append("".join(parts))
            while j < len(sig) and sig[j].text != "{":
                j += 1
            if j >= len(sig):
                break
            body_end = _matching_brace(sig, j)
            methods, fields = _scan_members(sig, j + 1, body_end, name)
            idents = frozenset(
                tok.text for tok in sig[j + 1 : body_end] if tok.kind == "identifier"
            )
            summaries.append(
                ClassSummary(
                    class_name=name,
                    base_types=tuple(base_types),
                    methods=tuple(methods),
                    serialized_fields=tuple(fields),
                    line_total=total_lines,
                    identifiers=idents,
                )
            )
            i = body_end + 1
        else:
            i += 1
    return summaries


_NESTED_TYPES = frozenset(["enum", "struct", "interface", "class"])


def _scan_members(sig, start, end, class_name) -> tuple[list[MethodInfo], list[FieldInfo]]:
    methods: list[MethodInfo] = []
    fields: list[FieldInfo] = []
    pending_attrs: list[str] = []
    k = start
    while k < end:
        tok = sig[k]
        if tok.kind == "attribute":
            pending_attrs.append(tok.text)
            k += 1
            continue
        if tok.kind == "punct" and tok.text == ";":
            k += 1
            continue

        # collect one member declaration up to ; { or => at paren depth 0
        member: list[CSharpToken] = []
        paren = 0
        m = k
        terminator = None
        while m < end:
            t = sig[m]
            if t.kind == "punct":
                if t.text == "(":
                    paren += 1
                elif t.text == ")":
                    paren -= 1
                elif paren == 0 and t.text in (";", "{", "=>"):
                    terminator = t
                    break
            member.append(t)
            m += 1
        if terminator is None:
            break

        texts = [t.text for t in member]
        if any(t.kind == "keyword" and t.text in _NESTED_TYPES for t in member):
            # nested type: skip its whole body
            if terminator.text == "{":
                m = _matching_brace(sig, m)
            k = m + 1
            pending_attrs = []
            continue

        paren_idx = next((x for x, t in enumerate(member) if t.text == "(" and t.kind == "punct"), None)
        eq_idx = next((x for x, t in enumerate(member) if t.text == "=" and t.kind == "punct"), None)
        is_method = (
            paren_idx is not None
            and paren_idx > 0
            and member[paren_idx - 1].kind == "identifier"
            and (eq_idx is None or eq_idx > paren_idx)
        )

        if is_method:
            name = member[paren_idx - 1].text
            close_rel = _close_paren(member, paren_idx)
            inner = member[paren_idx + 1 : close_rel]
            if inner:
                commas = sum(1 for t in inner if t.kind == "punct" and t.text == ",")
                param_count = commas + 1
            else:
                param_count = 0
            mods = []
            type_parts = []
            for t in member[: paren_idx - 1]:
                if t.kind == "keyword" and t.text in MODIFIERS:
                    mods.append(t.text)
                else:
                    type_parts.append(t.text)
            return_type = _join_type(type_parts)
            if terminator.text == "{":
                close = _matching_brace(sig, m)
                body_lines = sig[close].line - member[0].line + 1
                body_idents = frozenset(
                    t.text for t in sig[m : close + 1] if t.kind == "identifier"
                )
                k = close + 1
            else:  # => expression body or ; (abstract/interface)
                close = m
                while close < end and not (sig[close].kind == "punct" and sig[close].text == ";"):
                    close += 1
                body_lines = sig[min(close, end - 1)].line - member[0].line + 1
                body_idents = frozenset(
                    t.text for t in sig[m : close + 1] if t.kind == "identifier"
                )
                k = close + 1
            methods.append(
                MethodInfo(
                    name=name,
                    parameter_count=param_count,
                    return_type_text=return_type,
                    is_public="public" in mods,
                    body_lines=body_lines,
                    body_identifiers=body_idents,
                    decl_line=member[0].line,
                )
            )
        elif terminator.text == "{":
            # property or similar braced member: skip body
            k = _matching_brace(sig, m) + 1
        elif terminator.text == "=>":
            # expression-bodied property / field lambda: skip to ;
            close = m
            while close < end and not (sig[close].kind == "punct" and sig[close].text == ";"):
                close += 1
            k = close + 1
        else:  # ';' — field declaration
            name_idx = (eq_idx - 1) if eq_idx is not None else (len(member) - 1)
            if 0 <= name_idx < len(member) and member[name_idx].kind == "identifier":
                fname = member[name_idx].text
                mods = [t.text for t in member[:name_idx] if t.kind == "keyword" and t.text in MODIFIERS]
                type_parts = [
                    t.text
                    for t in member[:name_idx]
                    if not (t.kind == "keyword" and t.text in MODIFIERS)
                ]
                exposure = None
                if "static" in mods or "const" in mods or "event" in mods:
                    exposure = None
                elif "public" in mods:
                    exposure = "public"
                elif any("SerializeField" in a for a in pending_attrs):
                    exposure = "serialize_field_attribute"
                if exposure:
                    fields.append(FieldInfo(fname, _join_type(type_parts), exposure))
            k = m + 1
        pending_attrs = []
    return methods, fields


def _close_paren(member: list[CSharpToken], open_idx: int) -> int:
    depth = 0
    for x in range(open_idx, len(member)):
        if member[x].kind == "punct":
            if member[x].text == "(":
                depth += 1
            elif member[x].text == ")":
                depth -= 1
                if depth == 0:
                    return x
    return len(member)


def _join_type(parts: list[str]) -> str:
    out = ""
    for p in parts:
        if out and p not in ".<>[],?" and not out.endswith((".", "<", "[")):
            out += " "
        out += p
    return out


def public_surface_summary(summary: ClassSummary) -> str:
    """One-paragraph rendering of a class's public surface for prompt context."""
    bits = [f"class {summary.class_name}"]
    if summary.base_types:
        bits.append(": " + ", ".join(summary.base_types))
    lines = ["".join(bits)]
    for name, count, rtype in summary.public_methods:
        rt = rtype or "ctor"
        lines.append(f"  public {rt} {name}({count} parameter{'s' if count != 1 else ''})")
    for f in summary.serialized_fields:
        marker = "[SerializeField]" if f.exposure == "serialize_field_attribute" else "public"
        lines.append(f"  {marker} {f.type_text} {f.name}")
    return "\n".join(lines)
