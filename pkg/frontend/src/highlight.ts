// Minimal C# syntax highlighter: returns HTML with span-wrapped tokens.
// Deliberately regex-free of catastrophic backtracking; handles the subset
// the generator emits (comments, strings, keywords, numbers, attributes).

const KEYWORDS = new Set(
  (
    "abstract as base bool break byte case catch char checked class const continue " +
    "decimal default delegate do double else enum event explicit extern false finally " +
    "fixed float for foreach goto if implicit in int interface internal is lock long " +
    "namespace new null object operator out override params private protected public " +
    "readonly ref return sbyte sealed short sizeof stackalloc static string struct " +
    "switch this throw true try typeof uint ulong unchecked unsafe ushort using var " +
    "virtual void volatile while yield async await partial get set where"
  ).split(" "),
);

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function span(cls: string, text: string): string {
  return `<span class="hl-${cls}">${escapeHtml(text)}</span>`;
}

export function highlightCSharp(source: string): string {
  let out = "";
  let i = 0;
  const n = source.length;

  while (i < n) {
    const c = source[i];

    if (source.startsWith("//", i)) {
      let end = source.indexOf("\n", i);
      if (end === -1) end = n;
      out += span("comment", source.slice(i, end));
      i = end;
      continue;
    }
    if (source.startsWith("/*", i)) {
      let end = source.indexOf("*/", i + 2);
      end = end === -1 ? n : end + 2;
      out += span("comment", source.slice(i, end));
      i = end;
      continue;
    }
    if (c === '"' || source.startsWith('@"', i) || source.startsWith('$"', i)) {
      const start = i;
      if (c !== '"') i += 1; // prefix
      i += 1; // opening quote
      const verbatim = source[start] === "@";
      while (i < n) {
        if (!verbatim && source[i] === "\\") {
          i += 2;
          continue;
        }
        if (source[i] === '"') {
          if (verbatim && source[i + 1] === '"') {
            i += 2;
            continue;
          }
          i += 1;
          break;
        }
        if (!verbatim && source[i] === "\n") break;
        i += 1;
      }
      out += span("string", source.slice(start, i));
      continue;
    }
    if (c === "[" && /[A-Za-z_]/.test(source[i + 1] ?? "")) {
      const close = source.indexOf("]", i);
      const line = source.indexOf("\n", i);
      if (close !== -1 && (line === -1 || close < line)) {
        out += span("attribute", source.slice(i, close + 1));
        i = close + 1;
        continue;
      }
    }
    if (/[A-Za-z_]/.test(c)) {
      let j = i + 1;
      while (j < n && /[A-Za-z0-9_]/.test(source[j])) j += 1;
      const word = source.slice(i, j);
      out += KEYWORDS.has(word) ? span("keyword", word) : escapeHtml(word);
      i = j;
      continue;
    }
    if (/[0-9]/.test(c)) {
      let j = i + 1;
      while (j < n && /[0-9A-Za-z_.]/.test(source[j])) j += 1;
      out += span("number", source.slice(i, j));
      i = j;
      continue;
    }
    out += escapeHtml(c);
    i += 1;
  }
  return out;
}

/** Highlighted source with line numbers, lines wrapped for anchor targeting. */
export function highlightWithLines(source: string): string {
  const lines = highlightCSharp(source).split("\n");
  return lines
    .map(
      (html, idx) =>
        `<div class="code-line" data-line="${idx + 1}"><span class="line-no">${idx + 1}</span>${html || "&nbsp;"}</div>`,
    )
    .join("");
}
