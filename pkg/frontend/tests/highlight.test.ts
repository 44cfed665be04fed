import { describe, expect, it } from "vitest";

import { highlightCSharp, highlightWithLines } from "../src/highlight.js";
import { renderMarkdown } from "../src/markdown.js";

describe("highlightCSharp", () => {
  it("wraps keywords, strings, comments, numbers, attributes", () => {
    const html = highlightCSharp(
      '[SerializeField] private float speed = 4.5f; // tune me\nstring s = "hi";',
    );
    expect(html).toContain('<span class="hl-attribute">[SerializeField]</span>');
    expect(html).toContain('<span class="hl-keyword">private</span>');
    expect(html).toContain('<span class="hl-number">4.5f</span>');
    expect(html).toContain('<span class="hl-comment">// tune me</span>');
    expect(html).toContain('<span class="hl-string">&quot;hi&quot;</span>');
  });

  it("escapes HTML-significant characters", () => {
    const html = highlightCSharp("List<GameObject> items; // <b>bold</b>");
    expect(html).not.toContain("<b>");
    expect(html).toContain("&lt;b&gt;");
  });

  it("keeps interpolated string braces inside the string span", () => {
    const html = highlightCSharp('label.text = $"+{points}";');
    expect(html).toContain('<span class="hl-string">$&quot;+{points}&quot;</span>');
  });

  it("numbers every line for anchor targeting", () => {
    const html = highlightWithLines("int a;\nint b;");
    expect(html).toContain('data-line="1"');
    expect(html).toContain('data-line="2"');
  });
});

describe("renderMarkdown", () => {
  it("renders headings, lists, bold, code", () => {
    const html = renderMarkdown(
      "# Title\n\nSome **bold** and `code`.\n\n- item one\n- item two\n\n1. first\n2. second\n",
    );
    expect(html).toContain("<h1>Title</h1>");
    expect(html).toContain("<strong>bold</strong>");
    expect(html).toContain("<code>code</code>");
    expect(html).toContain("<ul>");
    expect(html).toContain("<li>item one</li>");
    expect(html).toContain("<ol>");
  });

  it("escapes raw HTML in doc text", () => {
    expect(renderMarkdown("hello <script>alert(1)</script>")).not.toContain("<script>");
  });
});
