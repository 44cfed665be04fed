"""Tokenizer totality/round-trip, structure findings, class summaries."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gddforge.csharp import (
    check_structure,
    public_surface_summary,
    reconstruct,
    summarize_class,
    tokenize,
)
from gddforge.errors import StructureTooBroken

from conftest import BROKEN_CS, GOOD_CS

EXPECTED_BROKEN = {
    "unbalanced_braces.cs": "UnbalancedBraces",
    "extra_closing_brace.cs": "UnbalancedBraces",
    "unbalanced_parens.cs": "UnbalancedParens",
    "unbalanced_brackets.cs": "UnbalancedBrackets",
    "unterminated_string.cs": "UnterminatedString",
    "unterminated_comment.cs": "UnterminatedComment",
    "no_class.cs": "NoClassDeclared",
    "statement_outside_type.cs": "StatementOutsideType",
    "duplicate_class.cs": "DuplicateClass",
    "fence_artifact.cs": "MarkdownFenceArtifact",
    "truncated_midtoken.cs": "TruncatedFile",
    "prose_only.cs": "NoClassDeclared",
}


# --- tokenizer ------------------------------------------------------------


def test_comment_keyword_identifier_punct():
    toks = [t for t in tokenize("// hi\nint x;") if t.text]
    assert [(t.kind, t.text) for t in toks] == [
        ("comment", "// hi"),
        ("keyword", "int"),
        ("identifier", "x"),
        ("punct", ";"),
    ]


def test_escaped_quote_stays_inside_string():
    toks = [t for t in tokenize('string s = "a\\"b";') if t.kind == "string_lit"]
    assert len(toks) == 1
    assert toks[0].text == '"a\\"b"'


def test_verbatim_and_interpolated_strings():
    src = 'string a = @"C:\\temp\\x"; string b = $"n={n}";'
    kinds = [(t.kind, t.text) for t in tokenize(src) if t.kind == "string_lit"]
    assert kinds == [("string_lit", '@"C:\\temp\\x"'), ("string_lit", '$"n={n}"')]


def test_char_literal_vs_stray_apostrophe():
    toks = [t for t in tokenize("char c = 'x'; // it's fine") if t.text]
    assert any(t.kind == "char_lit" and t.text == "'x'" for t in toks)
    prose = [t for t in tokenize("don't panic") if t.text]
    assert all(t.kind != "char_lit" for t in prose)


def test_attribute_token_recognized():
    toks = [t for t in tokenize("[SerializeField] private float x;") if t.text]
    assert toks[0].kind == "attribute"
    assert toks[0].text == "[SerializeField]"


def test_array_index_is_not_attribute():
    toks = [t for t in tokenize("x = arr[0];") if t.text]
    assert all(t.kind != "attribute" for t in toks)


def test_line_numbers():
    toks = [t for t in tokenize("int a;\nint b;\n\nint c;") if t.text]
    lines = {t.text: t.line for t in toks if t.kind == "identifier"}
    assert lines == {"a": 1, "b": 2, "c": 4}


def test_round_trip_on_corpora():
    for path in GOOD_CS + BROKEN_CS:
        src = path.read_text()
        assert reconstruct(tokenize(src)) == src, path.name


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=300))
def test_round_trip_arbitrary_text(src):
    assert reconstruct(tokenize(src)) == src


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=200))
def test_round_trip_arbitrary_bytes_latin1(data):
    src = data.decode("latin-1")
    assert reconstruct(tokenize(src)) == src


def test_totality_never_raises_on_junk(rng):
    for _ in range(500):
        n = rng.randint(0, 120)
        src = "".join(chr(rng.randint(1, 0x2FF)) for _ in range(n))
        toks = tokenize(src)
        assert reconstruct(toks) == src
        check_structure(src)  # must not throw either


# --- structure checks ----------------------------------------------------------


def test_trivial_class_has_no_errors():
    assert [f for f in check_structure("public class A { }") if f.severity == "error"] == []


def test_unclosed_brace_flagged():
    codes = [f.code for f in check_structure("public class A {") if f.severity == "error"]
    assert "UnbalancedBraces" in codes


def test_good_corpus_has_zero_error_findings():
    assert len(GOOD_CS) >= 10
    for path in GOOD_CS:
        errors = [f for f in check_structure(path.read_text()) if f.severity == "error"]
        assert errors == [], (path.name, errors)


def test_broken_corpus_each_yields_expected_code():
    assert len(BROKEN_CS) >= 10
    for path in BROKEN_CS:
        expected = EXPECTED_BROKEN[path.name]
        codes = {f.code for f in check_structure(path.read_text()) if f.severity == "error"}
        assert expected in codes, (path.name, codes)


def test_using_and_namespace_allowed_at_top_level():
    src = "using UnityEngine;\nnamespace Game;\npublic class A { }\n"
    codes = [f.code for f in check_structure(src)]
    assert "StatementOutsideType" not in codes


# --- summaries --------------------------------------------------------------------


def test_monobehaviour_and_update_detected():
    src = "public class A : MonoBehaviour { void Update(){} }"
    s = summarize_class(src)[0]
    assert s.base_types == ("MonoBehaviour",)
    assert s.unity_messages == frozenset({"Update"})


def test_counts_public_methods_and_serialized_fields():
    src = """
public class Counts : MonoBehaviour
{
    [SerializeField] private float speed = 1f;
    [SerializeField] private int lives = 3;
    private bool hidden;
    public void A() { }
    public int B(int x) { return x; }
    public string C(int x, float y) { return ""; }
    private void D() { }
}
"""
    s = summarize_class(src)[0]
    assert len(s.public_methods) == 3
    assert {f.name for f in s.serialized_fields} == {"speed", "lives"}
    assert all(f.exposure == "serialize_field_attribute" for f in s.serialized_fields)
    assert ("B", 1, "int") in s.public_methods
    assert ("C", 2, "string") in s.public_methods


def test_public_field_exposure():
    s = summarize_class("public class A { public float speed; }")[0]
    assert s.serialized_fields == tuple([type(s.serialized_fields[0])("speed", "float", "public")])


def test_summary_requires_balanced_braces():
    with pytest.raises(StructureTooBroken):
        summarize_class("public class A { void F() {")


def test_player_controller_fixture_summary():
    src = (GOOD_CS[0].parent / "PlayerMovement2D.cs").read_text()
    s = summarize_class(src)[0]
    assert s.class_name == "PlayerMovement2D"
    assert s.is_monobehaviour()
    assert s.unity_messages == frozenset({"Awake", "Update", "OnCollisionEnter"})
    assert ("Jump", 0, "void") in s.public_methods
    assert {f.name for f in s.serialized_fields} == {"moveSpeed", "jumpForce", "groundMask"}
    assert "Input" in s.identifiers


def test_interface_plus_class_single_summary():
    src = (GOOD_CS[0].parent / "DoorSwitch.cs").read_text()
    summaries = summarize_class(src)
    assert [s.class_name for s in summaries] == ["DoorSwitch"]


def test_nested_enum_not_a_second_class():
    src = (GOOD_CS[0].parent / "AudioCue.cs").read_text()
    summaries = summarize_class(src)
    assert [s.class_name for s in summaries] == ["AudioCue"]


def test_method_line_counts():
    src = """public class L {
    void Short() { }
    void Longer()
    {
        int a = 1;
        int b = 2;
        int c = a + b;
    }
}
"""
    s = summarize_class(src)[0]
    assert s.method_lines["Short"] == 1
    assert s.method_lines["Longer"] == 6


def test_public_surface_rendering():
    src = "public class A : MonoBehaviour { public void Go(int x) { } [SerializeField] private float speed; }"
    text = public_surface_summary(summarize_class(src)[0])
    assert "class A" in text and "MonoBehaviour" in text
    assert "Go(1 parameter)" in text
    assert "speed" in text
