from datetime import datetime, timezone

import pytest
from hypothesis import given, settings, strategies as st

from src.model import (
    Composite, CompositeKind, ElementRef, IntegrityError, MemberKind, ParseError, RefactoringKind,
    Scope, format_timestamp, natural_key, normalize_field_name, normalize_signature, parse_timestamp,
)
from helpers import field, method, rec


@pytest.mark.parametrize("raw, expected", [
    ("m()", "m()"),
    ("public void m()", "m()"),
    ("public m() : void", "m()"),
    ("m(int a, String b)", "m(int, String)"),
    ("protected doDispatch(HttpServletRequest request, HttpServletResponse response) : void",
     "doDispatch(HttpServletRequest, HttpServletResponse)"),
    ("has(key CFString) : boolean", "has(CFString)"),
    ("public boolean has(CFString key)", "has(CFString)"),
    ("m(x int)", "m(int)"),
    ("m(final int x)", "m(int)"),
    ("m(int values[])", "m(int[])"),
    ("m(String... args)", "m(String...)"),
    ("m(@Nullable String s)", "m(String)"),
    ("m(Map<String, List<Integer>> map)", "m(Map<String,List<Integer>>)"),
    ("m( Map < String , Object > m )", "m(Map<String,Object>)"),
    ("  public static <T> T first(List<T> items)  ", "first(List<T>)"),
    ("m(java.util.List items)", "m(java.util.List)"),
    ("m(String)", "m(String)"),
])
def test_normalize_signature(raw, expected):
    assert normalize_signature(raw) == expected


@pytest.mark.parametrize("raw", ["m", "m(int", "(int)", "m(a b c)", "m(int,)", "", "1m()"])
def test_normalize_signature_rejects_malformed(raw):
    with pytest.raises(ParseError):
        normalize_signature(raw)


def test_signature_variants_of_one_method_agree():
    variants = [
        "public void process(int count, String name)",
        "process(count int, name String) : void",
        "process(int,String)",
        "  process( final int count ,  String name )",
    ]
    assert {normalize_signature(v) for v in variants} == {"process(int, String)"}


_TYPES = st.sampled_from(["int", "long[]", "String", "List<String>", "Map<String,Object>", "CFString", "T"])
_NAMES = st.sampled_from(["m", "run", "has", "isEmptyMap", "doDispatch", "get_value"])


@pytest.mark.property_based
@given(name=_NAMES, types=st.lists(_TYPES, max_size=4), modifiers=st.sampled_from(["", "public ", "private static "]))
@settings(max_examples=200)
def test_normalize_signature_is_idempotent(name, types, modifiers):
    raw = f"{modifiers}{name}({', '.join(f'{t} p{i}' for i, t in enumerate(types))})"
    once = normalize_signature(raw)
    assert once == f"{name}({', '.join(types)})"
    assert normalize_signature(once) == once


@pytest.mark.parametrize("raw, expected", [
    ("name", "name"),
    ("private name : String", "name"),
    ("private String name", "name"),
    ("protected static final int wheels", "wheels"),
])
def test_normalize_field_name(raw, expected):
    assert normalize_field_name(raw) == expected


@pytest.mark.parametrize("raw", ["", "   ", "1count", "name()"])
def test_normalize_field_name_rejects_malformed(raw):
    with pytest.raises(ParseError):
        normalize_field_name(raw)


def test_parse_timestamp():
    expected = datetime(2020, 1, 1, tzinfo=timezone.utc)
    assert parse_timestamp("2020-01-01T00:00:00Z") == expected
    assert parse_timestamp("2020-01-01T02:00:00+02:00") == expected
    assert parse_timestamp("2020-01-01T00:00:00") == expected
    assert parse_timestamp("2020-01-01T00:00:00.900Z") == expected
    assert parse_timestamp(None) is None
    assert parse_timestamp("") is None
    assert format_timestamp(expected) == "2020-01-01T00:00:00Z"


def test_parse_timestamp_rejects_garbage():
    with pytest.raises(ParseError):
        parse_timestamp("yesterday")


def test_element_ref_identity_ignores_file_path():
    a = ElementRef.for_method("pkg.A", "public void m(int x)", file_path="src/main/A.java")
    b = ElementRef.for_method("pkg.A", "m(int)")
    assert a == b
    assert hash(a) == hash(b)
    assert a.label == "pkg.A.m(int)"
    assert a.member_name == "m"


def test_element_ref_names():
    inner = ElementRef.for_class("org.example.Outer$Inner")
    assert inner.simple_class_name == "Inner"
    assert inner.label == "org.example.Outer$Inner"
    assert inner.member_kind is MemberKind.CLASS


def test_element_ref_dict_round_trip():
    for element in (method("pkg.A", "m(int)"), field("pkg.B", "count"), ElementRef.for_class("pkg.C")):
        assert ElementRef.from_dict(element.to_dict()) == element


def test_element_ref_rejects_bad_shapes():
    with pytest.raises(ParseError):
        ElementRef.from_dict({"class": "A", "method": "m()", "field": "f"})
    with pytest.raises(ParseError):
        ElementRef.from_dict({"method": "m()"})
    with pytest.raises(ParseError):
        ElementRef("A", MemberKind.CLASS, "m()")
    with pytest.raises(ParseError):
        ElementRef.for_method("  ", "m()")


def test_record_normalizes_commit_and_timestamp():
    record = rec("1", "move", method("A", "m()"), method("B", "m()"), commit="ABC123",
                 timestamp="2021-03-04T05:06:07Z")
    assert record.commit == "abc123"
    assert record.timestamp == datetime(2021, 3, 4, 5, 6, 7, tzinfo=timezone.utc)
    assert record.to_dict()["timestamp"] == "2021-03-04T05:06:07Z"
    assert record.to_dict()["type"] == "move"


@pytest.mark.parametrize("kind, source, target", [
    ("extract", method("A", "m()"), method("B", "n()")),
    ("extract_move", method("A", "m()"), method("A", "n()")),
    ("pull_up_field", method("A", "m()"), method("B", "m()")),
    ("pull_up_method", field("A", "f"), field("B", "f")),
])
def test_record_rejects_inconsistent_elements(kind, source, target):
    with pytest.raises(ParseError):
        rec("1", kind, source, target)


@pytest.mark.parametrize("commit", ["", "xyz", "g123", "a" * 41])
def test_record_rejects_non_hex_commit(commit):
    with pytest.raises(ParseError):
        rec("1", "move", method("A", "m()"), method("B", "m()"), commit=commit)


def test_record_sort_key_orders_by_time_then_commit_then_id():
    early = rec("r10", "move", method("A", "m()"), method("B", "m()"), commit="bb", timestamp="2020-01-01T00:00:00Z")
    late = rec("r2", "move", method("A", "n()"), method("B", "n()"), commit="aa", timestamp="2020-01-02T00:00:00Z")
    undated = rec("r1", "move", method("A", "k()"), method("B", "k()"), commit="aa")
    same_time = rec("r9", "move", method("A", "j()"), method("B", "j()"), commit="bb", timestamp="2020-01-01T00:00:00Z")
    ordered = sorted([undated, late, early, same_time], key=lambda r: r.sort_key())
    assert [r.id for r in ordered] == ["r9", "r10", "r2", "r1"]


def test_natural_key():
    assert sorted(["r10", "r2", "r1"], key=natural_key) == ["r1", "r2", "r10"]


def test_kind_metadata():
    assert RefactoringKind.EXTRACT_MOVE.display_name == "Extract and Move Method"
    assert RefactoringKind.PULL_UP_FIELD.is_field_level
    assert not RefactoringKind.INLINE.is_field_level
    assert [kind.order for kind in CompositeKind] == list(range(8))
    assert CompositeKind.METHOD_COMPOSITION.has_scope
    assert not CompositeKind.CLASS_DECOMPOSITION.has_scope
    assert CompositeKind.COMPOSITE_PULL_UP_FIELD.display_name == "Composite Pull Up Field"


def _pull_up_members():
    return (
        rec("1", "pull_up_method", method("Sub1", "m()"), method("Super", "m()")),
        rec("2", "pull_up_method", method("Sub2", "m()"), method("Super", "m()"), commit="ff"),
    )


def test_composite_properties():
    members = _pull_up_members()
    composite = Composite(
        kind=CompositeKind.COMPOSITE_PULL_UP_METHOD,
        anchor=method("Super", "m()"),
        members=members,
        commits=frozenset(m.commit for m in members),
    )
    assert composite.size == 2
    assert composite.project == "demo"
    assert composite.member_ids == ["1", "2"]
    assert composite.is_multi_commit


def test_composite_invariants():
    members = _pull_up_members()
    with pytest.raises(IntegrityError):
        Composite(CompositeKind.COMPOSITE_PULL_UP_METHOD, method("Super", "m()"), members[:1], frozenset({"a1b2c3"}))
    with pytest.raises(IntegrityError):
        Composite(CompositeKind.COMPOSITE_PULL_UP_METHOD, method("Super", "m()"), members, frozenset(), age_days=-1)
    with pytest.raises(IntegrityError):
        Composite(CompositeKind.COMPOSITE_PULL_UP_METHOD, method("Super", "m()"), members, frozenset(),
                  scope=Scope.MIXED)
    extracts = (
        rec("3", "extract", method("A", "m()"), method("A", "x()")),
        rec("4", "extract", method("A", "n()"), method("A", "x()")),
    )
    with pytest.raises(IntegrityError):
        Composite(CompositeKind.METHOD_COMPOSITION, method("A", "x()"), extracts, frozenset({"a1b2c3"}))
