import pytest
from hypothesis import given, settings

from xmlbind.buffer import terminate, wrap
from xmlbind.sax import (
    BAD_ATTRIBUTE_SYNTAX,
    MALFORMED_MARKUP,
    UNCLOSED_TAG,
    UNEXPECTED_EOF,
    SaxHandlers,
    ScanError,
    ScanStats,
    scan,
)

import helpers
from conftest import xml_documents


def events_of(data: bytes, lenient: bool = False, stats=None):
    buf = terminate(data)
    events, completed = helpers.collect_events(buf, lenient=lenient, stats=stats)
    assert completed
    return events


def test_single_element_events():
    assert events_of(b"<name>John</name>") == [
        ("open", b"name"),
        ("end_open", b"name"),
        ("text", b"John"),
        ("close", b"name"),
    ]


def test_self_closing_normalises_to_three_events():
    assert events_of(b"<a/>") == [("open", b"a"), ("end_open", b"a"), ("close", b"a")]


def test_usage_document_event_sequence():
    # oracle: hand enumeration of the example document, in document order
    ws = [
        b"\n",
        b" ",
        b"\n            ",
        b"\n            ",
        b"\n            ",
        b"\n        ",
        b"\n",
    ]
    expected = [
        ("text", ws[0]),
        ("open", b"users"),
        ("end_open", b"users"),
        ("text", ws[1]),
        ("open", b"user"),
        ("end_open", b"user"),
        ("text", ws[2]),
        ("open", b"uid"),
        ("end_open", b"uid"),
        ("text", b"123"),
        ("close", b"uid"),
        ("text", ws[3]),
        ("open", b"name"),
        ("end_open", b"name"),
        ("text", b"John"),
        ("close", b"name"),
        ("text", ws[4]),
        ("open", b"bday"),
        ("end_open", b"bday"),
        ("text", b"1990-11-12"),
        ("close", b"bday"),
        ("text", ws[5]),
        ("close", b"user"),
        ("text", ws[6]),
        ("close", b"users"),
    ]
    assert events_of(helpers.USERS_DOC) == expected


def test_attributes_single_and_double_quotes():
    events = events_of(b"<a k=\"v\" q='w'>t</a>")
    assert events[:4] == [
        ("open", b"a"),
        ("attr", b"k", b"v"),
        ("attr", b"q", b"w"),
        ("end_open", b"a"),
    ]


def test_attr_value_may_contain_angle_bracket():
    events = events_of(b'<a k="1>2"></a>')
    assert ("attr", b"k", b"1>2") in events


def test_declaration_comment_pi_doctype_skipped():
    doc = (
        b'<?xml version="1.0"?><!DOCTYPE r [ <!ENTITY x "y"> ]>'
        b"<!-- c --><?php hi?><r>ok</r><!-- tail -->"
    )
    assert events_of(doc) == [
        ("open", b"r"),
        ("end_open", b"r"),
        ("text", b"ok"),
        ("close", b"r"),
    ]


def test_cdata_fires_with_raw_body():
    events = events_of(b"<a><![CDATA[1<2&]]></a>")
    assert ("cdata", b"1<2&") in events


def test_entities_pass_through_verbatim():
    events = events_of(b"<a>x&amp;y</a>")
    assert ("text", b"x&amp;y") in events


def test_whitespace_only_text_still_fires():
    assert ("text", b"  ") in events_of(b"<a>  </a>")


def test_abort_stops_scan_and_returns_false():
    buf = terminate(b"<a><b>t</b></a>")
    seen = []
    handlers = SaxHandlers(on_open=lambda s: (seen.append(buf.view(s)), True)[1])
    assert scan(buf, handlers) is False
    assert seen == [b"a"]


def test_non_terminated_buffer_supported():
    buf = wrap(b"<a>t</a>")
    events, completed = helpers.collect_events(buf)
    assert completed and ("text", b"t") in events


@pytest.mark.parametrize(
    "doc,kind",
    [
        (b"<name>John", UNCLOSED_TAG),
        (b"<a></b>", UNCLOSED_TAG),
        (b"</b>", MALFORMED_MARKUP),
        (b"<a b=1>", BAD_ATTRIBUTE_SYNTAX),
        (b"<a b>", BAD_ATTRIBUTE_SYNTAX),
        (b"<a", UNEXPECTED_EOF),
        (b'<a k="v', UNEXPECTED_EOF),
        (b"<!-- never closed", UNEXPECTED_EOF),
        (b"<a><![CDATA[x]]", UNEXPECTED_EOF),
        (b"<", UNEXPECTED_EOF),
    ],
)
def test_scan_errors(doc, kind):
    with pytest.raises(ScanError) as exc:
        events_of(doc)
    assert exc.value.kind == kind
    assert 0 <= exc.value.position <= len(doc)


def test_mismatched_close_reports_expected_tag():
    with pytest.raises(ScanError) as exc:
        events_of(b"<a><b></a></a>")
    assert exc.value.expected == "</b>"


# --- lenient mode ---------------------------------------------------------------


def test_lenient_auto_closes_at_eof():
    # auto-close rule: unclosed elements close at ancestors' close or EOF,
    # synthetic events innermost first; both paragraphs stay open until EOF
    assert events_of(b"<p>a<p>b", lenient=True) == [
        ("open", b"p"),
        ("end_open", b"p"),
        ("text", b"a"),
        ("open", b"p"),
        ("end_open", b"p"),
        ("text", b"b"),
        ("close", b"p"),  # innermost first
        ("close", b"p"),
    ]


def test_lenient_auto_closes_inner_at_ancestor_close():
    assert events_of(b"<a><b>x</a>", lenient=True) == [
        ("open", b"a"),
        ("end_open", b"a"),
        ("open", b"b"),
        ("end_open", b"b"),
        ("text", b"x"),
        ("close", b"b"),
        ("close", b"a"),
    ]


def test_lenient_matches_strict_on_well_formed_input():
    strict = events_of(helpers.USERS_DOC)
    lenient = events_of(helpers.USERS_DOC, lenient=True)
    assert strict == lenient


def test_lenient_skips_unquoted_attribute():
    assert events_of(b"<a href=x>", lenient=True) == [
        ("open", b"a"),
        ("end_open", b"a"),
        ("close", b"a"),
    ]


def test_lenient_skips_stray_close():
    events = events_of(b"<a></b></a>", lenient=True)
    assert events == [("open", b"a"), ("end_open", b"a"), ("close", b"a")]


def test_lenient_eof_inside_markup_still_fatal():
    with pytest.raises(ScanError) as exc:
        events_of(b'<a k="v', lenient=True)
    assert exc.value.kind == UNEXPECTED_EOF


# --- properties -----------------------------------------------------------------


@given(xml_documents())
@settings(max_examples=120, deadline=None)
def test_well_nested_and_zero_copy(doc):
    buf = terminate(doc)
    stack = []
    spans_ok = []

    def check_span(span):
        spans_ok.append(span.start >= 0 and span.start + span.length <= buf.logical_len)

    handlers = SaxHandlers(
        on_open=lambda s: (check_span(s), stack.append(buf.view(s)))[0] and None,
        on_attr=lambda k, v: (check_span(k), check_span(v))[0] and None,
        on_text=lambda s: check_span(s),
        on_close=lambda s: (check_span(s), stack.pop() == buf.view(s))[0] and None,
    )
    assert scan(buf, handlers)
    assert not stack  # balanced open/close with matching names
    assert all(spans_ok)


@given(xml_documents())
@settings(max_examples=100, deadline=None)
def test_reconstruction_fixpoint(doc):
    buf = terminate(doc)
    events, _ = helpers.collect_events(buf)
    rendered = helpers.render_events(events)
    buf2 = terminate(rendered)
    events2, _ = helpers.collect_events(buf2)
    assert events == events2


@given(xml_documents())
@settings(max_examples=100, deadline=None)
def test_lenient_is_superset_of_strict(doc):
    buf = terminate(doc)
    strict, _ = helpers.collect_events(buf)
    lenient, _ = helpers.collect_events(buf, lenient=True)
    assert strict == lenient


@given(xml_documents())
@settings(max_examples=100, deadline=None)
def test_single_pass_visit_budget(doc):
    buf = terminate(doc)
    stats = ScanStats()
    helpers.collect_events(buf, stats=stats)
    n = buf.logical_len
    assert stats.visits <= 3 * n + 16
    assert stats.max_index <= n


def test_visit_budget_on_usage_document():
    buf = terminate(helpers.USERS_DOC)
    stats = ScanStats()
    helpers.collect_events(buf, stats=stats)
    assert stats.visits <= 3 * buf.logical_len


def test_close_tag_tolerates_trailing_space():
    assert events_of(b"<a>x</a  >") == [
        ("open", b"a"),
        ("end_open", b"a"),
        ("text", b"x"),
        ("close", b"a"),
    ]


def test_attr_spacing_around_equals():
    events = events_of(b'<a k = "v"/>')
    assert ("attr", b"k", b"v") in events
