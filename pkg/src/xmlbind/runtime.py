"""Parsing and extraction combinators that generated modules link against.

Phase 1 walks the input once, matching tags and recording (offset, length)
span cells into a flat integer array; no values are decoded. Phase 2 reads
the array back and decodes spans into typed values on demand. Parser and
extractor agree on cell positions through the fixed per-record slot layout
computed at generation time, so cells carry no runtime tags.

Optional slots use the ``(0, 0)`` sentinel for "absent": a recorded span can
never start at offset 0, because element content is always preceded by at
least the root open tag.
"""

from __future__ import annotations

import datetime
import re
from array import array
from collections.abc import Sequence
from typing import Callable, Optional, Tuple

from .buffer import InputBuffer

_WS = b" \t\r\n"
_LT = 0x3C
_GT = 0x3E
_DQ = 0x22
_SQ = 0x27


class BindError(Exception):
    """Base for both phases; ``phase`` says which one failed."""

    phase = "bind"


class ParseFailure(BindError):
    """Phase-1 mismatch: ``expected`` literal was not found at byte ``at``."""

    phase = "scan"

    def __init__(self, expected: str, at: int, context: Tuple[str, ...] = ()):
        where = " inside " + "/".join(context) if context else ""
        super().__init__(f"expected {expected} at byte {at}{where}")
        self.expected = expected
        self.at = at
        self.context = context


class ExtractError(BindError):
    """Phase-2 decode failure for one field."""

    phase = "extract"

    def __init__(self, field: str, detail: str, at: int):
        name = field or "value"
        super().__init__(f"{name}: {detail} (input offset {at})")
        self.field = field
        self.detail = detail
        self.at = at


class ParseState:
    """Exclusive phase-1 state: the input plus the offset array being built.

    The cell array starts at ``logical_len // 7`` entries and doubles when
    exhausted; new cells are always zero.
    """

    __slots__ = ("buf", "cells", "path")

    def __init__(self, buf: InputBuffer, initial_cells: Optional[int] = None):
        cap = max(16, buf.logical_len // 7) if initial_cells is None else max(16, initial_cells)
        self.buf = buf
        self.cells = array("q", bytes(8 * cap))
        self.path: list[str] = []

    def grow_to(self, size: int) -> None:
        cells = self.cells
        have = len(cells)
        if size <= have:
            return
        need = have
        while need < size:
            need *= 2
        cells.extend(array("q", bytes(8 * (need - have))))

    def put(self, i: int, value: int) -> None:
        if i >= len(self.cells):
            self.grow_to(i + 1)
        self.cells[i] = value

    def put2(self, i: int, a: int, b: int) -> None:
        if i + 2 > len(self.cells):
            self.grow_to(i + 2)
        self.cells[i] = a
        self.cells[i + 1] = b

    def finish(self) -> "OffsetView":
        return OffsetView(self.buf, self.cells)


class OffsetView:
    """The finished, immutable (input, cells) pair that phase 2 reads."""

    __slots__ = ("buf", "cells")

    def __init__(self, buf: InputBuffer, cells):
        self.buf = buf
        self.cells = cells


# --- phase 1: scanning helpers -------------------------------------------------


def skip_spaces(buf: InputBuffer, i: int) -> int:
    """First index at or after ``i`` that is not space/tab/CR/LF."""
    data = buf.data
    n = buf.logical_len
    while i < n and data[i] in _WS:
        i += 1
    return i


def skip_junk(buf: InputBuffer, i: int) -> int:
    """Skip whitespace and comments; combinators call this between tokens."""
    data = buf.data
    n = buf.logical_len
    while True:
        while i < n and data[i] in _WS:
            i += 1
        if data[i : i + 4] == b"<!--":
            end = data.find(b"-->", i + 4, n)
            if end < 0:
                raise ParseFailure("-->", n)
            i = end + 3
            continue
        return i


def skip_header(buf: InputBuffer, i: int) -> int:
    """Skip an ``<?xml ... ?>`` declaration (if present) and whitespace."""
    i = skip_spaces(buf, i)
    data = buf.data
    if data[i : i + 5] == b"<?xml":
        end = data.find(b"?>", i + 5, buf.logical_len)
        if end < 0:
            raise ParseFailure("?>", buf.logical_len)
        i = skip_spaces(buf, end + 2)
    return i


def skip_to_open_tag(buf: InputBuffer, i: int) -> int:
    """Index of the next ``<`` at or after ``i``; ``logical_len`` if none."""
    j = buf.data.find(_LT, i, buf.logical_len)
    return buf.logical_len if j < 0 else j


def ensure_tag(buf: InputBuffer, skip_attrs: bool, tag: bytes, i: int) -> Optional[Tuple[int, bool]]:
    """Match ``<tag>`` at ``i`` (junk-tolerant); returns (content index,
    had_attrs) or None on name mismatch, enabling choice/optional
    backtracking at tag granularity."""
    data = buf.data
    n = buf.logical_len
    i = skip_junk(buf, i)
    if data[i : i + 1] != b"<":
        return None
    end = i + 1 + len(tag)
    if data[i + 1 : end] != tag:
        return None
    nb = data[end] if end < n else 0
    if nb == _GT:
        return end + 1, False
    if nb not in _WS or not skip_attrs:
        return None
    # scan past attributes to '>', jumping over quoted values
    j = end
    while True:
        gt = data.find(_GT, j, n)
        if gt < 0:
            return None
        dq = data.find(_DQ, j, gt)
        sq = data.find(_SQ, j, gt)
        if dq < 0 and sq < 0:
            return gt + 1, True
        q = dq if sq < 0 or (0 <= dq < sq) else sq
        close = data.find(data[q], q + 1, n)
        if close < 0:
            return None
        j = close + 1


def ensure_tag_with_attrs(
    buf: InputBuffer, tag: bytes, attr_names: Tuple[bytes, ...], i: int
) -> Optional[Tuple[int, list]]:
    """Like :func:`ensure_tag`, capturing declared attribute value spans.

    Returns (content index, spans) where ``spans`` holds one (offset, length)
    per declared attribute, ``(0, 0)`` when absent. Undeclared attributes are
    skipped; malformed attribute syntax makes the whole tag a non-match.
    """
    data = buf.data
    n = buf.logical_len
    i = skip_junk(buf, i)
    if data[i : i + 1] != b"<":
        return None
    end = i + 1 + len(tag)
    if data[i + 1 : end] != tag:
        return None
    spans = [(0, 0)] * len(attr_names)
    nb = data[end] if end < n else 0
    if nb == _GT:
        return end + 1, spans
    if nb not in _WS:
        return None
    pos = end
    while True:
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos >= n:
            return None
        if data[pos] == _GT:
            return pos + 1, spans
        a = pos
        while pos < n and data[pos] not in b" \t\r\n=/>":
            pos += 1
        if pos == a or pos >= n:
            return None
        key = data[a:pos]
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos >= n or data[pos] != 0x3D:  # '='
            return None
        pos += 1
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos >= n:
            return None
        q = data[pos]
        if q != _DQ and q != _SQ:
            return None
        vend = data.find(q, pos + 1, n)
        if vend < 0:
            return None
        try:
            slot = attr_names.index(key)
        except ValueError:
            slot = -1
        if slot >= 0:
            spans[slot] = (pos + 1, vend - pos - 1)
        pos = vend + 1


def _fail_literal(st: ParseState, literal: bytes, i: int):
    """Raise with the position of the first diverging byte."""
    data = st.buf.data
    k = 0
    while k < len(literal) and i + k < st.buf.logical_len and data[i + k] == literal[k]:
        k += 1
    raise ParseFailure(literal.decode(), i + k, tuple(st.path))


def _expect_close(st: ParseState, tag: bytes, i: int) -> int:
    buf = st.buf
    data = buf.data
    i = skip_junk(buf, i)
    end = i + 2 + len(tag)
    if data[i : i + 2] == b"</" and data[i + 2 : end] == tag:
        j = skip_spaces(buf, end)
        if data[j : j + 1] == b">":
            return j + 1
    _fail_literal(st, b"</" + tag + b">", i)


def _open_or_fail(st: ParseState, tag: bytes, i: int) -> Tuple[int, bool]:
    r = ensure_tag(st.buf, True, tag, i)
    if r is None:
        _fail_literal(st, b"<" + tag + b">", skip_junk(st.buf, i))
    return r


# --- phase 1: combinators -------------------------------------------------------

Inner = Callable[[ParseState, int, int], Tuple[int, int]]


def in_one_tag(st: ParseState, tag: bytes, arr_ofs: int, str_ofs: int, inner: Inner) -> Tuple[int, int]:
    """Require ``<tag>``, run ``inner`` on the content, require ``</tag>``."""
    content, _ = _open_or_fail(st, tag, str_ofs)
    st.path.append(tag.decode())
    arr2, s2 = inner(st, arr_ofs, content)
    s3 = _expect_close(st, tag, s2)
    st.path.pop()
    return arr2, s3


def in_maybe_tag(
    st: ParseState, tag: bytes, arr_ofs: int, str_ofs: int, inner: Inner, width: int
) -> Tuple[int, int]:
    """Like :func:`in_one_tag` when the tag is present; otherwise writes the
    (0, 0) sentinel over the ``width``-cell slot and consumes no input."""
    r = ensure_tag(st.buf, True, tag, str_ofs)
    if r is None:
        st.grow_to(arr_ofs + width)
        for k in range(width):
            st.cells[arr_ofs + k] = 0
        return arr_ofs + width, str_ofs
    st.path.append(tag.decode())
    arr2, s2 = inner(st, arr_ofs, r[0])
    s3 = _expect_close(st, tag, s2)
    st.path.pop()
    return arr2, s3


def in_many_tags(st: ParseState, tag: bytes, arr_ofs: int, str_ofs: int, inner: Inner) -> Tuple[int, int]:
    """Match ``tag`` elements repeatedly; the repetition count lands in the
    reserved cell at ``arr_ofs`` once the run ends."""
    arr = arr_ofs + 1
    pos = str_ofs
    count = 0
    while True:
        r = ensure_tag(st.buf, True, tag, pos)
        if r is None:
            break
        st.path.append(tag.decode())
        arr, s2 = inner(st, arr, r[0])
        pos = _expect_close(st, tag, s2)
        st.path.pop()
        count += 1
    st.put(arr_ofs, count)
    return arr, pos


def in_one_tag_with_attrs(
    st: ParseState,
    tag: bytes,
    attr_names: Tuple[bytes, ...],
    arr_ofs: int,
    str_ofs: int,
    inner: Inner,
) -> Tuple[int, int]:
    """:func:`in_one_tag` with declared attribute capture: one span slot per
    declared attribute precedes the child-element slots."""
    r = ensure_tag_with_attrs(st.buf, tag, attr_names, str_ofs)
    if r is None:
        _fail_literal(st, b"<" + tag + b">", skip_junk(st.buf, str_ofs))
    content, spans = r
    arr = _write_attr_spans(st, arr_ofs, spans)
    st.path.append(tag.decode())
    arr2, s2 = inner(st, arr, content)
    s3 = _expect_close(st, tag, s2)
    st.path.pop()
    return arr2, s3


def in_maybe_tag_with_attrs(
    st: ParseState,
    tag: bytes,
    attr_names: Tuple[bytes, ...],
    arr_ofs: int,
    str_ofs: int,
    inner: Inner,
    width: int,
) -> Tuple[int, int]:
    r = ensure_tag_with_attrs(st.buf, tag, attr_names, str_ofs)
    if r is None:
        st.grow_to(arr_ofs + width)
        for k in range(width):
            st.cells[arr_ofs + k] = 0
        return arr_ofs + width, str_ofs
    content, spans = r
    arr = _write_attr_spans(st, arr_ofs, spans)
    st.path.append(tag.decode())
    arr2, s2 = inner(st, arr, content)
    s3 = _expect_close(st, tag, s2)
    st.path.pop()
    return arr2, s3


def in_many_tags_with_attrs(
    st: ParseState,
    tag: bytes,
    attr_names: Tuple[bytes, ...],
    arr_ofs: int,
    str_ofs: int,
    inner: Inner,
) -> Tuple[int, int]:
    arr = arr_ofs + 1
    pos = str_ofs
    count = 0
    while True:
        r = ensure_tag_with_attrs(st.buf, tag, attr_names, pos)
        if r is None:
            break
        content, spans = r
        arr = _write_attr_spans(st, arr, spans)
        st.path.append(tag.decode())
        arr, s2 = inner(st, arr, content)
        pos = _expect_close(st, tag, s2)
        st.path.pop()
        count += 1
    st.put(arr_ofs, count)
    return arr, pos


def _write_attr_spans(st: ParseState, arr_ofs: int, spans) -> int:
    arr = arr_ofs
    for ofs, length in spans:
        st.put2(arr, ofs, length)
        arr += 2
    return arr


# choice alternatives: (tag, inner, inner_width) triples

ChoiceAlt = Tuple[bytes, Inner, int]


def _parse_choice_at(st: ParseState, alts, arr_ofs: int, str_ofs: int, width: int):
    """Try alternatives in declaration order; write the 1-based alternative
    index into the tag cell. Returns None when nothing matches."""
    for k, (tag, inner, alt_width) in enumerate(alts):
        r = ensure_tag(st.buf, True, tag, str_ofs)
        if r is None:
            continue
        st.put(arr_ofs, k + 1)
        st.path.append(tag.decode())
        arr2, s2 = inner(st, arr_ofs + 1, r[0])
        s3 = _expect_close(st, tag, s2)
        st.path.pop()
        assert arr2 == arr_ofs + 1 + alt_width, "alternative wrote an unexpected cell count"
        st.grow_to(arr_ofs + width)
        return arr_ofs + width, s3
    return None


def _alts_expected(alts) -> str:
    return " | ".join(f"<{tag.decode()}>" for tag, _, _ in alts)


def in_choice_tag(st: ParseState, alts: Tuple[ChoiceAlt, ...], arr_ofs: int, str_ofs: int) -> Tuple[int, int]:
    """One mandatory choice value: tag cell plus the widest alternative."""
    width = 1 + max(w for _, _, w in alts)
    r = _parse_choice_at(st, alts, arr_ofs, str_ofs, width)
    if r is None:
        raise ParseFailure(_alts_expected(alts), skip_junk(st.buf, str_ofs), tuple(st.path))
    return r


def in_maybe_choice(st: ParseState, alts: Tuple[ChoiceAlt, ...], arr_ofs: int, str_ofs: int) -> Tuple[int, int]:
    """Optional choice: a zero tag cell marks absence."""
    width = 1 + max(w for _, _, w in alts)
    r = _parse_choice_at(st, alts, arr_ofs, str_ofs, width)
    if r is None:
        st.grow_to(arr_ofs + width)
        for k in range(width):
            st.cells[arr_ofs + k] = 0
        return arr_ofs + width, str_ofs
    return r


def in_many_choice(st: ParseState, alts: Tuple[ChoiceAlt, ...], arr_ofs: int, str_ofs: int) -> Tuple[int, int]:
    """Repeated choice values after a reserved count cell."""
    width = 1 + max(w for _, _, w in alts)
    arr = arr_ofs + 1
    pos = str_ofs
    count = 0
    while True:
        r = _parse_choice_at(st, alts, arr, pos, width)
        if r is None:
            break
        arr, pos = r
        count += 1
    st.put(arr_ofs, count)
    return arr, pos


# all-group members: (tag, inner, width, required)

AllMember = Tuple[bytes, Inner, int, bool]


def in_all_tags(st: ParseState, members: Tuple[AllMember, ...], arr_ofs: int, str_ofs: int) -> Tuple[int, int]:
    """Match every member element once, in any order, each into its fixed
    slot. Duplicate and missing required members fail."""
    offsets = []
    total = 0
    for _, _, width, _ in members:
        offsets.append(arr_ofs + total)
        total += width
    seen = [False] * len(members)
    pos = str_ofs
    while True:
        progressed = False
        for idx, (tag, inner, width, _) in enumerate(members):
            r = ensure_tag(st.buf, True, tag, pos)
            if r is None:
                continue
            if seen[idx]:
                raise ParseFailure(
                    f"at most one <{tag.decode()}>", skip_junk(st.buf, pos), tuple(st.path)
                )
            seen[idx] = True
            st.path.append(tag.decode())
            arr2, s2 = inner(st, offsets[idx], r[0])
            pos = _expect_close(st, tag, s2)
            st.path.pop()
            assert arr2 == offsets[idx] + width
            progressed = True
            break
        if not progressed:
            break
    for idx, (tag, _, width, required) in enumerate(members):
        if seen[idx]:
            continue
        if required:
            raise ParseFailure(f"<{tag.decode()}>", skip_junk(st.buf, pos), tuple(st.path))
        st.grow_to(offsets[idx] + width)
        for k in range(width):
            st.cells[offsets[idx] + k] = 0
    st.grow_to(arr_ofs + total)
    return arr_ofs + total, pos


def _record_text_span(st: ParseState, arr_ofs: int, str_ofs: int) -> Tuple[int, int]:
    """Record the raw text run ending at the next ``<`` as an (offset, length)
    pair. No value validation happens here; decoding is phase 2's job."""
    end = skip_to_open_tag(st.buf, str_ofs)
    st.put2(arr_ofs, str_ofs, end - str_ofs)
    return arr_ofs + 2, end


# distinct names keep generated code traceable to the schema's scalar kinds
parse_int_content = _record_text_span
parse_string_content = _record_text_span
parse_day_content = _record_text_span
parse_bool_content = _record_text_span
parse_float_content = _record_text_span
parse_datetime_content = _record_text_span


def parse_empty_content(st: ParseState, arr_ofs: int, str_ofs: int) -> Tuple[int, int]:
    """Content parser for empty elements: writes nothing, consumes nothing."""
    return arr_ofs, str_ofs


# --- phase 2: extraction --------------------------------------------------------

_INT_RE = re.compile(rb"[+-]?[0-9]+")
_DATE_RE = re.compile(rb"([0-9]{4})-([0-9]{2})-([0-9]{2})")
_BOOLS = {b"true": True, b"1": True, b"false": False, b"0": False}


def _span_bytes(view: OffsetView, ofs: int, field: str) -> Tuple[bytes, int]:
    start = view.cells[ofs]
    length = view.cells[ofs + 1]
    if start == 0 and length == 0:
        raise ExtractError(field, "required value is absent", 0)
    return view.buf.data[start : start + length], start


def extract_int(view: OffsetView, ofs: int, field: str = "") -> Tuple[int, int]:
    raw, at = _span_bytes(view, ofs, field)
    text = raw.strip()
    if not _INT_RE.fullmatch(text):
        raise ExtractError(field, f"not an integer: {raw!r}", at)
    return int(text), ofs + 2


def extract_string(view: OffsetView, ofs: int, field: str = "") -> Tuple[str, int]:
    raw, at = _span_bytes(view, ofs, field)
    try:
        return raw.decode("utf-8"), ofs + 2
    except UnicodeDecodeError as exc:
        raise ExtractError(field, f"invalid UTF-8: {exc}", at) from None


def extract_day(view: OffsetView, ofs: int, field: str = "") -> Tuple[datetime.date, int]:
    raw, at = _span_bytes(view, ofs, field)
    m = _DATE_RE.fullmatch(raw.strip())
    if not m:
        raise ExtractError(field, f"not a YYYY-MM-DD date: {raw!r}", at)
    try:
        value = datetime.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError as exc:
        raise ExtractError(field, f"invalid date {raw!r}: {exc}", at) from None
    return value, ofs + 2


def extract_bool(view: OffsetView, ofs: int, field: str = "") -> Tuple[bool, int]:
    raw, at = _span_bytes(view, ofs, field)
    value = _BOOLS.get(raw.strip())
    if value is None:
        raise ExtractError(field, f"not a boolean: {raw!r}", at)
    return value, ofs + 2


def extract_float(view: OffsetView, ofs: int, field: str = "") -> Tuple[float, int]:
    raw, at = _span_bytes(view, ofs, field)
    try:
        return float(raw.strip()), ofs + 2
    except ValueError:
        raise ExtractError(field, f"not a number: {raw!r}", at) from None


def extract_datetime(view: OffsetView, ofs: int, field: str = "") -> Tuple[datetime.datetime, int]:
    raw, at = _span_bytes(view, ofs, field)
    text = raw.strip().decode("ascii", "replace").replace("Z", "+00:00")
    try:
        return datetime.datetime.fromisoformat(text), ofs + 2
    except ValueError:
        raise ExtractError(field, f"not an ISO datetime: {raw!r}", at) from None


def extract_enum(view: OffsetView, ofs: int, enum_cls, field: str = "") -> Tuple[object, int]:
    raw, at = _span_bytes(view, ofs, field)
    text = raw.strip().decode("utf-8", "replace")
    try:
        return enum_cls(text), ofs + 2
    except ValueError:
        names = ", ".join(m.value for m in enum_cls)
        raise ExtractError(field, f"{text!r} is not one of: {names}", at) from None


Extractor = Callable[[OffsetView, int], Tuple[object, int]]


def extract_maybe(
    view: OffsetView, ofs: int, inner: Extractor, width: int, field: str = ""
) -> Tuple[Optional[object], int]:
    """(0, 0) cells mean absent; anything else defers to ``inner``.

    For nested slots the sentinel has one blind spot: a present value whose
    own leading slots are all zero (e.g. a record holding only an empty
    repeat) reads as absent. Scalar slots are unambiguous, since a recorded
    span never starts at offset 0.
    """
    cells = view.cells
    if cells[ofs] == 0 and (width < 2 or cells[ofs + 1] == 0):
        return None, ofs + width
    value, _ = inner(view, ofs)
    return value, ofs + width


def extract_many(
    view: OffsetView, ofs: int, inner: Extractor, width: Optional[int]
) -> Tuple[Sequence, int]:
    """Read the count cell, then ``count`` records.

    Fixed-width records extract lazily (a record decodes only when visited);
    variable-width records must be walked, so they extract eagerly.
    """
    count = view.cells[ofs]
    if width is None:
        out = []
        pos = ofs + 1
        for _ in range(count):
            value, pos = inner(view, pos)
            out.append(value)
        return out, pos
    return LazySeq(view, ofs + 1, inner, width, count), ofs + 1 + count * width


def extract_choice(
    view: OffsetView, ofs: int, extractors: Tuple[Extractor, ...], width: int, field: str = ""
) -> Tuple[object, int]:
    """Dispatch on the 1-based tag cell; advance by the full choice width."""
    k = view.cells[ofs]
    if not 1 <= k <= len(extractors):
        raise ExtractError(field, f"invalid choice tag cell {k}", 0)
    value, _ = extractors[k - 1](view, ofs + 1)
    return value, ofs + width


def extract_maybe_choice(
    view: OffsetView, ofs: int, extractors: Tuple[Extractor, ...], width: int, field: str = ""
) -> Tuple[Optional[object], int]:
    if view.cells[ofs] == 0:
        return None, ofs + width
    return extract_choice(view, ofs, extractors, width, field)


class LazySeq(Sequence):
    """Demand-driven view over the records of a repeated slot region.

    Indexing decodes (and memoises) one record; equality compares
    element-wise against any sequence.
    """

    __slots__ = ("_view", "_base", "_inner", "_width", "_count", "_memo")

    def __init__(self, view: OffsetView, base: int, inner: Extractor, width: int, count: int):
        self._view = view
        self._base = base
        self._inner = inner
        self._width = width
        self._count = count
        self._memo: dict = {}

    def __len__(self) -> int:
        return self._count

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(self._count))]
        if i < 0:
            i += self._count
        if not 0 <= i < self._count:
            raise IndexError(i)
        if i not in self._memo:
            value, _ = self._inner(self._view, self._base + i * self._width)
            self._memo[i] = value
        return self._memo[i]

    def __eq__(self, other):
        if not isinstance(other, Sequence) or isinstance(other, (str, bytes)):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None

    def __repr__(self):
        return repr(list(self))
