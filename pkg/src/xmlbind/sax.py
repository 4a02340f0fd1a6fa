"""Event-based XML scanner in the SAX style.

A single forward pass over the byte buffer fires six callbacks at structural
points, each receiving zero-copy :class:`~xmlbind.buffer.ByteSpan` arguments.
XML declarations, comments, processing instructions and DOCTYPE are skipped
without callbacks; entity references pass through verbatim inside text spans.

Any callback may abort the scan by returning a truthy value; the scan then
stops and returns ``False`` (aborted) instead of ``True`` (ran to end).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .buffer import ByteSpan, InputBuffer

_WS = b" \t\r\n"
_LT = 0x3C  # <
_GT = 0x3E  # >
_SLASH = 0x2F
_EQ = 0x3D
_DQ = 0x22
_SQ = 0x27
_QM = 0x3F
_BANG = 0x21
_LBRACK = 0x5B
_RBRACK = 0x5D

# bytes that end a tag or attribute name
_NAME_END = frozenset(b" \t\r\n/>=")

UNCLOSED_TAG = "unclosed-tag"
BAD_ATTRIBUTE_SYNTAX = "bad-attribute-syntax"
UNEXPECTED_EOF = "unexpected-eof"
MALFORMED_MARKUP = "malformed-markup"


class ScanError(Exception):
    """Structural scan failure at a byte position."""

    def __init__(self, kind: str, position: int, expected: Optional[str] = None):
        msg = f"{kind} at byte {position}"
        if expected is not None:
            msg += f" (expected {expected!r})"
        super().__init__(msg)
        self.kind = kind
        self.position = position
        self.expected = expected


def _ignore(*_args) -> None:
    return None


def _close_of(buf: InputBuffer, name: ByteSpan) -> str:
    return "</%s>" % buf.view(name).decode("utf-8", "replace")


@dataclass
class SaxHandlers:
    """Callback record driving the scanner.

    The default instance does nothing, so callers override only the events
    they care about. Callbacks return a truthy value to abort the scan.
    """

    on_open: Callable[[ByteSpan], object] = _ignore
    on_attr: Callable[[ByteSpan, ByteSpan], object] = _ignore
    on_end_open: Callable[[ByteSpan], object] = _ignore
    on_text: Callable[[ByteSpan], object] = _ignore
    on_close: Callable[[ByteSpan], object] = _ignore
    on_cdata: Callable[[ByteSpan], object] = _ignore


class ScanStats:
    """Instrumentation for tests: counts byte visits and the largest index
    touched. ``max_index`` never exceeding ``logical_len`` shows the scanner
    stays at or below the sentinel."""

    __slots__ = ("visits", "max_index")

    def __init__(self):
        self.visits = 0
        self.max_index = -1

    def span(self, lo: int, hi: int) -> None:
        self.visits += max(0, hi - lo)
        if hi - 1 > self.max_index:
            self.max_index = hi - 1

    def probe(self, i: int) -> None:
        self.visits += 1
        if i > self.max_index:
            self.max_index = i


def scan(buf: InputBuffer, handlers: SaxHandlers, *, stats: Optional[ScanStats] = None) -> bool:
    """Scan ``buf`` strictly, firing callbacks in document order.

    Returns ``True`` when the whole buffer was consumed, ``False`` when a
    callback aborted. Raises :class:`ScanError` on structurally broken markup.
    """
    return _scan(buf, handlers, lenient=False, stats=stats)


def scan_html_lenient(
    buf: InputBuffer, handlers: SaxHandlers, *, stats: Optional[ScanStats] = None
) -> bool:
    """Like :func:`scan`, but forgiving in the HTML style.

    Unclosed elements are auto-closed (synthetic ``on_close`` events,
    innermost first) when an ancestor's close tag or end of input is reached;
    stray close tags and unquoted attributes are skipped. Only truncated
    markup (EOF inside a tag) remains fatal.
    """
    return _scan(buf, handlers, lenient=True, stats=stats)


def _scan(buf: InputBuffer, h: SaxHandlers, lenient: bool, stats: Optional[ScanStats]) -> bool:
    data = buf.data
    n = buf.logical_len
    on_open = h.on_open
    on_attr = h.on_attr
    on_end_open = h.on_end_open
    on_text = h.on_text
    on_close = h.on_close
    on_cdata = h.on_cdata
    # skip span creation and dispatch entirely for default no-op callbacks
    fire_open = on_open is not _ignore
    fire_attr = on_attr is not _ignore
    fire_end_open = on_end_open is not _ignore
    fire_text = on_text is not _ignore
    fire_close = on_close is not _ignore
    fire_cdata = on_cdata is not _ignore
    # spans of currently open element names
    stack: list[ByteSpan] = []
    i = 0

    while True:
        lt = data.find(_LT, i, n)
        if stats:
            stats.span(i, (lt + 1) if lt >= 0 else n)
        if lt < 0:
            if fire_text and i < n:
                if on_text(ByteSpan(i, n - i)):
                    return False
            break
        if fire_text and lt > i:
            if on_text(ByteSpan(i, lt - i)):
                return False

        if lt + 1 >= n:
            raise ScanError(UNEXPECTED_EOF, n, ">")
        c = data[lt + 1]
        if stats:
            stats.probe(lt + 1)

        if c == _QM:  # processing instruction / XML declaration
            end = data.find(b"?>", lt + 2, n)
            if stats:
                stats.span(lt + 2, (end + 2) if end >= 0 else n)
            if end < 0:
                raise ScanError(UNEXPECTED_EOF, n, "?>")
            i = end + 2
            continue

        if c == _BANG:
            if data[lt + 2 : lt + 4] == b"--":  # comment
                if stats:
                    stats.span(lt + 2, lt + 4)
                end = data.find(b"-->", lt + 4, n)
                if stats:
                    stats.span(lt + 4, (end + 3) if end >= 0 else n)
                if end < 0:
                    raise ScanError(UNEXPECTED_EOF, n, "-->")
                i = end + 3
                continue
            if data[lt + 2 : lt + 9] == b"[CDATA[":
                if stats:
                    stats.span(lt + 2, lt + 9)
                end = data.find(b"]]>", lt + 9, n)
                if stats:
                    stats.span(lt + 9, (end + 3) if end >= 0 else n)
                if end < 0:
                    raise ScanError(UNEXPECTED_EOF, n, "]]>")
                if fire_cdata and on_cdata(ByteSpan(lt + 9, end - (lt + 9))):
                    return False
                i = end + 3
                continue
            # DOCTYPE or other <!...> declaration; mind an internal [...] subset
            gt = data.find(_GT, lt + 2, n)
            br = data.find(_LBRACK, lt + 2, gt if gt >= 0 else n)
            if br >= 0:
                close = data.find(_RBRACK, br + 1, n)
                if stats:
                    stats.span(lt + 2, (close + 1) if close >= 0 else n)
                if close < 0:
                    raise ScanError(UNEXPECTED_EOF, n, "]")
                gt = data.find(_GT, close + 1, n)
            if stats:
                stats.span(lt + 2, (gt + 1) if gt >= 0 else n)
            if gt < 0:
                raise ScanError(UNEXPECTED_EOF, n, ">")
            i = gt + 1
            continue

        if c == _SLASH:  # close tag
            j = lt + 2
            k = j
            while k < n and data[k] not in _NAME_END:
                k += 1
            if stats:
                stats.span(j, k + 1)
            if k == j:
                if lenient:
                    i = k
                    continue
                raise ScanError(MALFORMED_MARKUP, j, "tag name")
            name = ByteSpan(j, k - j)
            while k < n and data[k] in _WS:
                k += 1
                if stats:
                    stats.probe(k)
            if k >= n:
                raise ScanError(UNEXPECTED_EOF, n, ">")
            if data[k] != _GT:
                if not lenient:
                    raise ScanError(MALFORMED_MARKUP, k, ">")
                gt = data.find(_GT, k, n)
                if gt < 0:
                    raise ScanError(UNEXPECTED_EOF, n, ">")
                k = gt
            i = k + 1
            if stack and buf.view(stack[-1]) == buf.view(name):
                stack.pop()
                if fire_close and on_close(name):
                    return False
                continue
            if not lenient:
                if stack:
                    raise ScanError(UNCLOSED_TAG, name.start, _close_of(buf, stack[-1]))
                raise ScanError(MALFORMED_MARKUP, name.start, None)
            # lenient: close the nearest matching ancestor, auto-closing the
            # elements inside it (innermost first); stray closes are skipped
            want = buf.view(name)
            for depth in range(len(stack) - 1, -1, -1):
                if buf.view(stack[depth]) == want:
                    while len(stack) - 1 > depth:
                        if on_close(stack.pop()):
                            return False
                    stack.pop()
                    if on_close(name):
                        return False
                    break
            continue

        # open tag
        j = lt + 1
        k = j
        while k < n and data[k] not in _NAME_END:
            k += 1
        if stats:
            stats.span(j, k + 1)
        if k == j:
            if lenient:  # stray '<' treated as text
                if on_text(ByteSpan(lt, 1)):
                    return False
                i = lt + 1
                continue
            raise ScanError(MALFORMED_MARKUP, j, "tag name")
        name = ByteSpan(j, k - j)
        if fire_open and on_open(name):
            return False
        stack.append(name)

        # attributes until '>' or '/>'
        pos = k
        closed = False
        while True:
            while pos < n and data[pos] in _WS:
                pos += 1
                if stats:
                    stats.probe(pos)
            if pos >= n:
                raise ScanError(UNEXPECTED_EOF, n, ">")
            b = data[pos]
            if stats:
                stats.probe(pos)
            if b == _GT:
                pos += 1
                break
            if b == _SLASH:
                if pos + 1 >= n:
                    raise ScanError(UNEXPECTED_EOF, n, ">")
                if data[pos + 1] != _GT:
                    if lenient:
                        pos += 1
                        continue
                    raise ScanError(MALFORMED_MARKUP, pos + 1, ">")
                pos += 2
                closed = True
                break
            # attribute name
            a = pos
            while pos < n and data[pos] not in _NAME_END:
                pos += 1
            if stats:
                stats.span(a, pos + 1)
            if pos == a:
                if lenient:
                    pos += 1
                    continue
                raise ScanError(BAD_ATTRIBUTE_SYNTAX, pos, "attribute name")
            key = ByteSpan(a, pos - a)
            while pos < n and data[pos] in _WS:
                pos += 1
                if stats:
                    stats.probe(pos)
            if pos >= n:
                raise ScanError(UNEXPECTED_EOF, n, "=")
            if data[pos] != _EQ:
                if lenient:  # bare attribute without value: skip it
                    continue
                raise ScanError(BAD_ATTRIBUTE_SYNTAX, pos, "=")
            pos += 1
            while pos < n and data[pos] in _WS:
                pos += 1
                if stats:
                    stats.probe(pos)
            if pos >= n:
                raise ScanError(UNEXPECTED_EOF, n, '"')
            q = data[pos]
            if stats:
                stats.probe(pos)
            if q != _DQ and q != _SQ:
                if lenient:  # unquoted value: skip the token, no callback
                    while pos < n and data[pos] not in _NAME_END:
                        pos += 1
                    continue
                raise ScanError(BAD_ATTRIBUTE_SYNTAX, pos, '"')
            vend = data.find(q, pos + 1, n)
            if stats:
                stats.span(pos + 1, (vend + 1) if vend >= 0 else n)
            if vend < 0:
                raise ScanError(UNEXPECTED_EOF, n, chr(q))
            if fire_attr and on_attr(key, ByteSpan(pos + 1, vend - pos - 1)):
                return False
            pos = vend + 1

        if fire_end_open and on_end_open(name):
            return False
        if closed:
            stack.pop()
            if fire_close and on_close(name):
                return False
        i = pos

    # end of input
    if stack:
        if not lenient:
            top = stack[-1]
            raise ScanError(UNCLOSED_TAG, n, _close_of(buf, top))
        while stack:
            name = stack.pop()
            if fire_close and on_close(name):
                return False
    return True
