"""Schema-less document tree backed by a flat offset array.

One SAX pass appends integer cells to a single array; every "pointer" is
either an offset into the immutable input or a cell offset within the array
itself, so the finished index is position-independent and safe to copy or
share.

Node record layout (all values are array cells)::

    [name_ofs, name_len, attr_count,
     (key_ofs, key_len, val_ofs, val_len) * attr_count,
     child_list_ofs, text_list_ofs]

``child_list_ofs`` points at ``[count, node_record_ofs * count]`` and
``text_list_ofs`` at ``[count, (text_ofs, text_len) * count]``; both lists are
appended when the element closes, which keeps the builder single-pass.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .buffer import ByteSpan, InputBuffer
from .sax import MALFORMED_MARKUP, SaxHandlers, ScanError, scan


@dataclass(frozen=True, slots=True)
class DomIndex:
    """The finished offset array plus the input it points into."""

    input: InputBuffer
    cells: array
    root_cell: int


@dataclass(frozen=True, slots=True)
class NodeRef:
    """Reference to one node record inside a :class:`DomIndex`."""

    index: DomIndex
    cell: int

    def name(self) -> ByteSpan:
        c = self.index.cells
        return ByteSpan(c[self.cell], c[self.cell + 1])

    def name_bytes(self) -> bytes:
        return self.index.input.view(self.name())

    def attributes(self) -> List[Tuple[ByteSpan, ByteSpan]]:
        c = self.index.cells
        count = c[self.cell + 2]
        out = []
        p = self.cell + 3
        for _ in range(count):
            out.append((ByteSpan(c[p], c[p + 1]), ByteSpan(c[p + 2], c[p + 3])))
            p += 4
        return out

    def _lists_at(self) -> int:
        return self.cell + 3 + 4 * self.index.cells[self.cell + 2]

    def children(self) -> List["NodeRef"]:
        c = self.index.cells
        p = c[self._lists_at()]
        return [NodeRef(self.index, c[p + 1 + k]) for k in range(c[p])]

    def text_content(self) -> List[ByteSpan]:
        """Direct text children (including whitespace-only runs), in order."""
        c = self.index.cells
        p = c[self._lists_at() + 1]
        return [ByteSpan(c[p + 1 + 2 * k], c[p + 2 + 2 * k]) for k in range(c[p])]

    def text(self) -> bytes:
        """All direct text runs joined."""
        view = self.index.input.view
        return b"".join(view(s) for s in self.text_content())


def all_nodes(root: NodeRef) -> Iterator[NodeRef]:
    """Preorder traversal including ``root``."""
    work = [root]
    while work:
        node = work.pop()
        yield node
        work.extend(reversed(node.children()))


def parse_dom(buf: InputBuffer) -> NodeRef:
    """Build a :class:`DomIndex` in one SAX pass and return its root."""
    cells = array("q")
    extend = cells.extend
    # per open element: (record_cell, start in child_accum, start in text_accum);
    # the two accumulators are shared segment stacks, so a node costs one
    # tuple instead of two lists
    stack: list[tuple[int, int, int]] = []
    child_accum: list[int] = []
    text_accum: list[int] = []  # flattened (offset, length) pairs
    roots: list[int] = []
    first_extra_root: Optional[int] = None

    def on_open(name: ByteSpan):
        rec = len(cells)
        extend((name.start, name.length, 0))
        stack.append((rec, len(child_accum), len(text_accum)))

    def on_attr(key: ByteSpan, value: ByteSpan):
        rec = stack[-1][0]
        extend((key.start, key.length, value.start, value.length))
        cells[rec + 2] += 1

    def on_end_open(_name: ByteSpan):
        extend((0, 0))  # child/text list pointers, patched at close

    def on_text(span: ByteSpan):
        if stack:
            text_accum.append(span.start)
            text_accum.append(span.length)

    def on_close(name: ByteSpan):
        nonlocal first_extra_root
        rec, child_start, text_start = stack.pop()
        lists_at = rec + 3 + 4 * cells[rec + 2]
        p = len(cells)
        cells.append(len(child_accum) - child_start)
        extend(child_accum[child_start:])
        del child_accum[child_start:]
        cells[lists_at] = p
        p = len(cells)
        cells.append((len(text_accum) - text_start) // 2)
        extend(text_accum[text_start:])
        del text_accum[text_start:]
        cells[lists_at + 1] = p
        if stack:
            child_accum.append(rec)
        else:
            if roots and first_extra_root is None:
                first_extra_root = name.start
            roots.append(rec)

    handlers = SaxHandlers(
        on_open=on_open,
        on_attr=on_attr,
        on_end_open=on_end_open,
        on_text=on_text,
        on_close=on_close,
        on_cdata=on_text,
    )
    scan(buf, handlers)
    if not roots:
        raise ScanError(MALFORMED_MARKUP, buf.logical_len, "a root element")
    if len(roots) > 1:
        raise ScanError(MALFORMED_MARKUP, first_extra_root or 0, "a single root element")
    return NodeRef(DomIndex(buf, cells, roots[0]), roots[0])


def serialize(node: NodeRef, out: Optional[bytearray] = None) -> bytes:
    """Re-serialise a subtree.

    Text runs are emitted before child elements (the index does not retain
    their interleaving), so adjacent runs merge on a re-parse; the result is
    equivalent under (name, attributes, joined text, children) comparison.
    """
    buf = node.index.input
    sink = bytearray() if out is None else out
    sink += b"<" + buf.view(node.name())
    for key, value in node.attributes():
        raw = buf.view(value)
        quote = b'"' if b'"' not in raw else b"'"
        sink += b" " + buf.view(key) + b"=" + quote + raw + quote
    texts = node.text_content()
    children = node.children()
    if not texts and not children:
        sink += b"/>"
    else:
        sink += b">"
        for span in texts:
            sink += buf.view(span)
        for child in children:
            serialize(child, sink)
        sink += b"</" + buf.view(node.name()) + b">"
    return bytes(sink)
