"""Byte-buffer primitives: an immutable input window and (offset, length) spans.

All scanning works on raw bytes. The structural XML delimiters (``<``, ``>``,
``"``, ``=``, ``/``) are single-byte ASCII and can never occur inside a
multi-byte UTF-8 sequence, so byte-level scanning is encoding-safe for UTF-8
input. Spans are plain integer windows; nothing is copied until a span is
materialised with :meth:`InputBuffer.view`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

_WHITESPACE = b" \t\r\n"


class NulByteError(ValueError):
    """The input contained a 0x00 payload byte (illegal in XML text)."""

    def __init__(self, position: int):
        super().__init__(f"embedded NUL byte at offset {position}")
        self.position = position


@dataclass(frozen=True, slots=True)
class ByteSpan:
    """A (start, length) window into an :class:`InputBuffer`.

    The span itself is zero-copy; it only becomes bytes when materialised
    against its buffer.
    """

    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length


@dataclass(frozen=True, slots=True)
class InputBuffer:
    """Immutable byte input for the scanners.

    When ``terminated`` is true, ``data[logical_len]`` is a 0x00 sentinel so
    scanning loops can stop on the sentinel instead of checking bounds. The
    sentinel is not part of the payload; ``logical_len`` excludes it.
    """

    data: bytes
    logical_len: int
    terminated: bool

    def byte_at(self, i: int) -> int:
        """Byte at position ``i``; position ``logical_len`` is legal only on a
        terminated buffer (it yields the sentinel)."""
        if i < 0:
            raise IndexError(f"negative buffer index {i}")
        return self.data[i]

    def find_from(self, target: int, i: int) -> Optional[int]:
        """Smallest ``j >= i`` with ``byte_at(j) == target``, searching the
        payload only (the sentinel is never reported)."""
        j = self.data.find(target, i, self.logical_len)
        return None if j < 0 else j

    def slice(self, start: int, end: int) -> ByteSpan:
        """Span covering payload bytes ``[start, end)``."""
        if not 0 <= start <= end <= self.logical_len:
            raise ValueError(
                f"slice [{start}, {end}) out of range for buffer of {self.logical_len} bytes"
            )
        return ByteSpan(start, end - start)

    def view(self, span: ByteSpan) -> bytes:
        """Materialise a span as bytes (the only copying operation)."""
        return self.data[span.start : span.start + span.length]

    def text(self, span: ByteSpan) -> str:
        return self.view(span).decode("utf-8")


def terminate(payload: bytes) -> InputBuffer:
    """Wrap ``payload`` with an appended 0x00 sentinel.

    Rejects payloads containing NUL bytes: the sentinel must be the unique
    zero so scanning loops can rely on it.
    """
    pos = payload.find(0)
    if pos >= 0:
        raise NulByteError(pos)
    return InputBuffer(payload + b"\x00", len(payload), True)


def wrap(payload: bytes) -> InputBuffer:
    """Wrap ``payload`` without a sentinel (bounds-checked scanning mode)."""
    return InputBuffer(payload, len(payload), False)
