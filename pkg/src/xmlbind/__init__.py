"""Schema-driven XML parser generator.

Reads an XML Schema subset, maps it onto flat algebraic data types, and emits
a two-phase parser module (scan to an offset array, then lazy typed
extraction). The zero-copy SAX scanner and the offset-array DOM are reusable
on their own for schema-less work.
"""

__version__ = "0.1.0"

from .buffer import ByteSpan, InputBuffer, terminate, wrap
from .dom import NodeRef, all_nodes, parse_dom
from .sax import SaxHandlers, ScanError, scan, scan_html_lenient

__all__ = [
    "ByteSpan",
    "InputBuffer",
    "NodeRef",
    "SaxHandlers",
    "ScanError",
    "all_nodes",
    "parse_dom",
    "scan",
    "scan_html_lenient",
    "terminate",
    "wrap",
    "__version__",
]
