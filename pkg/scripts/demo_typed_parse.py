#!/usr/bin/env python3
"""End-to-end walkthrough: schema in, typed values out.

Generates a binding module from the bundled users schema, writes it next to
a sample document in a scratch directory, and parses the document three ways
(SAX, DOM, generated typed parser) so the layers can be compared.
"""

import importlib.util
import sys
import tempfile
from pathlib import Path

from xmlbind import SaxHandlers, all_nodes, parse_dom, scan, terminate
from xmlbind.bench import USER_SCHEMA_XSD
from xmlbind.codegen import generate
from xmlbind.flatten import generate_names, plan
from xmlbind.xsd_parse import parse_schema

DOC = b"""<?xml version="1.0" encoding="utf-8"?>
<users> <user>
            <uid>123</uid>
            <name>John</name>
            <bday>1990-11-12</bday>
        </user>
</users>"""


def main() -> int:
    buf = terminate(DOC)

    print("== SAX: count events ==")
    counts = {"open": 0, "text": 0}
    scan(
        buf,
        SaxHandlers(
            on_open=lambda s: counts.__setitem__("open", counts["open"] + 1),
            on_text=lambda s: counts.__setitem__("text", counts["text"] + 1),
        ),
    )
    print(counts)

    print("\n== DOM: all <name> nodes ==")
    root = parse_dom(buf)
    for node in all_nodes(root):
        if node.name_bytes().lower() == b"name":
            print(node.text().decode())

    print("\n== generated typed parser ==")
    module = generate(generate_names(plan(parse_schema(terminate(USER_SCHEMA_XSD)))))
    scratch = Path(tempfile.mkdtemp()) / "users_binding.py"
    scratch.write_text(module.source_text)
    spec = importlib.util.spec_from_file_location("users_binding", scratch)
    mod = importlib.util.module_from_spec(spec)
    sys.modules["users_binding"] = mod
    spec.loader.exec_module(mod)
    users = mod.parse(DOC)
    print(users)
    print("module written to", scratch)
    return 0


if __name__ == "__main__":
    sys.exit(main())
