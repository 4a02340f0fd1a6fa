"""Shared fixtures and oracles for the test suite."""

from __future__ import annotations

import datetime
import importlib.util
import sys
from collections import Counter

from xmlbind import dom
from xmlbind.buffer import InputBuffer, terminate
from xmlbind.codegen import generate
from xmlbind.flatten import plan
from xmlbind.sax import SaxHandlers, scan, scan_html_lenient
from xmlbind.xsd_parse import parse_schema

USER_XSD = b"""<xs:schema
  xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:element name='users'>
    <xs:complexType>
      <xs:sequence>
        <xs:element name="user" type="UserType"
                    minOccurs="0"
                    maxOccurs="unbounded"/>
      </xs:sequence>
    </xs:complexType>
  </xs:element>

  <xs:complexType name="UserType" mixed="false">
    <xs:sequence>
      <xs:element name="uid"  type="xs:int"/>
      <xs:element name="name" type="xs:string"/>
      <xs:element name="bday" type="xs:date"
                              minOccurs="0"/>
    </xs:sequence>
  </xs:complexType>
</xs:schema>
"""

USERS_DOC = b"""<?xml version="1.0" encoding="utf-8"?>
<users> <user>
            <uid>123</uid>
            <name>John</name>
            <bday>1990-11-12</bday>
        </user>
</users>"""

PERSON_XSD = b"""<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:element name="person">
    <xs:sequence>
      <xs:element name="firstName"
                  minOccurs="1" maxOccurs="1"/>
      <xs:element name="lastName"
                  minOccurs="1" maxOccurs="1"/>
      <xs:choice>
        <xs:element name="residentialAddress"
                    minOccurs="1"
                    maxOccurs="unbounded"/>
        <xs:element name="phoneNumber"
                    minOccurs="1"
                    maxOccurs="unbounded"/>
        <xs:element name="imName"/>
      </xs:choice>
    </xs:sequence>
  </xs:element>
</xs:schema>
"""

# Two-user document laid out so the recorded spans land at the published
# offsets: "42"@50, "John"@71, "1990-11-12"@95, "777"@147, "Lucky"@169.
TRACE_DOC = (
    b'<?xml version="1.0"?>\n'
    b"<users>\n"
    b"  <user>\n"
    b"      <uid>42</uid>\n"
    b"      <name>John</name>\n"
    b"      <bday>1990-11-12</bday>\n"
    b"      </user>\n"
    b"  <user>\n"
    b"      <uid>777</uid>\n"
    b"      <name>Lucky</name>\n"
    b"  </user>\n"
    b"</users>"
)

TRACE_CELLS = [2, 50, 2, 71, 4, 95, 10, 147, 3, 169, 5, 0, 0]


def collect_events(buf: InputBuffer, lenient: bool = False, stats=None):
    """Scan and return materialised (kind, *payload bytes) event tuples."""
    events = []
    handlers = SaxHandlers(
        on_open=lambda s: events.append(("open", buf.view(s))),
        on_attr=lambda k, v: events.append(("attr", buf.view(k), buf.view(v))),
        on_end_open=lambda s: events.append(("end_open", buf.view(s))),
        on_text=lambda s: events.append(("text", buf.view(s))),
        on_close=lambda s: events.append(("close", buf.view(s))),
        on_cdata=lambda s: events.append(("cdata", buf.view(s))),
    )
    fn = scan_html_lenient if lenient else scan
    completed = fn(buf, handlers, stats=stats)
    return events, completed


def render_events(events) -> bytes:
    """Serialise an event stream back to markup."""
    out = bytearray()
    for ev in events:
        kind = ev[0]
        if kind == "open":
            out += b"<" + ev[1]
        elif kind == "attr":
            out += b" " + ev[1] + b'="' + ev[2] + b'"'
        elif kind == "end_open":
            out += b">"
        elif kind == "text":
            out += ev[1]
        elif kind == "close":
            out += b"</" + ev[1] + b">"
        elif kind == "cdata":
            out += b"<![CDATA[" + ev[1] + b"]]>"
    return bytes(out)


def build_module(xsd: bytes, tmp_path, name: str = "generated_binding"):
    """Generate a binding module from schema bytes and import it."""
    schema = parse_schema(terminate(xsd))
    module = generate(plan(schema))
    path = tmp_path / f"{name}.py"
    path.write_text(module.source_text)
    spec = importlib.util.spec_from_file_location(name, path)
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod  # dataclasses resolve string annotations here
    spec.loader.exec_module(mod)
    return mod


def dom_users_oracle(doc: bytes, mod):
    """Recover the users document's typed values by naive DOM traversal."""
    root = dom.parse_dom(terminate(doc))
    assert root.name_bytes() == b"users"
    users = []
    for child in root.children():
        assert child.name_bytes() == b"user"
        fields = {c.name_bytes(): c.text() for c in child.children()}
        bday = (
            datetime.date.fromisoformat(fields[b"bday"].decode())
            if b"bday" in fields
            else None
        )
        users.append(
            mod.User(
                uid=int(fields[b"uid"]),
                name=fields[b"name"].decode(),
                bday=bday,
            )
        )
    return mod.Users(user=users)


def event_multiset(events) -> Counter:
    return Counter(ev for ev in events if ev[0] in ("open", "attr", "text", "close"))
