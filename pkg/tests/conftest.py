from __future__ import annotations

import pytest
from hypothesis import strategies as st

from xmlbind.buffer import terminate

import helpers


@pytest.fixture
def users_buf():
    return terminate(helpers.USERS_DOC)


@pytest.fixture
def user_xsd_path(tmp_path):
    path = tmp_path / "user.xsd"
    path.write_bytes(helpers.USER_XSD)
    return path


# --- random well-formed document strategy --------------------------------------

_NAMES = st.text(alphabet="abcdefgh", min_size=1, max_size=5)
_TEXTS = st.text(alphabet=" \n\tazAZ09.,;&", min_size=1, max_size=12)
_ATTR_VALUES = st.text(alphabet=" azAZ09._-", max_size=8)


@st.composite
def xml_elements(draw, depth: int = 0):
    name = draw(_NAMES)
    attrs = draw(
        st.lists(st.tuples(_NAMES, _ATTR_VALUES), max_size=2, unique_by=lambda kv: kv[0])
    )
    if depth >= 3:
        kids = []
    else:
        kids = draw(
            st.lists(
                st.one_of(_TEXTS.map(lambda t: ("text", t)), xml_elements(depth + 1)),
                max_size=3,
            )
        )
    return ("elem", name, attrs, kids)


def render_tree(node) -> bytes:
    kind = node[0]
    if kind == "text":
        return node[1].encode()
    _, name, attrs, kids = node
    out = bytearray(b"<" + name.encode())
    for k, v in attrs:
        out += f' {k}="{v}"'.encode()
    if not kids:
        out += b"/>"
        return bytes(out)
    out += b">"
    for kid in kids:
        out += render_tree(kid)
    out += b"</" + name.encode() + b">"
    return bytes(out)


@st.composite
def xml_documents(draw) -> bytes:
    """A random well-formed, entity/comment-free document (single root)."""
    return render_tree(draw(xml_elements()))
