"""Read an XSD document into the schema IR.

Walks the offset-array DOM of the schema file. Element and attribute names
are matched on their local part only. Unsupported constructs (``xs:import``,
``xs:any``, element references, ...) fail fast, with every occurrence listed
in one :class:`~xmlbind.xsd.SchemaError`.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from . import dom
from .buffer import InputBuffer
from .xsd import (
    All,
    AttrDecl,
    Builtin,
    BuiltinType,
    Choice,
    Complex,
    Elt,
    EnumValues,
    ElementDecl,
    Group,
    OtherFacet,
    PatternFacet,
    Problem,
    Ref,
    Restriction,
    Extension,
    Schema,
    SchemaError,
    Seq,
    TyPart,
    lookup_builtin,
)

_TEXT = BuiltinType(Builtin.TEXT)

_UNSUPPORTED = {
    "import": "cross-document schemas are not supported",
    "include": "cross-document schemas are not supported",
    "redefine": "cross-document schemas are not supported",
    "any": "wildcard content is not supported",
    "anyAttribute": "wildcard attributes are not supported",
    "attributeGroup": "attribute groups are not supported",
    "key": "identity constraints are not supported",
    "unique": "identity constraints are not supported",
    "keyref": "identity constraints are not supported",
}

# documentation-only constructs carry no data and are skipped silently
_SKIPPED = {"annotation", "documentation", "appinfo", "notation"}


def parse_occurs(min_attr: Optional[str], max_attr: Optional[str]) -> Tuple[int, Optional[int]]:
    """Decode minOccurs/maxOccurs attribute strings; absent means (1, 1)."""
    if min_attr is None:
        lo = 1
    else:
        try:
            lo = int(min_attr)
        except ValueError:
            raise SchemaError(f"minOccurs is not numeric: {min_attr!r}") from None
        if lo < 0:
            raise SchemaError(f"minOccurs is negative: {min_attr!r}")
    if max_attr is None:
        hi: Optional[int] = 1
    elif max_attr == "unbounded":
        hi = None
    else:
        try:
            hi = int(max_attr)
        except ValueError:
            raise SchemaError(f"maxOccurs is not numeric: {max_attr!r}") from None
        if hi < 0:
            raise SchemaError(f"maxOccurs is negative: {max_attr!r}")
    if hi is not None and hi < lo:
        raise SchemaError(f"maxOccurs {hi} < minOccurs {lo}")
    return lo, hi


def parse_schema(buf: InputBuffer) -> Schema:
    """Parse an XSD document into a :class:`Schema`."""
    root = dom.parse_dom(buf)
    if _local(root.name_bytes()) != "schema":
        raise SchemaError(
            "not a schema document: root element is "
            + repr(root.name_bytes().decode("utf-8", "replace"))
        )
    try:
        return _SchemaReader(root).read()
    except UnicodeDecodeError as exc:
        raise SchemaError(f"schema is not valid UTF-8: {exc}") from None


def _local(name: bytes) -> str:
    return name.rpartition(b":")[2].decode()


class _SchemaReader:
    def __init__(self, root: dom.NodeRef):
        self.root = root
        self.schema = Schema()
        self.problems: List[Problem] = []
        self.target_namespace = self._attrs(root).get("targetNamespace", "")

    def read(self) -> Schema:
        for child in self.root.children():
            tag = _local(child.name_bytes())
            if tag == "element":
                decl = self._element(child)
                if decl is not None:
                    self.schema.tops.append(decl)
            elif tag == "complexType":
                self._named_type(child, self._complex_type(child))
            elif tag == "simpleType":
                self._named_type(child, self._simple_type(child))
            elif tag == "group":
                name = self._attrs(child).get("name")
                if name is None:
                    self._problem(child, "group", "top-level group needs a name")
                    continue
                inner = self._content_part(child)
                self.schema.types[name] = Complex(False, (), inner)
                self.schema.group_names.add(name)
            elif tag in _UNSUPPORTED:
                self._problem(child, f"xs:{tag}", _UNSUPPORTED[tag])
            elif tag in _SKIPPED:
                continue
            else:
                self._problem(child, f"xs:{tag}", "unsupported schema construct")
        if self.problems:
            raise SchemaError("unsupported schema constructs", tuple(self.problems))
        return self.schema

    # --- helpers -------------------------------------------------------------

    def _attrs(self, node: dom.NodeRef) -> Dict[str, str]:
        buf = node.index.input
        return {
            _local(buf.view(k)): buf.text(v) for k, v in node.attributes()
        }

    def _problem(self, node: dom.NodeRef, construct: str, reason: str):
        self.problems.append(Problem(node.name().start, construct, reason))

    def _named_type(self, node: dom.NodeRef, ty):
        name = self._attrs(node).get("name")
        if name is None:
            self._problem(node, "type", "top-level type needs a name")
            return
        if name in self.schema.types:
            self._problem(node, "type", f"duplicate type name {name!r}")
            return
        self.schema.types[name] = ty

    def _register_anonymous(self, base_name: str, ty) -> str:
        name = base_name
        k = 2
        while name in self.schema.types:
            name = f"{base_name}{k}"
            k += 1
        self.schema.types[name] = ty
        return name

    def _occurs(self, node: dom.NodeRef) -> Tuple[int, Optional[int]]:
        attrs = self._attrs(node)
        try:
            return parse_occurs(attrs.get("minOccurs"), attrs.get("maxOccurs"))
        except SchemaError as exc:
            self._problem(node, "occurs", str(exc))
            return 1, 1

    def _require_default_occurs(self, node: dom.NodeRef, construct: str):
        lo, hi = self._occurs(node)
        if (lo, hi) != (1, 1):
            self._problem(
                node, construct, "minOccurs/maxOccurs other than 1 is only supported on elements and choices"
            )

    # --- element -------------------------------------------------------------

    def _element(self, node: dom.NodeRef) -> Optional[ElementDecl]:
        attrs = self._attrs(node)
        if "ref" in attrs:
            self._problem(node, "xs:element", "element references are not supported")
            return None
        name = attrs.get("name")
        if name is None:
            self._problem(node, "xs:element", "element needs a name")
            return None
        lo, hi = self._occurs(node)
        e_type = self._element_type(node, attrs, name)
        return ElementDecl(
            e_name=name,
            e_type=e_type,
            min_occurs=lo,
            max_occurs=hi,
            target_namespace=self.target_namespace,
        )

    def _element_type(self, node: dom.NodeRef, attrs: Dict[str, str], name: str):
        if "type" in attrs:
            return Ref(attrs["type"])
        inline_part = None
        for child in node.children():
            tag = _local(child.name_bytes())
            if tag == "complexType":
                synth = self._register_anonymous(name, self._complex_type(child))
                return Ref(synth)
            if tag == "simpleType":
                synth = self._register_anonymous(name, self._simple_type(child))
                return Ref(synth)
            if tag in ("sequence", "choice", "all", "group"):
                # content model given without a complexType wrapper
                inline_part = self._ty_part(child)
        if inline_part is not None:
            synth = self._register_anonymous(name, Complex(False, (), inline_part))
            return Ref(synth)
        return _TEXT  # untyped elements carry text

    # --- complex types ---------------------------------------------------------

    def _flag_unsupported_children(self, node: dom.NodeRef):
        for child in node.children():
            tag = _local(child.name_bytes())
            if tag in _UNSUPPORTED:
                self._problem(child, f"xs:{tag}", _UNSUPPORTED[tag])

    def _complex_type(self, node: dom.NodeRef):
        attrs = self._attrs(node)
        mixed = attrs.get("mixed", "false") in ("true", "1")
        self._flag_unsupported_children(node)
        for child in node.children():
            tag = _local(child.name_bytes())
            if tag == "complexContent":
                return self._content_extension(child, mixed, simple=False)
            if tag == "simpleContent":
                return self._content_extension(child, mixed, simple=True)
        adecl = self._attr_decls(node)
        inner = self._content_part(node)
        return Complex(mixed, adecl, inner)

    def _content_extension(self, node: dom.NodeRef, mixed: bool, simple: bool):
        for child in node.children():
            tag = _local(child.name_bytes())
            if tag == "extension":
                base = self._attrs(child).get("base")
                if base is None:
                    self._problem(child, "xs:extension", "extension needs a base")
                    return Complex(mixed, (), None)
                self._flag_unsupported_children(child)
                inner = None if simple else self._content_part(child)
                return Extension(base, Complex(mixed, self._attr_decls(child), inner))
            if tag == "restriction":
                if simple:
                    base = self._attrs(child).get("base", "xs:string")
                    return self._restriction_of(child, base)
                self._problem(child, "xs:restriction", "complexContent restriction is not supported")
                return Complex(mixed, (), None)
        self._problem(node, _local(node.name_bytes()), "empty content model")
        return Complex(mixed, (), None)

    def _attr_decls(self, node: dom.NodeRef) -> Tuple[AttrDecl, ...]:
        out = []
        for child in node.children():
            if _local(child.name_bytes()) != "attribute":
                continue
            attrs = self._attrs(child)
            name = attrs.get("name")
            if name is None:
                self._problem(child, "xs:attribute", "attribute needs a name")
                continue
            if "type" in attrs:
                a_type = lookup_builtin(attrs["type"]) or Ref(attrs["type"])
            else:
                a_type = _TEXT
                for sub in child.children():
                    if _local(sub.name_bytes()) == "simpleType":
                        synth = self._register_anonymous(name, self._simple_type(sub))
                        a_type = Ref(synth)
            out.append(AttrDecl(name, a_type, attrs.get("use") == "required"))
        return tuple(out)

    def _content_part(self, node: dom.NodeRef) -> Optional[TyPart]:
        for child in node.children():
            if _local(child.name_bytes()) in ("sequence", "choice", "all", "group"):
                return self._ty_part(child)
        return None

    def _ty_part(self, node: dom.NodeRef) -> Optional[TyPart]:
        tag = _local(node.name_bytes())
        if tag == "element":
            decl = self._element(node)
            return Elt(decl) if decl is not None else None
        if tag == "group":
            ref = self._attrs(node).get("ref")
            if ref is None:
                self._problem(node, "xs:group", "group reference needs ref")
                return None
            self._require_default_occurs(node, "xs:group")
            return Group(ref.rpartition(":")[2])
        if tag in ("sequence", "choice", "all"):
            parts = []
            for child in node.children():
                sub = _local(child.name_bytes())
                if sub in _SKIPPED:
                    continue
                if sub in _UNSUPPORTED:
                    self._problem(child, f"xs:{sub}", _UNSUPPORTED[sub])
                    continue
                part = self._ty_part(child)
                if part is not None:
                    parts.append(part)
            if tag == "sequence":
                self._require_default_occurs(node, "xs:sequence")
                return Seq(tuple(parts)) if parts else None
            if tag == "all":
                self._require_default_occurs(node, "xs:all")
                return All(tuple(parts)) if parts else None
            # choice-level occurs fold exactly into each alternative: a
            # repeated choice is the same as repeatable alternatives once
            # flattened to a sum
            lo, hi = self._occurs(node)
            if (lo, hi) != (1, 1):
                parts = [self._fold_occurs(p, lo, hi, node) for p in parts]
                parts = [p for p in parts if p is not None]
            return Choice(tuple(parts)) if parts else None
        self._problem(node, f"xs:{tag}", "unsupported content construct")
        return None

    def _fold_occurs(self, part, lo, hi, node) -> Optional[TyPart]:
        if not isinstance(part, Elt):
            self._problem(node, "xs:choice", "occurs on a choice of non-elements is not supported")
            return part
        d = part.decl
        new_hi = None if (hi is None or d.max_occurs is None) else hi * d.max_occurs
        return Elt(
            ElementDecl(
                e_name=d.e_name,
                e_type=d.e_type,
                min_occurs=lo * d.min_occurs,
                max_occurs=new_hi,
                target_namespace=d.target_namespace,
            )
        )

    # --- simple types ----------------------------------------------------------

    def _simple_type(self, node: dom.NodeRef):
        for child in node.children():
            tag = _local(child.name_bytes())
            if tag == "restriction":
                base = self._attrs(child).get("base", "xs:string")
                return self._restriction_of(child, base)
            if tag in ("list", "union"):
                self._problem(child, f"xs:{tag}", "list/union simple types are not supported")
        return _TEXT

    def _restriction_of(self, node: dom.NodeRef, base: str):
        values = []
        pattern = None
        other = None
        for child in node.children():
            tag = _local(child.name_bytes())
            if tag == "enumeration":
                value = self._attrs(child).get("value")
                if value is not None:
                    values.append(value)
            elif tag == "pattern":
                pattern = self._attrs(child).get("value", "")
            elif tag in _SKIPPED:
                continue
            else:
                other = tag
        if values:
            if len(set(values)) != len(values):
                self._problem(node, "xs:enumeration", f"duplicate enumeration values: {values}")
                values = list(dict.fromkeys(values))
            return Restriction(base, EnumValues(tuple(values)))
        if pattern is not None:
            return Restriction(base, PatternFacet(pattern))
        return Restriction(base, OtherFacet(other or "unconstrained"))
