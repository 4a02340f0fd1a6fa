import pytest

from xmlbind.buffer import terminate
from xmlbind.flatten import (
    AliasDecl,
    Cardinality,
    EnumDecl,
    FIELD_ATTRIBUTE,
    RecordDecl,
    SumDecl,
    TypeRef,
    dump_plan,
    generate_names,
    merge_extension,
    plan,
    plan_fingerprint,
    simplify_cardinality,
)
from xmlbind.xsd import (
    AttrDecl,
    Builtin,
    BuiltinType,
    Complex,
    Elt,
    ElementDecl,
    Extension,
    Schema,
    SchemaError,
    Seq,
)
from xmlbind.xsd_parse import parse_schema

import helpers


def plan_of(xsd: bytes):
    return generate_names(plan(parse_schema(terminate(xsd))))


def wrap_schema(body: bytes) -> bytes:
    return b'<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">' + body + b"</xs:schema>"


@pytest.mark.parametrize(
    "occurs,expected",
    [
        ((1, 1), Cardinality.SINGLE),
        ((0, 1), Cardinality.OPTIONAL),
        ((1, None), Cardinality.MANY),
        ((0, 5), Cardinality.MANY),
        ((0, None), Cardinality.MANY),
        ((2, 2), Cardinality.MANY),
    ],
)
def test_simplify_cardinality(occurs, expected):
    assert simplify_cardinality(*occurs) == expected


# --- merge_extension ------------------------------------------------------------


def _elt(name: str) -> Elt:
    return Elt(ElementDecl(name, BuiltinType(Builtin.TEXT)))


def _complex(attr_names=(), elts=()):
    attrs = tuple(AttrDecl(a, BuiltinType(Builtin.TEXT)) for a in attr_names)
    inner = Seq(tuple(_elt(e) for e in elts)) if elts else None
    return Complex(False, attrs, inner)


def test_merge_extension_concatenates_base_then_mixin():
    schema = Schema(types={"Base": _complex(("a",), ("x",))})
    ext = Extension("Base", _complex(("b",), ("y",)))
    merged = merge_extension(schema, ext)
    assert [a.a_name for a in merged.attrs] == ["a", "b"]
    assert isinstance(merged.inner, Seq)
    names = []

    def collect(part):
        if isinstance(part, Seq):
            for p in part.parts:
                collect(p)
        else:
            names.append(part.decl.e_name)

    collect(merged.inner)
    assert names == ["x", "y"]  # base fields exactly once, base first


def test_merge_extension_identity():
    base = _complex(("a",), ("x",))
    schema = Schema(types={"Base": base})
    merged = merge_extension(schema, Extension("Base", _complex()))
    assert merged.attrs == base.attrs
    assert merged.inner == base.inner


def test_merge_extension_attr_collision():
    schema = Schema(types={"Base": _complex(("dup",))})
    with pytest.raises(SchemaError, match="dup"):
        merge_extension(schema, Extension("Base", _complex(("dup",))))


def test_merge_extension_base_must_be_complex():
    schema = Schema(types={"Base": BuiltinType(Builtin.TEXT)})
    with pytest.raises(SchemaError):
        merge_extension(schema, Extension("Base", _complex()))


def test_merge_extension_associative_over_chains():
    a = _complex(("a1",), ("ax",))
    schema = Schema(types={"A": a})
    b = Extension("A", _complex(("b1",), ("bx",)))
    schema.types["B"] = b
    c = Extension("B", _complex(("c1",), ("cx",)))

    # (A + B) + C : resolve B first, then extend with C
    left = merge_extension(schema, c)
    # A + (B + C) : pre-merge B into a plain complex, then extend with C
    schema2 = Schema(types={"A": a, "B": merge_extension(schema, b)})
    right = merge_extension(schema2, Extension("B", c.mixin))

    def flat_elts(part, acc):
        if part is None:
            return acc
        if isinstance(part, Seq):
            for p in part.parts:
                flat_elts(p, acc)
        else:
            acc.append(part.decl.e_name)
        return acc

    assert [x.a_name for x in left.attrs] == [x.a_name for x in right.attrs]
    assert flat_elts(left.inner, []) == flat_elts(right.inner, [])


# --- plan golden shapes -----------------------------------------------------------


def test_plan_user_schema_golden():
    p = plan_of(helpers.USER_XSD)
    user = p.decl("User")
    assert isinstance(user, RecordDecl)
    assert [(f.name, f.card, f.ref) for f in user.fields] == [
        ("uid", Cardinality.SINGLE, TypeRef("int", Builtin.INT)),
        ("name", Cardinality.SINGLE, TypeRef("text", Builtin.TEXT)),
        ("bday", Cardinality.OPTIONAL, TypeRef("date", Builtin.DATE)),
    ]
    users = p.decl("Users")
    assert [(f.name, f.card, f.ref.name) for f in users.fields] == [
        ("user", Cardinality.MANY, "User")
    ]
    assert p.top == "Users" and p.top_xml_name == "users"


def test_plan_person_schema_golden():
    p = plan_of(helpers.PERSON_XSD)
    person = p.decl("Person")
    assert [(f.name, f.card, f.ref.name) for f in person.fields] == [
        ("firstName", Cardinality.SINGLE, "text"),
        ("lastName", Cardinality.SINGLE, "text"),
        ("residentialAddressOr", Cardinality.MANY, "ResidentialAddressOr"),
    ]
    choice = p.decl("ResidentialAddressOr")
    assert isinstance(choice, SumDecl)
    assert [(c.name, c.payload) for c in choice.ctors] == [
        ("ResidentialAddress", TypeRef("text", Builtin.TEXT)),
        ("PhoneNumber", TypeRef("text", Builtin.TEXT)),
        ("ImName", TypeRef("text", Builtin.TEXT)),
    ]


def test_enum_restriction_becomes_enum_decl():
    p = plan_of(
        wrap_schema(
            b'<xs:simpleType name="Color"><xs:restriction base="xs:string">'
            b'<xs:enumeration value="A"/><xs:enumeration value="B"/>'
            b"</xs:restriction></xs:simpleType>"
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b'<xs:element name="c" type="Color"/>'
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    color = p.decl("Color")
    assert isinstance(color, EnumDecl)
    assert color.members == (("a", "A"), ("b", "B"))


def test_non_enum_restriction_becomes_alias():
    p = plan_of(
        wrap_schema(
            b'<xs:simpleType name="Zip"><xs:restriction base="xs:string">'
            b'<xs:pattern value="[0-9]{5}"/></xs:restriction></xs:simpleType>'
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b'<xs:element name="z" type="Zip"/>'
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    assert p.decl("Zip") == AliasDecl("Zip", TypeRef("text", Builtin.TEXT))


def test_attributes_come_first_in_record():
    p = plan_of(
        wrap_schema(
            b'<xs:element name="r"><xs:complexType>'
            b"<xs:sequence>"
            b'<xs:element name="child" type="xs:int"/>'
            b"</xs:sequence>"
            b'<xs:attribute name="id" type="xs:int" use="required"/>'
            b'<xs:attribute name="note" type="xs:string"/>'
            b"</xs:complexType></xs:element>"
        )
    )
    rec = p.decl("R")
    assert [(f.name, f.kind, f.card) for f in rec.fields] == [
        ("id", FIELD_ATTRIBUTE, Cardinality.SINGLE),
        ("note", FIELD_ATTRIBUTE, Cardinality.OPTIONAL),
        ("child", "element", Cardinality.SINGLE),
    ]


def test_mixed_content_rejected():
    xsd = wrap_schema(
        b'<xs:complexType name="M" mixed="true"><xs:sequence>'
        b'<xs:element name="a" type="xs:string"/></xs:sequence></xs:complexType>'
        b'<xs:element name="r" type="M"/>'
    )
    with pytest.raises(SchemaError, match="mixed"):
        plan(parse_schema(terminate(xsd)))


def test_all_duplicate_names_rejected():
    xsd = wrap_schema(
        b'<xs:element name="r"><xs:complexType><xs:all>'
        b'<xs:element name="a" type="xs:int"/>'
        b'<xs:element name="a" type="xs:int"/>'
        b"</xs:all></xs:complexType></xs:element>"
    )
    with pytest.raises(SchemaError, match="duplicate"):
        plan(parse_schema(terminate(xsd)))


def test_nested_seq_inlines():
    p = plan_of(
        wrap_schema(
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b'<xs:element name="a" type="xs:int"/>'
            b"<xs:sequence>"
            b'<xs:element name="b" type="xs:int"/>'
            b'<xs:element name="c" type="xs:int"/>'
            b"</xs:sequence>"
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    assert [f.name for f in p.decl("R").fields] == ["a", "b", "c"]


def test_recursive_type_flagged():
    xsd = wrap_schema(
        b'<xs:complexType name="Node"><xs:sequence>'
        b'<xs:element name="child" type="Node" minOccurs="0"/>'
        b"</xs:sequence></xs:complexType>"
        b'<xs:element name="root" type="Node"/>'
    )
    p = generate_names(plan(parse_schema(terminate(xsd))))
    assert "Node" in p.recursive


# --- name generation --------------------------------------------------------------


def test_field_not_pluralised():
    p = plan_of(helpers.USER_XSD)
    assert [f.name for f in p.decl("Users").fields] == ["user"]


def test_camel_case_rule():
    p = plan_of(
        wrap_schema(
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b'<xs:element name="first-name" type="xs:string"/>'
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    assert [f.name for f in p.decl("R").fields] == ["firstName"]


def test_two_anonymous_choices_get_distinct_names():
    p = plan_of(
        wrap_schema(
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b"<xs:choice>"
            b'<xs:element name="alpha" type="xs:int"/>'
            b'<xs:element name="beta" type="xs:int"/>'
            b"</xs:choice>"
            b"<xs:choice>"
            b'<xs:element name="alpha" type="xs:int"/>'
            b'<xs:element name="gamma" type="xs:int"/>'
            b"</xs:choice>"
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    sums = [d.name for d in p.decls if isinstance(d, SumDecl)]
    assert len(sums) == 2 and len(set(sums)) == 2
    assert sums == ["AlphaOr", "AlphaOr2"]


def test_keyword_field_gets_suffix():
    p = plan_of(
        wrap_schema(
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b'<xs:element name="class" type="xs:string"/>'
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    assert [f.name for f in p.decl("R").fields] == ["class2"]


def test_type_suffix_stripped():
    p = plan_of(helpers.USER_XSD)
    names = {d.name for d in p.decls}
    assert "User" in names and "UserType" not in names


# --- plan invariants ---------------------------------------------------------------


def test_plan_deterministic_dump():
    a = dump_plan(plan_of(helpers.PERSON_XSD))
    b = dump_plan(plan_of(helpers.PERSON_XSD))
    assert a == b
    assert plan_fingerprint(plan_of(helpers.USER_XSD)) == plan_fingerprint(
        plan_of(helpers.USER_XSD)
    )


def _count_schema_elements(schema) -> int:
    from xmlbind.xsd import All, Choice, Elt, Seq

    count = 0

    def walk_part(part):
        nonlocal count
        if isinstance(part, (Seq, Choice, All)):
            for p in part.parts:
                walk_part(p)
        elif isinstance(part, Elt):
            count += 1

    for ty in schema.types.values():
        inner = getattr(ty, "inner", None)
        if inner is not None:
            walk_part(inner)
        mixin = getattr(ty, "mixin", None)
        if mixin is not None and mixin.inner is not None:
            walk_part(mixin.inner)
    count += len(schema.tops)
    return count


@pytest.mark.parametrize("xsd", [helpers.USER_XSD, helpers.PERSON_XSD])
def test_every_element_maps_to_exactly_one_plan_slot(xsd):
    schema = parse_schema(terminate(xsd))
    p = generate_names(plan(schema))
    mapped = 1  # the root declaration
    for decl in p.decls:
        if isinstance(decl, RecordDecl):
            mapped += sum(1 for f in decl.fields if f.kind == "element" and f.xml_name)
        elif isinstance(decl, SumDecl):
            mapped += len(decl.ctors)
    assert mapped == _count_schema_elements(schema)


@pytest.mark.parametrize("xsd", [helpers.USER_XSD, helpers.PERSON_XSD])
def test_topological_order(xsd):
    p = plan_of(xsd)
    seen = set()
    for decl in p.decls:
        refs = []
        if isinstance(decl, AliasDecl):
            refs = [decl.target]
        elif isinstance(decl, RecordDecl):
            refs = [f.ref for f in decl.fields]
        elif isinstance(decl, SumDecl):
            refs = [c.payload for c in decl.ctors if c.payload]
        for ref in refs:
            if ref.builtin is None and ref.name not in p.recursive:
                assert ref.name in seen
        seen.add(decl.name)


def test_group_inlines_without_standalone_decl():
    p = plan_of(
        wrap_schema(
            b'<xs:group name="core"><xs:sequence>'
            b'<xs:element name="x" type="xs:int"/>'
            b'<xs:element name="y" type="xs:string"/>'
            b"</xs:sequence></xs:group>"
            b'<xs:element name="r"><xs:complexType><xs:sequence>'
            b'<xs:element name="head" type="xs:string"/>'
            b'<xs:group ref="core"/>'
            b"</xs:sequence></xs:complexType></xs:element>"
        )
    )
    assert [f.name for f in p.decl("R").fields] == ["head", "x", "y"]
    assert {d.name for d in p.decls} == {"R"}  # no standalone group record
