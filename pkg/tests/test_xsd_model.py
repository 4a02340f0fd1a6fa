import pytest

from xmlbind.buffer import terminate
from xmlbind.xsd import (
    Builtin,
    BuiltinType,
    Complex,
    EnumValues,
    Ref,
    Schema,
    SchemaError,
    Seq,
    lookup_builtin,
    resolve,
    unresolved_names,
)
from xmlbind.xsd_parse import parse_schema

import helpers


def test_resolve_follows_ref_to_complex():
    schema = parse_schema(terminate(helpers.USER_XSD))
    ty = resolve(schema, "UserType")
    assert isinstance(ty, Complex)
    assert isinstance(ty.inner, Seq)
    assert [p.decl.e_name for p in ty.inner.parts] == ["uid", "name", "bday"]


def test_resolve_builtin():
    assert resolve(Schema(), "xs:int") == BuiltinType(Builtin.INT)


def test_resolve_ref_chain():
    schema = Schema(types={"a": Ref("b"), "b": Ref("xs:string")})
    assert resolve(schema, "a") == BuiltinType(Builtin.TEXT)


def test_resolve_cycle_reports_path():
    schema = Schema(types={"a": Ref("b"), "b": Ref("a")})
    with pytest.raises(SchemaError) as exc:
        resolve(schema, "a")
    assert "a" in str(exc.value) and "b" in str(exc.value)


def test_resolve_unknown_name():
    with pytest.raises(SchemaError):
        resolve(Schema(), "Missing")


@pytest.mark.parametrize(
    "name,kind",
    [
        ("xs:int", Builtin.INT),
        ("xs:integer", Builtin.INT),
        ("xs:string", Builtin.TEXT),
        ("xs:token", Builtin.TEXT),
        ("xs:date", Builtin.DATE),
        ("xs:dateTime", Builtin.DATETIME),
        ("xs:boolean", Builtin.BOOLEAN),
        ("xs:decimal", Builtin.FLOAT),
        ("xs:double", Builtin.FLOAT),
        ("xs:float", Builtin.FLOAT),
        ("xsd:int", Builtin.INT),  # prefix is irrelevant
    ],
)
def test_builtin_mapping(name, kind):
    assert lookup_builtin(name) == BuiltinType(kind)


def test_unknown_prefixed_builtin_degrades_to_text_with_warning():
    with pytest.warns(UserWarning, match="gYear"):
        assert lookup_builtin("xs:gYear") == BuiltinType(Builtin.TEXT)


def test_unprefixed_unknown_is_not_a_builtin():
    assert lookup_builtin("UserType") is None


def test_unresolved_names_reports_all():
    schema = Schema(types={"a": Ref("gone"), "b": Ref("also-gone")})
    assert set(unresolved_names(schema)) == {"gone", "also-gone"}
    assert unresolved_names(parse_schema(terminate(helpers.USER_XSD))) == []


def test_enum_values_reject_duplicates_and_empty():
    with pytest.raises(SchemaError):
        EnumValues(("A", "A"))
    with pytest.raises(SchemaError):
        EnumValues(())
