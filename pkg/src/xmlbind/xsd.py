"""Intermediate representation of the supported XML Schema subset.

The whole schema is one environment: a map from type name to definition plus
the elements allowed at the document root. Group definitions live in the same
map (wrapped in an attribute-less complex type), so every name resolves
through one dictionary. Namespaces are recorded but never used for matching;
names match on their local part.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple, Union


class Builtin(Enum):
    INT = "int"
    TEXT = "text"
    DATE = "date"
    DATETIME = "datetime"
    BOOLEAN = "boolean"
    FLOAT = "float"


# XSD builtin local names -> target scalar kind
_BUILTIN_MAP = {
    "int": Builtin.INT,
    "integer": Builtin.INT,
    "string": Builtin.TEXT,
    "token": Builtin.TEXT,
    "date": Builtin.DATE,
    "dateTime": Builtin.DATETIME,
    "boolean": Builtin.BOOLEAN,
    "decimal": Builtin.FLOAT,
    "double": Builtin.FLOAT,
    "float": Builtin.FLOAT,
}


class SchemaError(Exception):
    """Schema-level failure; ``problems`` lists every occurrence found."""

    def __init__(self, message: str, problems: Tuple["Problem", ...] = ()):
        if problems:
            message += "\n" + "\n".join(
                f"  at byte {p.position}: {p.construct}: {p.reason}" for p in problems
            )
        super().__init__(message)
        self.problems = problems


@dataclass(frozen=True, slots=True)
class Problem:
    position: int
    construct: str
    reason: str


# --- restriction kinds -------------------------------------------------------


@dataclass(frozen=True, slots=True)
class EnumValues:
    values: Tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise SchemaError("enumeration restriction with no values")
        if len(set(self.values)) != len(self.values):
            raise SchemaError(f"duplicate enumeration values in {self.values}")


@dataclass(frozen=True, slots=True)
class PatternFacet:
    regex: str  # kept opaque; never interpreted


@dataclass(frozen=True, slots=True)
class OtherFacet:
    description: str


RestrictionKind = Union[EnumValues, PatternFacet, OtherFacet]


# --- type definitions --------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Ref:
    name: str


@dataclass(frozen=True, slots=True)
class Restriction:
    base: str
    restricted: RestrictionKind


@dataclass(frozen=True, slots=True)
class Extension:
    base: str
    mixin: "Complex"


@dataclass(frozen=True, slots=True)
class BuiltinType:
    kind: Builtin


@dataclass(frozen=True, slots=True)
class AttrDecl:
    a_name: str
    a_type: "TypeDef"
    required: bool = False


@dataclass(frozen=True, slots=True)
class ElementDecl:
    e_name: str
    e_type: "TypeDef"
    min_occurs: int = 1
    max_occurs: Optional[int] = 1  # None = unbounded
    target_namespace: str = ""

    def __post_init__(self):
        if self.max_occurs is not None and self.min_occurs > self.max_occurs:
            raise SchemaError(
                f"element {self.e_name!r}: minOccurs {self.min_occurs} > maxOccurs {self.max_occurs}"
            )


@dataclass(frozen=True, slots=True)
class Seq:
    parts: Tuple["TyPart", ...]


@dataclass(frozen=True, slots=True)
class Choice:
    parts: Tuple["TyPart", ...]


@dataclass(frozen=True, slots=True)
class All:
    parts: Tuple["TyPart", ...]


@dataclass(frozen=True, slots=True)
class Group:
    name: str


@dataclass(frozen=True, slots=True)
class Elt:
    decl: ElementDecl


TyPart = Union[Seq, Choice, All, Group, Elt]


@dataclass(frozen=True, slots=True)
class Complex:
    mixed: bool
    attrs: Tuple[AttrDecl, ...]
    inner: Optional[TyPart]  # None: no element children


TypeDef = Union[Ref, Restriction, Extension, Complex, BuiltinType]


@dataclass(slots=True)
class Schema:
    types: Dict[str, TypeDef] = field(default_factory=dict)
    tops: List[ElementDecl] = field(default_factory=list)
    # names in `types` that are group definitions (content fragments, not
    # standalone types); they resolve through the same map
    group_names: Set[str] = field(default_factory=set)


def lookup_builtin(name: str) -> Optional[BuiltinType]:
    """Map an ``xs:``-style name to a builtin scalar, if it is one.

    Unknown prefixed builtins degrade to text with a warning; unprefixed
    unknown names return None (they must resolve through the schema).
    """
    prefix, _, local = name.rpartition(":")
    kind = _BUILTIN_MAP.get(local)
    if kind is not None:
        return BuiltinType(kind)
    if prefix:
        warnings.warn(f"unknown builtin type {name!r}; treating as text", stacklevel=2)
        return BuiltinType(Builtin.TEXT)
    return None


def resolve(schema: Schema, name: str) -> TypeDef:
    """Follow Ref chains from ``name`` to a non-Ref definition.

    Raises :class:`SchemaError` for unknown names and reference cycles (the
    cycle path is reported).
    """
    seen: list[str] = []
    current = name
    while True:
        if current in seen:
            cycle = seen[seen.index(current) :]
            raise SchemaError(f"type reference cycle: {' -> '.join(cycle + [current])}")
        seen.append(current)
        ty = schema.types.get(current)
        if ty is None:
            local = current.rpartition(":")[2]
            ty = schema.types.get(local)
        if ty is None:
            builtin = lookup_builtin(current)
            if builtin is not None:
                return builtin
            raise SchemaError(f"unknown type name {current!r}")
        if isinstance(ty, Ref):
            current = ty.name
            continue
        return ty


def unresolved_names(schema: Schema) -> List[str]:
    """Every referenced name that does not resolve, in first-use order."""
    out: list[str] = []
    seen: set[str] = set()

    def check(name: str):
        if name in seen:
            return
        seen.add(name)
        try:
            resolve(schema, name)
        except SchemaError:
            out.append(name)

    def walk_part(part: TyPart):
        if isinstance(part, (Seq, Choice, All)):
            for p in part.parts:
                walk_part(p)
        elif isinstance(part, Group):
            check(part.name)
        elif isinstance(part, Elt):
            walk_type(part.decl.e_type)

    def walk_type(ty: TypeDef):
        if isinstance(ty, Ref):
            check(ty.name)
        elif isinstance(ty, Restriction):
            check(ty.base)
        elif isinstance(ty, Extension):
            check(ty.base)
            walk_type(ty.mixin)
        elif isinstance(ty, Complex):
            for attr in ty.attrs:
                walk_type(attr.a_type)
            if ty.inner is not None:
                walk_part(ty.inner)

    for ty in schema.types.values():
        walk_type(ty)
    for top in schema.tops:
        walk_type(top.e_type)
    return out
