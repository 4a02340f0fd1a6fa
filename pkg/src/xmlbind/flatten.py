"""Map the schema IR onto flat target-type declarations.

Each schema type becomes an alias, an enum, a record, or a sum; choices
nested inside sequences are split out into their own sum declaration
referenced by a synthesized field; cardinalities collapse to
single/optional/many. The result is a :class:`FlatPlan`: an ordered list of
declarations (dependencies first) plus the root declaration name.

``plan`` produces raw names straight from the schema; ``generate_names``
rewrites them into valid, deterministic target-language identifiers.
"""

from __future__ import annotations

import hashlib
import keyword
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

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
    Extension,
    Group,
    Ref,
    Restriction,
    Schema,
    SchemaError,
    Seq,
    TyPart,
    lookup_builtin,
    resolve,
)


class Cardinality(Enum):
    SINGLE = "single"
    OPTIONAL = "optional"
    MANY = "many"


def simplify_cardinality(min_occurs: int, max_occurs: Optional[int]) -> Cardinality:
    """(1,1) is a single value, (0,1) an optional one, everything else a list."""
    if (min_occurs, max_occurs) == (1, 1):
        return Cardinality.SINGLE
    if (min_occurs, max_occurs) == (0, 1):
        return Cardinality.OPTIONAL
    return Cardinality.MANY


@dataclass(frozen=True, slots=True)
class TypeRef:
    """Reference to a plan declaration (by name) or a builtin scalar."""

    name: str
    builtin: Optional[Builtin] = None


FIELD_ELEMENT = "element"
FIELD_ATTRIBUTE = "attribute"
FIELD_CONTENT = "content"  # scalar text content of the element itself


@dataclass(frozen=True, slots=True)
class Field:
    name: str
    xml_name: str
    card: Cardinality
    ref: TypeRef
    kind: str = FIELD_ELEMENT


@dataclass(frozen=True, slots=True)
class Ctor:
    name: str
    xml_name: str
    payload: Optional[TypeRef]


@dataclass(frozen=True, slots=True)
class AliasDecl:
    name: str
    target: TypeRef


@dataclass(frozen=True, slots=True)
class RecordDecl:
    name: str
    fields: Tuple[Field, ...]
    all_group: bool = False  # children may arrive in any order


@dataclass(frozen=True, slots=True)
class SumDecl:
    name: str
    ctors: Tuple[Ctor, ...]


@dataclass(frozen=True, slots=True)
class EnumDecl:
    name: str
    members: Tuple[Tuple[str, str], ...]  # (constructor name, lexical value)


FlatDecl = Union[AliasDecl, RecordDecl, SumDecl, EnumDecl]


@dataclass(frozen=True, slots=True)
class FlatPlan:
    decls: Tuple[FlatDecl, ...]
    top: str
    top_xml_name: str
    recursive: Tuple[str, ...] = ()

    def decl(self, name: str) -> FlatDecl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)


def merge_extension(schema: Schema, ext: Extension) -> Complex:
    """Fold an extension into one complex type.

    Attributes are base's followed by the extension's; content is the base
    content followed by the extension content. Chained extensions merge
    recursively, so the fold is associative.
    """
    base_def = resolve(schema, ext.base)
    if isinstance(base_def, Extension):
        base_def = merge_extension(schema, base_def)
    if not isinstance(base_def, Complex):
        raise SchemaError(f"extension base {ext.base!r} does not resolve to a complex type")
    seen = {a.a_name for a in base_def.attrs}
    for attr in ext.mixin.attrs:
        if attr.a_name in seen:
            raise SchemaError(f"extension redefines attribute {attr.a_name!r} of base {ext.base!r}")
    parts = [p for p in (base_def.inner, ext.mixin.inner) if p is not None]
    if not parts:
        inner: Optional[TyPart] = None
    elif len(parts) == 1:
        inner = parts[0]
    else:
        inner = Seq(tuple(parts))
    return Complex(
        mixed=base_def.mixed or ext.mixin.mixed,
        attrs=base_def.attrs + ext.mixin.attrs,
        inner=inner,
    )


def plan(schema: Schema) -> FlatPlan:
    """Flatten ``schema`` into declarations with raw (schema-derived) names."""
    return _Planner(schema).run()


class _Planner:
    def __init__(self, schema: Schema):
        self.schema = schema
        self.decls: List[FlatDecl] = []
        self.done: Dict[str, TypeRef] = {}
        self.in_progress: Dict[str, str] = {}  # schema name -> planned decl name
        self.decl_names: set[str] = set()
        self.recursive: List[str] = []
        self.group_stack: List[str] = []

    def run(self) -> FlatPlan:
        if not self.schema.tops:
            raise SchemaError("schema declares no top-level elements")
        top_refs = [(top, self._ref_of(top.e_type)) for top in self.schema.tops]
        for name in list(self.schema.types):
            if name in self.schema.group_names and name not in self.done:
                continue  # unreferenced group definitions inline at use sites
            self._named(name)
        top, top_ref = top_refs[0]
        if top_ref.builtin is not None or isinstance(self._decl(top_ref.name), (AliasDecl, EnumDecl)):
            raise SchemaError(
                f"top-level element {top.e_name!r} has a scalar type; only record or choice roots are supported"
            )
        return FlatPlan(
            decls=tuple(self.decls),
            top=top_ref.name,
            top_xml_name=top.e_name,
            recursive=tuple(self.recursive),
        )

    def _decl(self, name: str) -> Optional[FlatDecl]:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def _emit(self, decl: FlatDecl):
        self.decls.append(decl)
        self.decl_names.add(decl.name)

    def _fresh_name(self, base: str) -> str:
        name = base
        k = 2
        while name in self.decl_names or name in self.in_progress.values():
            name = f"{base}{k}"
            k += 1
        return name

    # --- type handling ---------------------------------------------------------

    def _ref_of(self, ty) -> TypeRef:
        if isinstance(ty, BuiltinType):
            return TypeRef(ty.kind.value, ty.kind)
        if isinstance(ty, Ref):
            return self._named(ty.name)
        raise SchemaError(f"unexpected inline type {type(ty).__name__} (parser should have named it)")

    def _named(self, name: str) -> TypeRef:
        canonical = name if name in self.schema.types else name.rpartition(":")[2]
        if canonical not in self.schema.types:
            builtin = lookup_builtin(name)
            if builtin is not None:
                return TypeRef(builtin.kind.value, builtin.kind)
            raise SchemaError(f"unknown type name {name!r}")
        if canonical in self.done:
            return self.done[canonical]
        if canonical in self.in_progress:
            if canonical not in self.recursive:
                self.recursive.append(canonical)
            return TypeRef(self.in_progress[canonical])
        decl_name = self._fresh_name(canonical)
        self.in_progress[canonical] = decl_name
        try:
            ref = self._build(decl_name, self.schema.types[canonical])
        finally:
            del self.in_progress[canonical]
        self.done[canonical] = ref
        return ref

    def _build(self, decl_name: str, ty) -> TypeRef:
        if isinstance(ty, BuiltinType):
            self._emit(AliasDecl(decl_name, TypeRef(ty.kind.value, ty.kind)))
            return TypeRef(decl_name)
        if isinstance(ty, Ref):
            target = self._named(ty.name)
            self._emit(AliasDecl(decl_name, target))
            return TypeRef(decl_name)
        if isinstance(ty, Restriction):
            return self._build_restriction(decl_name, ty)
        if isinstance(ty, Extension):
            return self._build_extension(decl_name, ty)
        if isinstance(ty, Complex):
            return self._build_complex(decl_name, ty)
        raise SchemaError(f"cannot flatten {type(ty).__name__}")

    def _build_restriction(self, decl_name: str, ty: Restriction) -> TypeRef:
        if isinstance(ty.restricted, EnumValues):
            members = tuple((v, v) for v in ty.restricted.values)
            self._emit(EnumDecl(decl_name, members))
            return TypeRef(decl_name)
        # non-enum restrictions reduce to an alias of the base scalar
        base_ref = self._named(ty.base)
        self._emit(AliasDecl(decl_name, base_ref))
        return TypeRef(decl_name)

    def _build_extension(self, decl_name: str, ty: Extension) -> TypeRef:
        base_def = resolve(self.schema, ty.base)
        if isinstance(base_def, (Complex, Extension)):
            return self._build_complex(decl_name, merge_extension(self.schema, ty))
        # simple-content extension: attributes plus scalar text content
        value_ref = self._named(ty.base)
        fields = self._attr_fields(ty.mixin.attrs)
        fields.append(Field("value", "", Cardinality.SINGLE, value_ref, FIELD_CONTENT))
        self._emit(RecordDecl(decl_name, tuple(fields)))
        return TypeRef(decl_name)

    def _build_complex(self, decl_name: str, ty: Complex) -> TypeRef:
        if ty.mixed:
            raise SchemaError(f"type {decl_name!r}: mixed content is not supported")
        inner = ty.inner
        if isinstance(inner, Group):
            inner = self._group_inner(inner)
        if isinstance(inner, Choice) and not ty.attrs:
            self._emit(SumDecl(decl_name, self._ctors_of(inner)))
            return TypeRef(decl_name)
        fields = self._attr_fields(ty.attrs)
        all_group = isinstance(inner, All)
        if inner is not None:
            if all_group:
                names = [p.decl.e_name for p in inner.parts if isinstance(p, Elt)]
                dupes = {n for n in names if names.count(n) > 1}
                if dupes:
                    raise SchemaError(
                        f"type {decl_name!r}: duplicate element names in all group: {sorted(dupes)}"
                    )
                for part in inner.parts:
                    if not isinstance(part, Elt):
                        raise SchemaError(f"type {decl_name!r}: all groups may contain only elements")
                    fields.append(self._element_field(part.decl))
            else:
                fields.extend(self._walk_seq(inner))
        used = [f.name for f in fields]
        dupes = {n for n in used if used.count(n) > 1}
        if dupes:
            raise SchemaError(f"type {decl_name!r}: duplicate field names: {sorted(dupes)}")
        self._emit(RecordDecl(decl_name, tuple(fields), all_group=all_group))
        return TypeRef(decl_name)

    def _attr_fields(self, attrs: Tuple[AttrDecl, ...]) -> List[Field]:
        out = []
        for attr in attrs:
            ref = self._ref_of(attr.a_type)
            target = self._chase_alias(ref)
            if target.builtin is None and not isinstance(self._decl(target.name), EnumDecl):
                raise SchemaError(f"attribute {attr.a_name!r} must have a simple type")
            card = Cardinality.SINGLE if attr.required else Cardinality.OPTIONAL
            out.append(Field(attr.a_name, attr.a_name, card, ref, FIELD_ATTRIBUTE))
        return out

    def _chase_alias(self, ref: TypeRef) -> TypeRef:
        while ref.builtin is None:
            decl = self._decl(ref.name)
            if isinstance(decl, AliasDecl):
                ref = decl.target
            else:
                return ref
        return ref

    def _group_inner(self, group: Group) -> Optional[TyPart]:
        if group.name in self.group_stack:
            raise SchemaError(f"group reference cycle through {group.name!r}")
        target = resolve(self.schema, group.name)
        if not isinstance(target, Complex):
            raise SchemaError(f"group {group.name!r} does not resolve to a content group")
        return target.inner

    def _walk_seq(self, part: TyPart) -> List[Field]:
        if isinstance(part, Elt):
            return [self._element_field(part.decl)]
        if isinstance(part, Seq):
            out: List[Field] = []
            for p in part.parts:
                out.extend(self._walk_seq(p))
            return out
        if isinstance(part, Group):
            inner = self._group_inner(part)
            if inner is None:
                return []
            self.group_stack.append(part.name)
            try:
                return self._walk_seq(inner)
            finally:
                self.group_stack.pop()
        if isinstance(part, Choice):
            return [self._choice_field(part)]
        if isinstance(part, All):
            raise SchemaError("an all group may only appear as the whole content of a type")
        raise SchemaError(f"cannot flatten content part {type(part).__name__}")

    def _element_field(self, decl: ElementDecl) -> Field:
        ref = self._ref_of(decl.e_type)
        card = simplify_cardinality(decl.min_occurs, decl.max_occurs)
        return Field(decl.e_name, decl.e_name, card, ref)

    def _ctors_of(self, choice: Choice) -> Tuple[Ctor, ...]:
        ctors: List[Ctor] = []

        def add(parts):
            for p in parts:
                if isinstance(p, Choice):  # nested choice inlines into one sum
                    add(p.parts)
                elif isinstance(p, Elt):
                    ctors.append(Ctor(p.decl.e_name, p.decl.e_name, self._ref_of(p.decl.e_type)))
                else:
                    raise SchemaError(
                        f"choice alternatives must be elements, not {type(p).__name__}"
                    )

        add(choice.parts)
        if not ctors:
            raise SchemaError("choice with no alternatives")
        return tuple(ctors)

    def _choice_field(self, choice: Choice) -> Field:
        ctors = self._ctors_of(choice)
        sum_name = self._fresh_name(ctors[0].xml_name + "Or")
        self._emit(SumDecl(sum_name, ctors))
        lows, highs = self._elt_occurs(choice)
        lo = min(lows, default=1)
        hi = None if None in highs else max(highs, default=1)
        card = simplify_cardinality(lo, hi)
        return Field(sum_name, "", card, TypeRef(sum_name))

    def _elt_occurs(self, choice: Choice):
        lows: List[int] = []
        highs: List[Optional[int]] = []

        def walk(parts):
            for p in parts:
                if isinstance(p, Choice):
                    walk(p.parts)
                elif isinstance(p, Elt):
                    lows.append(p.decl.min_occurs)
                    highs.append(p.decl.max_occurs)

        walk(choice.parts)
        return lows, highs


# --- name generation ----------------------------------------------------------


def _runs(raw: str) -> List[str]:
    """Split a raw XML name into alphanumeric runs."""
    out, cur = [], []
    for ch in raw:
        if ch.isalnum():
            cur.append(ch)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out or ["x"]


def _pascal(raw: str) -> str:
    name = "".join(run[0].upper() + run[1:] for run in _runs(raw))
    if not name[0].isalpha():
        name = "X" + name
    return name


def _camel(raw: str) -> str:
    runs = _runs(raw)
    head = runs[0][0].lower() + runs[0][1:]
    name = head + "".join(run[0].upper() + run[1:] for run in runs[1:])
    if not name[0].isalpha():
        name = "x" + name
    return name


def _strip_type_suffix(name: str) -> str:
    if name.endswith("Type") and len(name) > 4:
        return name[:-4]
    return name


def _dedupe(name: str, used: set[str]) -> str:
    candidate = name
    k = 2
    while candidate in used:
        candidate = f"{name}{k}"
        k += 1
    used.add(candidate)
    return candidate


def generate_names(raw: FlatPlan) -> FlatPlan:
    """Rewrite plan names into valid identifiers, deterministically.

    Type and constructor names become PascalCase (a trailing ``Type`` suffix
    on schema type names is dropped for readability), field names camelCase;
    collisions pick up numeric suffixes in declaration order. Keywords are
    pre-seeded so a field named ``class`` comes out as ``class2``.
    """
    type_names: set[str] = {"True", "False", "None"}
    rename: Dict[str, str] = {}
    for decl in raw.decls:
        rename[decl.name] = _dedupe(_strip_type_suffix(_pascal(decl.name)), type_names)

    def fix(ref: TypeRef) -> TypeRef:
        if ref.builtin is not None:
            return ref
        return TypeRef(rename[ref.name])

    decls: List[FlatDecl] = []
    for decl in raw.decls:
        if isinstance(decl, AliasDecl):
            decls.append(AliasDecl(rename[decl.name], fix(decl.target)))
        elif isinstance(decl, EnumDecl):
            member_names: set[str] = set(keyword.kwlist)
            members = tuple((_dedupe(_camel(n), member_names), v) for n, v in decl.members)
            decls.append(EnumDecl(rename[decl.name], members))
        elif isinstance(decl, SumDecl):
            ctors = tuple(
                Ctor(_dedupe(_pascal(c.name), type_names), c.xml_name,
                     fix(c.payload) if c.payload else None)
                for c in decl.ctors
            )
            decls.append(SumDecl(rename[decl.name], ctors))
        else:
            field_names: set[str] = set(keyword.kwlist)
            fields = tuple(
                replace(f, name=_dedupe(_camel(f.name), field_names), ref=fix(f.ref))
                for f in decl.fields
            )
            decls.append(RecordDecl(rename[decl.name], fields, decl.all_group))
    return FlatPlan(
        decls=tuple(decls),
        top=rename[raw.top],
        top_xml_name=raw.top_xml_name,
        recursive=tuple(rename[n] if n in rename else n for n in raw.recursive),
    )


def dump_plan(plan_: FlatPlan) -> str:
    """Human-readable one-line-per-declaration dump, stable across runs."""
    lines = []
    for decl in plan_.decls:
        if isinstance(decl, AliasDecl):
            lines.append(f"alias {decl.name} = {decl.target.name}")
        elif isinstance(decl, EnumDecl):
            members = " ".join(f"{n}={v!r}" for n, v in decl.members)
            lines.append(f"enum {decl.name}: {members}")
        elif isinstance(decl, SumDecl):
            ctors = " | ".join(
                f"{c.name}({c.payload.name if c.payload else ''})<{c.xml_name}>" for c in decl.ctors
            )
            lines.append(f"sum {decl.name}: {ctors}")
        else:
            mode = " (all)" if decl.all_group else ""
            fields = "; ".join(
                ("@" if f.kind == FIELD_ATTRIBUTE else "")
                + ("=" if f.kind == FIELD_CONTENT else "")
                + f"{f.name} {f.card.value} {f.ref.name}<{f.xml_name}>"
                for f in decl.fields
            )
            lines.append(f"record {decl.name}{mode}: {fields}")
    lines.append(f"top {plan_.top} <{plan_.top_xml_name}>")
    return "\n".join(lines) + "\n"


def plan_fingerprint(plan_: FlatPlan) -> str:
    return hashlib.sha256(dump_plan(plan_).encode()).hexdigest()[:16]
