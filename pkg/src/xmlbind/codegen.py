"""Emit a self-contained Python module from a flat plan.

The generated module contains the type declarations, a phase-1 parser built
from runtime combinators (``parse_top_level_to_array``), a phase-2 extractor
(``extract_top_level``), and a public ``parse`` entry point. It imports only
this package's runtime.

Generation goes plan -> abstract code model -> printer, so the output is
deterministic and golden-testable: byte-identical for identical inputs, one
combinator call per line, every line traceable to a schema name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import __version__
from .flatten import (
    AliasDecl,
    Cardinality,
    EnumDecl,
    FIELD_ATTRIBUTE,
    FIELD_CONTENT,
    FlatDecl,
    FlatPlan,
    Field,
    RecordDecl,
    SumDecl,
    TypeRef,
    generate_names,
    plan_fingerprint,
)
from .xsd import Builtin


class CodegenError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class CodegenOptions:
    entry_name: str = "parse"
    include_main: bool = True


@dataclass(frozen=True, slots=True)
class SlotLayout:
    """Static cell layout of one record: scalars take two cells, optionals
    their inner width (zeros meaning absent), repeats one count cell with the
    bodies inline after it, choices one tag cell plus the widest alternative.
    ``fixed`` is false when any repeat makes the actual extent input-dependent.
    """

    name: str
    field_slots: Tuple[Tuple[str, int], ...]  # (field name, static width)
    width: int
    fixed: bool


@dataclass(frozen=True, slots=True)
class GeneratedModule:
    source_text: str
    entry_name: str
    plan_fingerprint: str


@dataclass(slots=True)
class CodeBlock:
    lines: List[str] = field(default_factory=list)

    def add(self, *lines: str):
        self.lines.extend(lines)


@dataclass(slots=True)
class CodeModel:
    """Abstract shape of the output module, printed by :func:`emit_readably`."""

    header: List[str] = field(default_factory=list)
    imports: List[str] = field(default_factory=list)
    blocks: List[CodeBlock] = field(default_factory=list)

    def block(self) -> CodeBlock:
        b = CodeBlock()
        self.blocks.append(b)
        return b


_PY_TYPE = {
    Builtin.INT: "int",
    Builtin.TEXT: "str",
    Builtin.DATE: "datetime.date",
    Builtin.DATETIME: "datetime.datetime",
    Builtin.BOOLEAN: "bool",
    Builtin.FLOAT: "float",
}

_PARSER = {
    Builtin.INT: "runtime.parse_int_content",
    Builtin.TEXT: "runtime.parse_string_content",
    Builtin.DATE: "runtime.parse_day_content",
    Builtin.DATETIME: "runtime.parse_datetime_content",
    Builtin.BOOLEAN: "runtime.parse_bool_content",
    Builtin.FLOAT: "runtime.parse_float_content",
}

_EXTRACTOR = {
    Builtin.INT: "runtime.extract_int",
    Builtin.TEXT: "runtime.extract_string",
    Builtin.DATE: "runtime.extract_day",
    Builtin.DATETIME: "runtime.extract_datetime",
    Builtin.BOOLEAN: "runtime.extract_bool",
    Builtin.FLOAT: "runtime.extract_float",
}


def _snake(name: str) -> str:
    s = re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", "_", name)
    return s.lower()


class _Layouts:
    """Per-declaration slot layouts with recursion rejection."""

    def __init__(self, plan: FlatPlan):
        self.plan = plan
        self.by_name: Dict[str, FlatDecl] = {d.name: d for d in plan.decls}
        self.cache: Dict[str, Tuple[int, bool]] = {}
        self.stack: List[str] = []

    def of_ref(self, ref: TypeRef) -> Tuple[int, bool]:
        if ref.builtin is not None:
            return 2, True
        return self.of_decl_name(ref.name)

    def of_decl_name(self, name: str) -> Tuple[int, bool]:
        if name in self.cache:
            return self.cache[name]
        if name in self.stack:
            path = self.stack[self.stack.index(name) :] + [name]
            raise CodegenError(
                "recursive type cannot be laid out with fixed slots: " + " -> ".join(path)
            )
        decl = self.by_name.get(name)
        if decl is None:
            raise CodegenError(f"plan references undeclared type {name!r}")
        self.stack.append(name)
        try:
            result = self._compute(decl)
        finally:
            self.stack.pop()
        self.cache[name] = result
        return result

    def _compute(self, decl: FlatDecl) -> Tuple[int, bool]:
        if isinstance(decl, AliasDecl):
            return self.of_ref(decl.target)
        if isinstance(decl, EnumDecl):
            return 2, True
        if isinstance(decl, SumDecl):
            widths = []
            for ctor in decl.ctors:
                if ctor.payload is None:
                    widths.append(0)
                    continue
                w, fx = self.of_ref(ctor.payload)
                if not fx:
                    raise CodegenError(
                        f"choice alternative {decl.name}.{ctor.name} has a variable-width payload"
                    )
                if ctor.payload.builtin is None:
                    payload_decl = self.by_name[self._terminal(ctor.payload)]
                    if isinstance(payload_decl, RecordDecl) and any(
                        f.kind == FIELD_ATTRIBUTE for f in payload_decl.fields
                    ):
                        raise CodegenError(
                            f"choice alternative {decl.name}.{ctor.name} carries attributes; unsupported"
                        )
                widths.append(w)
            return 1 + max(widths), True
        # record
        total = 0
        fixed = True
        for f in decl.fields:
            w, fx = self.field_slot(decl, f)
            total += w
            fixed = fixed and fx and f.card is not Cardinality.MANY
        return total, fixed

    def field_slot(self, decl: RecordDecl, f: Field) -> Tuple[int, bool]:
        w, fx = self.of_ref(f.ref)
        if f.card is Cardinality.MANY:
            return 1, fx  # count cell; bodies follow inline
        if f.card is Cardinality.OPTIONAL and not fx:
            raise CodegenError(
                f"optional field {decl.name}.{f.name} has a variable-width type; "
                "an absent value could not be skipped"
            )
        return w, fx

    def _terminal(self, ref: TypeRef) -> str:
        name = ref.name
        while isinstance(self.by_name.get(name), AliasDecl):
            target = self.by_name[name].target
            if target.builtin is not None:
                return name
            name = target.name
        return name


def layout_record(plan: FlatPlan, decl: FlatDecl) -> SlotLayout:
    """Slot layout for one declaration (record widths sum field slots)."""
    layouts = _Layouts(plan)
    width, fixed = layouts.of_decl_name(decl.name)
    slots: Tuple[Tuple[str, int], ...] = ()
    if isinstance(decl, RecordDecl):
        slots = tuple((f.name, layouts.field_slot(decl, f)[0]) for f in decl.fields)
        width = sum(w for _, w in slots)
        fixed = layouts.of_decl_name(decl.name)[1]
    return SlotLayout(decl.name, slots, width, fixed)


def generate(plan: FlatPlan, opts: Optional[CodegenOptions] = None) -> GeneratedModule:
    """Generate the binding module for ``plan``; deterministic per input."""
    opts = opts or CodegenOptions()
    named = generate_names(plan)
    return _Generator(named, opts).run()


def emit_readably(model: CodeModel) -> str:
    """Print a code model: stable formatting, one statement per line."""
    head = "\n".join(model.header) + "\n\n" + "\n".join(model.imports)
    blocks = "\n\n\n".join("\n".join(b.lines) for b in model.blocks if b.lines)
    return head + "\n\n\n" + blocks + "\n"


class _Generator:
    def __init__(self, plan: FlatPlan, opts: CodegenOptions):
        self.plan = plan
        self.opts = opts
        self.layouts = _Layouts(plan)
        self.by_name = self.layouts.by_name
        self.fingerprint = plan_fingerprint(plan)
        self.fn_names: Dict[str, str] = {}
        used = set()
        for decl in plan.decls:
            base = _snake(decl.name)
            name = base
            k = 2
            while name in used:
                name = f"{base}{k}"
                k += 1
            used.add(name)
            self.fn_names[decl.name] = name

    def run(self) -> GeneratedModule:
        for decl in self.plan.decls:  # reject recursion up front, with the path
            self.layouts.of_decl_name(decl.name)
        root = self.by_name[self.plan.top]
        if not isinstance(root, (RecordDecl, SumDecl)):
            raise CodegenError(f"root declaration {self.plan.top!r} must be a record or a choice")

        model = CodeModel()
        model.header = [
            '"""XML data binding generated from a schema; do not edit by hand."""',
            f"# generator: xmlbind {__version__}; plan fingerprint: {self.fingerprint}",
        ]
        model.imports = self._imports()
        for decl in self.plan.decls:
            self._type_decl(model, decl)
        for decl in self.plan.decls:
            self._parser_fns(model, decl)
        self._root_parser(model, root)
        for decl in self.plan.decls:
            self._extractor_fns(model, decl)
        self._root_extractor(model, root)
        self._entry(model)
        if self.opts.include_main:
            b = model.block()
            b.add(
                'if __name__ == "__main__":',
                "    import sys",
                '    with open(sys.argv[1], "rb") as fh:',
                f"        print({self.opts.entry_name}(fh.read()))",
            )
        return GeneratedModule(emit_readably(model), self.opts.entry_name, self.fingerprint)

    # --- pieces ------------------------------------------------------------

    def _imports(self) -> List[str]:
        builtins_used = set()
        for decl in self.plan.decls:
            if isinstance(decl, AliasDecl) and decl.target.builtin:
                builtins_used.add(decl.target.builtin)
            elif isinstance(decl, RecordDecl):
                builtins_used.update(f.ref.builtin for f in decl.fields if f.ref.builtin)
            elif isinstance(decl, SumDecl):
                builtins_used.update(c.payload.builtin for c in decl.ctors if c.payload and c.payload.builtin)
        lines = ["from __future__ import annotations", ""]
        if builtins_used & {Builtin.DATE, Builtin.DATETIME}:
            lines.append("import datetime")
        if any(isinstance(d, EnumDecl) for d in self.plan.decls):
            lines.append("import enum")
        lines.append("from dataclasses import dataclass")
        typing_names = []
        if any(isinstance(d, RecordDecl) and any(f.card is Cardinality.OPTIONAL for f in d.fields)
               for d in self.plan.decls):
            typing_names.append("Optional")
        if any(isinstance(d, RecordDecl) and any(f.card is Cardinality.MANY for f in d.fields)
               for d in self.plan.decls):
            typing_names.append("Sequence")
        if typing_names:
            lines.append(f"from typing import {', '.join(typing_names)}")
        lines.append("")
        lines.append("from xmlbind import runtime")
        lines.append("from xmlbind.buffer import terminate")
        return lines

    def _py_type(self, ref: TypeRef) -> str:
        if ref.builtin is not None:
            return _PY_TYPE[ref.builtin]
        return ref.name

    def _annotation(self, f: Field) -> str:
        base = self._py_type(f.ref)
        if f.card is Cardinality.OPTIONAL:
            return f"Optional[{base}]"
        if f.card is Cardinality.MANY:
            return f"Sequence[{base}]"
        return base

    def _type_decl(self, model: CodeModel, decl: FlatDecl):
        b = model.block()
        if isinstance(decl, AliasDecl):
            b.add(f"{decl.name} = {self._py_type(decl.target)}")
        elif isinstance(decl, EnumDecl):
            b.add(f"class {decl.name}(enum.Enum):")
            for name, value in decl.members:
                b.add(f"    {name} = {value!r}")
        elif isinstance(decl, SumDecl):
            for ctor in decl.ctors:
                b.add("@dataclass(frozen=True)", f"class {ctor.name}:")
                if ctor.payload is None:
                    b.add("    pass")
                else:
                    b.add(f"    value: {self._py_type(ctor.payload)}")
                b.add("")
            union = " | ".join(c.name for c in decl.ctors)
            b.add(f"{decl.name} = {union}")
        else:
            b.add("@dataclass(frozen=True)", f"class {decl.name}:")
            if not decl.fields:
                b.add("    pass")
            for f in decl.fields:
                b.add(f"    {f.name}: {self._annotation(f)}")

    # parse expressions ------------------------------------------------------

    def _terminal_decl(self, ref: TypeRef) -> Optional[FlatDecl]:
        if ref.builtin is not None:
            return None
        name = self.layouts._terminal(ref)
        decl = self.by_name[name]
        if isinstance(decl, AliasDecl):  # alias bottoming out at a builtin
            return None
        return decl

    def _terminal_builtin(self, ref: TypeRef) -> Optional[Builtin]:
        while ref.builtin is None:
            decl = self.by_name[ref.name]
            if not isinstance(decl, AliasDecl):
                return None
            ref = decl.target
        return ref.builtin

    def _width_expr(self, ref: TypeRef) -> str:
        """Width of a slot as source text; record/sum widths use their
        named constant (so generated strides read like the plan)."""
        decl = self._terminal_decl(ref)
        if isinstance(decl, (RecordDecl, SumDecl)):
            return f"_{self.fn_names[decl.name].upper()}_WIDTH"
        return str(self.layouts.of_ref(ref)[0])

    def _content_parser_expr(self, ref: TypeRef) -> str:
        """Expression for the content parser of a value of type ``ref``."""
        builtin = self._terminal_builtin(ref)
        if builtin is not None:
            return _PARSER[builtin]
        decl = self._terminal_decl(ref)
        if isinstance(decl, EnumDecl):
            return "runtime.parse_string_content"
        if isinstance(decl, RecordDecl):
            return f"_parse_{self.fn_names[decl.name]}_content"
        if isinstance(decl, SumDecl):
            return f"_parse_{self.fn_names[decl.name]}_value"
        raise CodegenError(f"no content parser for {ref.name!r}")

    def _attr_const(self, decl: RecordDecl) -> Optional[str]:
        if any(f.kind == FIELD_ATTRIBUTE for f in decl.fields):
            return f"_{self.fn_names[decl.name].upper()}_ATTRS"
        return None

    def _element_combinator(self, f: Field, arr: str, pos: str) -> str:
        """One line matching element field ``f`` at (arr, pos)."""
        ref_decl = self._terminal_decl(f.ref)
        if isinstance(ref_decl, SumDecl):
            alts = f"_{self.fn_names[ref_decl.name].upper()}_ALTS"
            fn = {
                Cardinality.SINGLE: "in_choice_tag",
                Cardinality.OPTIONAL: "in_maybe_choice",
                Cardinality.MANY: "in_many_choice",
            }[f.card]
            return f"runtime.{fn}(st, {alts}, {arr}, {pos})"
        tag = f.xml_name.encode()
        inner = self._content_parser_expr(f.ref)
        width = self._width_expr(f.ref)
        attrs = self._attr_const(ref_decl) if isinstance(ref_decl, RecordDecl) else None
        if attrs:
            if f.card is Cardinality.SINGLE:
                return f"runtime.in_one_tag_with_attrs(st, {tag!r}, {attrs}, {arr}, {pos}, {inner})"
            if f.card is Cardinality.OPTIONAL:
                return f"runtime.in_maybe_tag_with_attrs(st, {tag!r}, {attrs}, {arr}, {pos}, {inner}, {width})"
            return f"runtime.in_many_tags_with_attrs(st, {tag!r}, {attrs}, {arr}, {pos}, {inner})"
        if f.card is Cardinality.SINGLE:
            return f"runtime.in_one_tag(st, {tag!r}, {arr}, {pos}, {inner})"
        if f.card is Cardinality.OPTIONAL:
            return f"runtime.in_maybe_tag(st, {tag!r}, {arr}, {pos}, {inner}, {width})"
        return f"runtime.in_many_tags(st, {tag!r}, {arr}, {pos}, {inner})"

    def _parser_fns(self, model: CodeModel, decl: FlatDecl):
        if isinstance(decl, SumDecl):
            b = model.block()
            fn = self.fn_names[decl.name]
            width, _ = self.layouts.of_decl_name(decl.name)
            b.add(f"_{fn.upper()}_WIDTH = {width}", "", "")
            b.add(f"_{fn.upper()}_ALTS = (")
            for ctor in decl.ctors:
                inner = (
                    "runtime.parse_empty_content"
                    if ctor.payload is None
                    else self._content_parser_expr(ctor.payload)
                )
                alt_width = "0" if ctor.payload is None else self._width_expr(ctor.payload)
                b.add(f"    ({ctor.xml_name.encode()!r}, {inner}, {alt_width}),")
            b.add(")")
            b.add(
                "",
                "",
                f"def _parse_{fn}_value(st: runtime.ParseState, arr_ofs: int, str_ofs: int) -> tuple[int, int]:",
                f"    return runtime.in_choice_tag(st, _{fn.upper()}_ALTS, arr_ofs, str_ofs)",
            )
            return
        if not isinstance(decl, RecordDecl):
            return
        fn = self.fn_names[decl.name]
        b = model.block()
        attr_fields = [f for f in decl.fields if f.kind == FIELD_ATTRIBUTE]
        if attr_fields:
            names = ", ".join(f"{f.xml_name.encode()!r}" for f in attr_fields)
            comma = "," if len(attr_fields) == 1 else ""
            b.add(f"_{fn.upper()}_ATTRS = ({names}{comma})", "", "")
        width, _ = self.layouts.of_decl_name(decl.name)
        b.add(f"_{fn.upper()}_WIDTH = {width}", "", "")
        b.add(
            f"def _parse_{fn}_content(st: runtime.ParseState, arr_ofs: int, str_ofs: int) -> tuple[int, int]:"
        )
        body = [f for f in decl.fields if f.kind != FIELD_ATTRIBUTE]
        if not body:
            b.add("    return arr_ofs, str_ofs")
            return
        if decl.all_group:
            members = f"_{fn.upper()}_MEMBERS"
            b.add(f"    return runtime.in_all_tags(st, {members}, arr_ofs, str_ofs)")
            b.add("", "")
            b.add(f"{members} = (")
            for f in body:
                inner = self._content_parser_expr(f.ref)
                w = self._width_expr(f.ref)
                required = f.card is Cardinality.SINGLE
                b.add(f"    ({f.xml_name.encode()!r}, {inner}, {w}, {required}),")
            b.add(")")
            return
        arr, pos = "arr_ofs", "str_ofs"
        for idx, f in enumerate(body, start=1):
            arr2, pos2 = f"arr_ofs{idx}", f"str_ofs{idx}"
            if f.kind == FIELD_CONTENT:
                expr = f"{self._content_parser_expr(f.ref)}(st, {arr}, {pos})"
            else:
                expr = self._element_combinator(f, arr, pos)
            b.add(f"    {arr2}, {pos2} = {expr}")
            arr, pos = arr2, pos2
        b.add(f"    return {arr}, {pos}")

    def _root_parser(self, model: CodeModel, root: FlatDecl):
        b = model.block()
        tag = self.plan.top_xml_name.encode()
        fn = self.fn_names[root.name]
        if isinstance(root, SumDecl):
            inner = f"_parse_{fn}_value"
            call = f"runtime.in_one_tag(st, {tag!r}, 0, pos, {inner})"
        else:
            attrs = self._attr_const(root)
            inner = f"_parse_{fn}_content"
            if attrs:
                call = f"runtime.in_one_tag_with_attrs(st, {tag!r}, {attrs}, 0, pos, {inner})"
            else:
                call = f"runtime.in_one_tag(st, {tag!r}, 0, pos, {inner})"
        b.add(
            "def parse_top_level_to_array(data: bytes) -> runtime.OffsetView:",
            '    """Phase 1: one scan of the document, recording spans and counts."""',
            "    buf = terminate(data)",
            "    st = runtime.ParseState(buf)",
            "    pos = runtime.skip_header(buf, 0)",
            f"    {call}",
            "    return st.finish()",
        )

    # extract expressions ------------------------------------------------------

    def _scalar_extractor_expr(self, ref: TypeRef, label: str) -> Optional[str]:
        builtin = self._terminal_builtin(ref)
        if builtin is not None:
            return f"{_EXTRACTOR[builtin]}(view, {{ofs}}, {label!r})"
        decl = self._terminal_decl(ref)
        if isinstance(decl, EnumDecl):
            return f"runtime.extract_enum(view, {{ofs}}, {decl.name}, {label!r})"
        return None

    def _extract_call(self, ref: TypeRef, label: str, ofs: str) -> str:
        scalar = self._scalar_extractor_expr(ref, label)
        if scalar is not None:
            return scalar.format(ofs=ofs)
        decl = self._terminal_decl(ref)
        if isinstance(decl, RecordDecl):
            return f"_extract_{self.fn_names[decl.name]}_content(view, {ofs})"
        if isinstance(decl, SumDecl):
            fnu = self.fn_names[decl.name]
            width = f"_{fnu.upper()}_WIDTH"
            return f"runtime.extract_choice(view, {ofs}, _{fnu.upper()}_EXTRACTORS, {width}, {label!r})"
        raise CodegenError(f"no extractor for {ref.name!r}")

    def _extractor_fns(self, model: CodeModel, decl: FlatDecl):
        if isinstance(decl, SumDecl):
            b = model.block()
            fn = self.fn_names[decl.name]
            for idx, ctor in enumerate(decl.ctors):
                b.add(f"def _extract_{fn}_alt{idx}(view: runtime.OffsetView, ofs: int):")
                if ctor.payload is None:
                    b.add(f"    return {ctor.name}(), ofs")
                else:
                    label = f"{decl.name}.{ctor.name}"
                    b.add(f"    value, end = {self._extract_call(ctor.payload, label, 'ofs')}")
                    b.add(f"    return {ctor.name}(value), end")
                b.add("", "")
            alts = ", ".join(f"_extract_{fn}_alt{idx}" for idx in range(len(decl.ctors)))
            comma = "," if len(decl.ctors) == 1 else ""
            b.add(f"_{fn.upper()}_EXTRACTORS = ({alts}{comma})")
            return
        if not isinstance(decl, RecordDecl):
            return
        fn = self.fn_names[decl.name]
        b = model.block()
        helpers: List[str] = []
        lines: List[str] = [
            f"def _extract_{fn}_content(view: runtime.OffsetView, ofs: int) -> tuple[{decl.name}, int]:"
        ]
        ofs = "ofs"
        for idx, f in enumerate(decl.fields, start=1):
            label = f"{decl.name}.{f.name}"
            nxt = f"ofs{idx}"
            ref_decl = self._terminal_decl(f.ref)
            width = self._width_expr(f.ref)
            fixed = self.layouts.of_ref(f.ref)[1]
            if isinstance(ref_decl, SumDecl):
                fnu = f"_{self.fn_names[ref_decl.name].upper()}_EXTRACTORS"
                if f.card is Cardinality.SINGLE:
                    expr = f"runtime.extract_choice(view, {ofs}, {fnu}, {width}, {label!r})"
                elif f.card is Cardinality.OPTIONAL:
                    expr = f"runtime.extract_maybe_choice(view, {ofs}, {fnu}, {width}, {label!r})"
                else:
                    helper = f"_extract_{fn}_{_snake(f.name)}"
                    helpers.extend([
                        f"def {helper}(view: runtime.OffsetView, ofs: int):",
                        f"    return runtime.extract_choice(view, ofs, {fnu}, {width}, {label!r})",
                        "",
                        "",
                    ])
                    expr = f"runtime.extract_many(view, {ofs}, {helper}, {width})"
            elif f.card is Cardinality.SINGLE:
                expr = self._extract_call(f.ref, label, ofs)
            else:
                helper = f"_extract_{fn}_{_snake(f.name)}"
                scalar = self._scalar_extractor_expr(f.ref, label)
                if scalar is not None:
                    body = f"    return {scalar.format(ofs='ofs')}"
                else:
                    body = f"    return _extract_{self.fn_names[ref_decl.name]}_content(view, ofs)"
                helpers.extend([f"def {helper}(view: runtime.OffsetView, ofs: int):", body, "", ""])
                if f.card is Cardinality.OPTIONAL:
                    expr = f"runtime.extract_maybe(view, {ofs}, {helper}, {width}, {label!r})"
                else:
                    stride = width if fixed else "None"
                    expr = f"runtime.extract_many(view, {ofs}, {helper}, {stride})"
            lines.append(f"    {f.name}, {nxt} = {expr}")
            ofs = nxt
        kwargs = ", ".join(f"{f.name}={f.name}" for f in decl.fields)
        lines.append(f"    return {decl.name}({kwargs}), {ofs}")
        b.add(*helpers)
        b.add(*lines)

    def _root_extractor(self, model: CodeModel, root: FlatDecl):
        b = model.block()
        fn = self.fn_names[root.name]
        if isinstance(root, SumDecl):
            width = f"_{fn.upper()}_WIDTH"
            call = f"runtime.extract_choice(view, 0, _{fn.upper()}_EXTRACTORS, {width}, {root.name!r})"
        else:
            call = f"_extract_{fn}_content(view, 0)"
        b.add(
            f"def extract_top_level(view: runtime.OffsetView) -> {root.name}:",
            '    """Phase 2: decode typed values from the offset array (lists decode lazily)."""',
            f"    value, _ = {call}",
            "    return value",
        )

    def _entry(self, model: CodeModel):
        root_name = self.plan.top
        b = model.block()
        b.add(
            f"def {self.opts.entry_name}(data: bytes) -> {root_name}:",
            f'    """Parse a document rooted at <{self.plan.top_xml_name}>.',
            "",
            "    Raises runtime.BindError (phase tag in .phase) on scan or decode failure.",
            '    """',
            "    return extract_top_level(parse_top_level_to_array(data))",
        )
