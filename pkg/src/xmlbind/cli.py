"""Command-line front end: generate binding modules, explore documents,
build corpora, run benchmarks.

Exit codes: 0 success, 1 domain error (schema or parse), 2 I/O or usage
error. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from . import dom
from .buffer import terminate
from .codegen import CodegenError, generate
from .flatten import plan
from .runtime import BindError
from .sax import ScanError
from .xsd import SchemaError
from .xsd_parse import parse_schema

_DOMAIN_ERRORS = (SchemaError, ScanError, BindError, CodegenError, bench_mod.BenchError)


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(2)
    return p.read_bytes()


def cmd_generate(args) -> int:
    data = _read_bytes(args.schema)
    try:
        schema = parse_schema(terminate(data))
        module = generate(plan(schema))
    except _DOMAIN_ERRORS as exc:
        print(f"{args.schema}: {exc}", file=sys.stderr)
        return 1
    Path(args.output).write_text(module.source_text)
    print(f"wrote {args.output} (fingerprint {module.plan_fingerprint})", file=sys.stderr)
    return 0


def cmd_dom(args) -> int:
    data = _read_bytes(args.input)
    try:
        root = dom.parse_dom(terminate(data))
    except _DOMAIN_ERRORS as exc:
        position = getattr(exc, "position", getattr(exc, "at", "?"))
        print(f"{args.input}: byte {position}: {exc}", file=sys.stderr)
        return 1
    buf = root.index.input
    if args.filter_name is not None:
        want = args.filter_name.lower().encode()
        for node in dom.all_nodes(root):
            if node.name_bytes().lower() == want:
                print(node.text().decode("utf-8", "replace"))
        return 0
    count = 0

    def walk(node, depth):
        nonlocal count
        count += 1
        attrs = node.attributes()
        suffix = f" [{len(attrs)} attrs]" if attrs else ""
        print("  " * depth + node.name_bytes().decode("utf-8", "replace") + suffix)
        for child in node.children():
            walk(child, depth + 1)

    walk(root, 0)
    print(f"{count} nodes")
    return 0


def cmd_gen_corpus(args) -> int:
    spec = bench_mod.CorpusSpec(args.size, args.seed)
    bench_mod.generate_corpus(spec, Path(args.output))
    print(f"wrote {args.output}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    sizes = [float(s) for s in args.sizes.split(",") if s]
    try:
        report = bench_mod.run_suite(
            args.tools.split(","),
            sizes,
            runs=args.runs,
            measure_allocations=args.allocations,
        )
    except bench_mod.BenchError as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report.to_tsv())
    if args.out:
        Path(args.out).write_text(report.to_json())
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xmlbind", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a typed parser module from an XSD")
    p.add_argument("--schema", required=True, help="input XSD path")
    p.add_argument("--output", required=True, help="output module path")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("dom", help="print matching nodes or a tree summary")
    p.add_argument("--input", required=True, help="XML document path")
    p.add_argument("--filter-name", help="case-insensitive element name to match")
    p.set_defaults(fn=cmd_dom)

    p = sub.add_parser("gen-corpus", help="write a random users document")
    p.add_argument("--size", type=int, required=True, help="target size in bytes")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=cmd_gen_corpus)

    p = sub.add_parser("bench", help="measure scan/dom/generated parsers")
    p.add_argument("--sizes", required=True, help="comma-separated sizes in MiB")
    p.add_argument("--out", help="write a JSON report here")
    p.add_argument("--tools", default="sax_scan,dom_parse,generated_parse")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--allocations", action="store_true", help="also count allocations (slow)")
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
