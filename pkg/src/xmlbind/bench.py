"""Corpus generator and measurement harness.

Generates user-record documents of a requested size with seeded random
content, then times the scanners over a size ladder: wall time (median of at
least three runs) and peak process RSS sampled on a 10 ms cadence. Scaling
ratios between consecutive sizes, not absolute times, are the quantities of
interest.
"""

from __future__ import annotations

import gc
import json
import random
import statistics
import string
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import psutil

from .buffer import terminate
from .codegen import generate
from .dom import parse_dom
from .flatten import plan
from .sax import SaxHandlers, scan
from .xsd_parse import parse_schema

# the corpus schema: the users/user/uid/name/bday shape
USER_SCHEMA_XSD = b"""<xs:schema
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


class BenchError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class CorpusSpec:
    target_size_bytes: int
    seed: int = 1


_HEADER = b'<?xml version="1.0" encoding="utf-8"?>\n<users>\n'
_FOOTER = b"</users>\n"


def corpus_bytes(spec: CorpusSpec) -> bytes:
    """Deterministic random users document close to the target size.

    uid is a random decimal, names are 3-12 ASCII letters, bday is present
    with probability 0.9. Targets smaller than one record yield the minimal
    empty document (the +-1% size bound only applies above that).
    """
    rng = random.Random(spec.seed)
    target = spec.target_size_bytes
    out = bytearray(_HEADER)
    letters = string.ascii_letters
    while True:
        uid = rng.randrange(1, 10**9)
        name = "".join(rng.choice(letters) for _ in range(rng.randrange(3, 13)))
        if rng.random() < 0.9:
            bday = "%04d-%02d-%02d" % (
                rng.randrange(1950, 2011),
                rng.randrange(1, 13),
                rng.randrange(1, 29),
            )
            chunk = (
                f"  <user>\n    <uid>{uid}</uid>\n    <name>{name}</name>\n"
                f"    <bday>{bday}</bday>\n  </user>\n"
            ).encode()
        else:
            chunk = (
                f"  <user>\n    <uid>{uid}</uid>\n    <name>{name}</name>\n  </user>\n"
            ).encode()
        if len(out) + len(chunk) + len(_FOOTER) > target:
            break
        out += chunk
    out += _FOOTER
    return bytes(out)


def generate_corpus(spec: CorpusSpec, output: Path) -> Path:
    output = Path(output)
    output.write_bytes(corpus_bytes(spec))
    return output


# --- tools under measurement ---------------------------------------------------

_NOOP = SaxHandlers()


def _tool_sax(data: bytes) -> None:
    scan(terminate(data), _NOOP)


def _tool_dom(data: bytes) -> None:
    parse_dom(terminate(data))


_generated_parse: Optional[Callable[[bytes], object]] = None


def generated_user_parser() -> Callable[[bytes], object]:
    """The parse entry of the module generated from the corpus schema."""
    global _generated_parse
    if _generated_parse is None:
        schema = parse_schema(terminate(USER_SCHEMA_XSD))
        module = generate(plan(schema))
        ns: dict = {}
        exec(compile(module.source_text, "<generated users module>", "exec"), ns)
        _generated_parse = ns["parse"]
    return _generated_parse


def _tool_generated(data: bytes) -> None:
    generated_user_parser()(data)


TOOLS: Dict[str, Callable[[bytes], None]] = {
    "sax_scan": _tool_sax,
    "dom_parse": _tool_dom,
    "generated_parse": _tool_generated,
}


# --- measurement ----------------------------------------------------------------


class _RssSampler(threading.Thread):
    """Samples process RSS on a 10 ms cadence while a run is in flight."""

    def __init__(self):
        super().__init__(daemon=True)
        self._proc = psutil.Process()
        self._halt = threading.Event()
        self.peak = 0

    def run(self):
        while not self._halt.is_set():
            rss = self._proc.memory_info().rss
            if rss > self.peak:
                self.peak = rss
            self._halt.wait(0.01)

    def finish(self) -> int:
        self._halt.set()
        self.join()
        rss = self._proc.memory_info().rss
        return max(self.peak, rss)


@dataclass(frozen=True, slots=True)
class BenchRow:
    tool: str
    size_bytes: int
    median_seconds: float
    peak_rss_bytes: int
    allocated_bytes: Optional[int] = None
    error: Optional[str] = None


@dataclass(slots=True)
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def row(self, tool: str, size_bytes: int) -> BenchRow:
        for r in self.rows:
            if r.tool == tool and r.size_bytes == size_bytes:
                return r
        raise KeyError((tool, size_bytes))

    def to_tsv(self) -> str:
        lines = ["tool\tsize_bytes\tmedian_seconds\tpeak_rss_bytes\tallocated_bytes"]
        for r in self.rows:
            alloc = "" if r.allocated_bytes is None else str(r.allocated_bytes)
            if r.error:
                lines.append(f"{r.tool}\t{r.size_bytes}\tFAILED: {r.error}\t\t")
            else:
                lines.append(
                    f"{r.tool}\t{r.size_bytes}\t{r.median_seconds:.6f}\t{r.peak_rss_bytes}\t{alloc}"
                )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "notes": self.notes,
            "rows": [
                {
                    "tool": r.tool,
                    "size_bytes": r.size_bytes,
                    "median_seconds": r.median_seconds,
                    "peak_rss_bytes": r.peak_rss_bytes,
                    "allocated_bytes": r.allocated_bytes,
                    "error": r.error,
                }
                for r in self.rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"


def _trim_heap() -> None:
    """Return freed arena memory to the OS so each row's peak RSS reflects
    its own allocations, not an earlier tool's high-water mark."""
    try:
        import ctypes

        ctypes.CDLL("libc.so.6").malloc_trim(0)
    except OSError:  # non-glibc platform; best effort only
        pass


def _measure_once(fn: Callable[[bytes], None], data: bytes) -> tuple[float, int]:
    gc.collect()
    _trim_heap()
    sampler = _RssSampler()
    sampler.start()
    gc.disable()  # cycle collection adds size-dependent noise; nothing here cycles
    start = time.perf_counter()
    try:
        fn(data)
        elapsed = time.perf_counter() - start
    finally:
        gc.enable()
    return elapsed, sampler.finish()


def _measure(fn, data, runs: int, max_attempts: int, spread_limit: float, label: str):
    for attempt in range(max_attempts):
        times = []
        peak = 0
        for _ in range(runs):
            elapsed, rss = _measure_once(fn, data)
            times.append(elapsed)
            peak = max(peak, rss)
        median = statistics.median(times)
        spread = (max(times) - min(times)) / median if median > 0 else 0.0
        if spread <= spread_limit:
            return median, peak
    raise BenchError(
        f"{label}: run-to-run spread {spread:.1%} exceeds {spread_limit:.0%} "
        f"after {max_attempts} attempts; refusing to report"
    )


def run_suite(
    tools: Sequence[str],
    sizes_mib: Sequence[float],
    *,
    runs: int = 3,
    seed: int = 1,
    spread_limit: float = 0.20,
    max_attempts: int = 4,
    measure_allocations: bool = False,
) -> BenchReport:
    """Measure every (tool, size) pair; sizes ascending, median of ``runs``."""
    if runs < 3:
        raise BenchError("at least 3 runs per row are required")
    unknown = [t for t in tools if t not in TOOLS]
    if unknown:
        raise BenchError(f"unknown tools: {unknown}")
    report = BenchReport()
    if not measure_allocations:
        report.notes.append(
            "allocation counting omitted: the instrumented allocator would distort timing"
        )
    if "generated_parse" in tools:
        generated_user_parser()  # build outside the timed region
    for size in sorted(sizes_mib):
        size_bytes = int(size * 1024 * 1024)
        data = corpus_bytes(CorpusSpec(size_bytes, seed))
        for tool in tools:
            fn = TOOLS[tool]
            label = f"{tool} @ {size_bytes} bytes"
            try:
                median, peak = _measure(fn, data, runs, max_attempts, spread_limit, label)
                allocated = _allocations(fn, data) if measure_allocations else None
                report.rows.append(BenchRow(tool, size_bytes, median, peak, allocated))
            except BenchError:
                raise
            except Exception as exc:  # a crashing tool becomes a failure row
                report.rows.append(BenchRow(tool, size_bytes, 0.0, 0, None, error=str(exc)))
        del data
    return report


def _allocations(fn, data) -> int:
    import tracemalloc

    tracemalloc.start()
    try:
        fn(data)
        return tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()
