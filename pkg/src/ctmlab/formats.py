"""Plain-text file formats for aggregates, checkpoints, and histograms.

All writers are canonical: records sorted by (length, lexicographic), one
header key per line, LF line endings.  Loaders enforce the same shape, so
save(load(x)) reproduces x byte for byte and any edit that changes counts,
order, or the counter arithmetic is rejected.

Aggregate files:

    # ctm-aggregate 1
    # n=3
    # symbols=2
    # mode=completed
    # blank=both
    # bound=200
    # machines_total=15059072
    # halting=4294368
    # nonhalting=10332720
    # exhausted=431984
    # codec=1

    0<TAB>count<TAB>min_n<TAB>min_t
    ...

Checkpoint files carry a plan digest, the set of completed chunk ids as
compact ranges, and an embedded aggregate of exactly those chunks.
Runtime-histogram files replace the record rows with steps/count pairs.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

from .enumeration import Aggregate, RunMeta, StringRecord

AGGREGATE_MAGIC = "# ctm-aggregate 1"
CHECKPOINT_MAGIC = "# ctm-checkpoint 1"
HISTOGRAM_MAGIC = "# ctm-runtime-histogram 1"
CODEC_VERSION = 1


class FormatError(ValueError):
    """Raised when a file does not parse as a valid canonical document."""


def _atomic_write(path: str, text: str) -> None:
    # Write-new-then-rename so readers never observe a half-written file.
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ctm-tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sorted_records(agg: Aggregate) -> list[tuple[str, StringRecord]]:
    return sorted(agg.records.items(), key=lambda kv: (len(kv[0]), kv[0]))


def _header_lines(agg: Aggregate) -> list[str]:
    meta = agg.meta
    return [
        f"# n={meta.n}",
        "# symbols=2",
        f"# mode={meta.mode}",
        f"# blank={meta.blank}",
        f"# bound={meta.bound}",
        f"# machines_total={agg.machines_total}",
        f"# halting={agg.halting_total}",
        f"# nonhalting={agg.nonhalting}",
        f"# exhausted={agg.exhausted}",
        f"# codec={CODEC_VERSION}",
    ]


def dumps_aggregate(agg: Aggregate) -> str:
    agg.validate()
    lines = [AGGREGATE_MAGIC]
    lines.extend(_header_lines(agg))
    lines.append("")
    for s, rec in _sorted_records(agg):
        lines.append(f"{s}\t{rec.count}\t{rec.min_n}\t{rec.min_t}")
    return "\n".join(lines) + "\n"


def save_aggregate(agg: Aggregate, path: str) -> None:
    _atomic_write(path, dumps_aggregate(agg))


def _parse_headers(lines: list[str], start: int, keys: list[str]) -> tuple[dict[str, str], int]:
    values: dict[str, str] = {}
    pos = start
    for key in keys:
        if pos >= len(lines):
            raise FormatError(f"missing header {key!r}")
        line = lines[pos]
        name, sep, value = line.removeprefix("# ").partition("=")
        if not line.startswith("# ") or not sep or name != key:
            raise FormatError(f"expected header '# {key}=...', got {line!r}")
        values[key] = value
        pos += 1
    if pos >= len(lines) or lines[pos] != "":
        raise FormatError("expected a blank line after the headers")
    return values, pos + 1


def _parse_int(values: dict[str, str], key: str) -> int:
    try:
        return int(values[key])
    except ValueError:
        raise FormatError(f"header {key!r} is not an integer: {values[key]!r}") from None


AGGREGATE_KEYS = [
    "n", "symbols", "mode", "blank", "bound",
    "machines_total", "halting", "nonhalting", "exhausted", "codec",
]


def _parse_aggregate_body(lines: list[str], start: int) -> Aggregate:
    values, pos = _parse_headers(lines, start, AGGREGATE_KEYS)
    if _parse_int(values, "symbols") != 2:
        raise FormatError("only 2-symbol aggregates are supported")
    if _parse_int(values, "codec") != CODEC_VERSION:
        raise FormatError(f"unsupported codec version {values['codec']}")
    try:
        meta = RunMeta(
            n=_parse_int(values, "n"),
            bound=_parse_int(values, "bound"),
            mode=values["mode"],
            blank=values["blank"],
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    agg = Aggregate.empty(meta)
    agg.nonhalting = _parse_int(values, "nonhalting")
    agg.exhausted = _parse_int(values, "exhausted")
    agg.machines_total = _parse_int(values, "machines_total")
    prev_key: tuple[int, str] | None = None
    for line in lines[pos:]:
        parts = line.split("\t")
        if len(parts) != 4:
            raise FormatError(f"malformed record row {line!r}")
        s = parts[0]
        try:
            count, min_n, min_t = int(parts[1]), int(parts[2]), int(parts[3])
        except ValueError:
            raise FormatError(f"non-integer field in record row {line!r}") from None
        key = (len(s), s)
        if prev_key is not None and key <= prev_key:
            raise FormatError(f"record rows out of canonical order at {s!r}")
        prev_key = key
        agg.records[s] = StringRecord(count, min_n, min_t)
    if agg.halting_total != _parse_int(values, "halting"):
        raise FormatError(
            f"halting header says {values['halting']} but rows sum to {agg.halting_total}"
        )
    try:
        agg.validate()
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return agg


def loads_aggregate(text: str) -> Aggregate:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise FormatError("file must end with a newline")
    if not lines or lines[0] != AGGREGATE_MAGIC:
        raise FormatError(f"not an aggregate file (expected {AGGREGATE_MAGIC!r})")
    return _parse_aggregate_body(lines, 1)


def load_aggregate(path: str) -> Aggregate:
    with open(path) as fh:
        return loads_aggregate(fh.read())


def _ranges_to_str(ids: frozenset[int]) -> str:
    if not ids:
        return "-"
    ordered = sorted(ids)
    spans: list[str] = []
    lo = prev = ordered[0]
    for i in ordered[1:]:
        if i == prev + 1:
            prev = i
            continue
        spans.append(f"{lo}-{prev}" if lo != prev else f"{lo}")
        lo = prev = i
    spans.append(f"{lo}-{prev}" if lo != prev else f"{lo}")
    return ",".join(spans)


def _str_to_ranges(text: str) -> frozenset[int]:
    if text == "-":
        return frozenset()
    ids: set[int] = set()
    for span in text.split(","):
        lo, sep, hi = span.partition("-")
        try:
            if sep:
                ids.update(range(int(lo), int(hi) + 1))
            else:
                ids.add(int(lo))
        except ValueError:
            raise FormatError(f"malformed chunk range {span!r}") from None
    return frozenset(ids)


@dataclass(frozen=True)
class Checkpoint:
    digest: str
    chunk_count: int
    completed: frozenset[int]
    aggregate: Aggregate


def dumps_checkpoint(cp: Checkpoint) -> str:
    lines = [
        CHECKPOINT_MAGIC,
        f"# digest={cp.digest}",
        f"# chunks={cp.chunk_count}",
        f"# completed={_ranges_to_str(cp.completed)}",
    ]
    return "\n".join(lines) + "\n\n" + dumps_aggregate(cp.aggregate)


def save_checkpoint(cp: Checkpoint, path: str) -> None:
    _atomic_write(path, dumps_checkpoint(cp))


def loads_checkpoint(text: str) -> Checkpoint:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise FormatError("file must end with a newline")
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise FormatError(f"not a checkpoint file (expected {CHECKPOINT_MAGIC!r})")
    values, pos = _parse_headers(lines, 1, ["digest", "chunks", "completed"])
    if pos >= len(lines) or lines[pos] != AGGREGATE_MAGIC:
        raise FormatError("checkpoint is missing its embedded aggregate")
    agg = _parse_aggregate_body(lines, pos + 1)
    completed = _str_to_ranges(values["completed"])
    chunk_count = _parse_int(values, "chunks")
    if completed and max(completed) >= chunk_count:
        raise FormatError("completed chunk id beyond the chunk count")
    return Checkpoint(values["digest"], chunk_count, completed, agg)


def load_checkpoint(path: str) -> Checkpoint:
    with open(path) as fh:
        return loads_checkpoint(fh.read())


HISTOGRAM_KEYS = ["n", "symbols", "mode", "blank", "bound", "halting"]


def dumps_runtime_hist(agg: Aggregate) -> str:
    if agg.runtime_hist is None:
        raise ValueError("aggregate carries no runtime histogram")
    agg.validate()
    meta = agg.meta
    lines = [
        HISTOGRAM_MAGIC,
        f"# n={meta.n}",
        "# symbols=2",
        f"# mode={meta.mode}",
        f"# blank={meta.blank}",
        f"# bound={meta.bound}",
        f"# halting={sum(agg.runtime_hist.values())}",
        "",
    ]
    for k in sorted(agg.runtime_hist):
        lines.append(f"{k}\t{agg.runtime_hist[k]}")
    return "\n".join(lines) + "\n"


def save_runtime_hist(agg: Aggregate, path: str) -> None:
    _atomic_write(path, dumps_runtime_hist(agg))


def load_runtime_hist(path: str) -> tuple[RunMeta, dict[int, int]]:
    with open(path) as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise FormatError("file must end with a newline")
    if not lines or lines[0] != HISTOGRAM_MAGIC:
        raise FormatError(f"not a runtime histogram file (expected {HISTOGRAM_MAGIC!r})")
    values, pos = _parse_headers(lines, 1, HISTOGRAM_KEYS)
    if _parse_int(values, "symbols") != 2:
        raise FormatError("only 2-symbol histograms are supported")
    try:
        meta = RunMeta(
            n=_parse_int(values, "n"),
            bound=_parse_int(values, "bound"),
            mode=values["mode"],
            blank=values["blank"],
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    hist: dict[int, int] = {}
    prev = 0
    total = 0
    for line in lines[pos:]:
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"malformed histogram row {line!r}")
        try:
            k, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"non-integer field in histogram row {line!r}") from None
        if k <= prev:
            raise FormatError("histogram rows must have strictly increasing step counts")
        if not 1 <= k <= meta.bound or c < 1:
            raise FormatError(f"histogram row out of range: {line!r}")
        prev = k
        hist[k] = c
        total += c
    if total != _parse_int(values, "halting"):
        raise FormatError("histogram rows do not sum to the halting header")
    return meta, hist
