"""Enumeration bookkeeping: aggregates, symmetry completion, filter audit.

An Aggregate is the result of running a set of machines: per-output-string
statistics plus counters for the runs that did not produce output.  The
machines_total counter counts machine runs, so an aggregate over both blank
symbols counts every machine twice.

complete() turns a raw reduced-enumeration aggregate (blank 0, first entry
restricted to write-and-move-right into a higher state) into the aggregate
of the full space over both blanks, without running the missing machines:

1. mirror closure: every machine with a move-left first entry is the mirror
   of a reduced one and emits the reversed string with identical step and
   instruction counts;
2. machines whose first entry halts write a single symbol and stop, adding
   (4n+2)^(2n-1) occurrences each of "0" and "1" at one step, one
   instruction;
3. machines whose first entry stays in state 1 rewrite fresh blanks forever
   and never halt, adding 4*(4n+2)^(2n-1) non-halting runs;
4. blank-symbol closure: running on a 1-filled tape is equivalent to running
   the symbol-swapped machine on a 0-filled tape, so the blank-1 half adds
   the complement of every string with identical statistics.

Each step preserves step counts, instruction counts, and filter behaviour,
so the result is bit-identical to enumerating everything.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .machines import reduced_size, space_size

MODE_RAW_REDUCED = "raw-reduced"
MODE_RAW_FULL = "raw-full"
MODE_COMPLETED = "completed"
MODE_FULL_ORACLE = "full-oracle"

MODES = (MODE_RAW_REDUCED, MODE_RAW_FULL, MODE_COMPLETED, MODE_FULL_ORACLE)

BLANKS = ("0", "1", "both")

DEFAULT_BOUND = {1: 200, 2: 200, 3: 200, 4: 107, 5: 500}


def default_bound(n: int) -> int:
    space_size(n)
    return DEFAULT_BOUND[n]


@dataclass(frozen=True)
class RunMeta:
    """Identity of an enumeration run; merges require equal metadata."""

    n: int
    bound: int
    mode: str
    blank: str

    def __post_init__(self) -> None:
        space_size(self.n)
        if self.bound < 1:
            raise ValueError(f"step bound must be positive, got {self.bound}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.blank not in BLANKS:
            raise ValueError(f"blank must be one of {BLANKS}, got {self.blank!r}")


@dataclass(frozen=True)
class StringRecord:
    """Occurrence count and minimal-resource witnesses for one output string."""

    count: int
    min_n: int
    min_t: int


def merge_stats(a: StringRecord, b: StringRecord) -> StringRecord:
    """Counts add; the instruction minimum wins, steps break ties."""
    if (b.min_n, b.min_t) < (a.min_n, a.min_t):
        min_n, min_t = b.min_n, b.min_t
    else:
        min_n, min_t = a.min_n, a.min_t
    return StringRecord(a.count + b.count, min_n, min_t)


@dataclass
class Aggregate:
    meta: RunMeta
    records: dict[str, StringRecord] = field(default_factory=dict)
    nonhalting: int = 0
    exhausted: int = 0
    machines_total: int = 0
    runtime_hist: dict[int, int] | None = None

    @classmethod
    def empty(cls, meta: RunMeta, *, with_hist: bool = False) -> "Aggregate":
        return cls(meta, runtime_hist={} if with_hist else None)

    @property
    def halting_total(self) -> int:
        return sum(r.count for r in self.records.values())

    def add_record(self, s: str, count: int, min_n: int, min_t: int) -> None:
        rec = StringRecord(count, min_n, min_t)
        prev = self.records.get(s)
        self.records[s] = rec if prev is None else merge_stats(prev, rec)

    def absorb_block(
        self,
        records: dict[str, tuple[int, int, int]],
        nonhalting: int,
        exhausted: int,
        machines_ran: int,
        hist: dict[int, int] | None = None,
    ) -> None:
        for s, (count, min_n, min_t) in records.items():
            self.add_record(s, count, min_n, min_t)
        self.nonhalting += nonhalting
        self.exhausted += exhausted
        self.machines_total += machines_ran
        if hist is not None:
            if self.runtime_hist is None:
                self.runtime_hist = {}
            for k, c in hist.items():
                self.runtime_hist[k] = self.runtime_hist.get(k, 0) + c

    def validate(self) -> None:
        n = self.meta.n
        if self.nonhalting < 0 or self.exhausted < 0:
            raise ValueError("negative outcome counters")
        halting = 0
        for s, rec in self.records.items():
            if not s or set(s) - {"0", "1"}:
                raise ValueError(f"output strings must be nonempty binary, got {s!r}")
            if rec.count < 1:
                raise ValueError(f"record for {s!r} has count {rec.count}")
            if not 1 <= rec.min_n <= 2 * n:
                raise ValueError(f"min_n for {s!r} out of range: {rec.min_n}")
            if not 1 <= rec.min_t <= self.meta.bound:
                raise ValueError(f"min_t for {s!r} out of range: {rec.min_t}")
            if len(s) > self.meta.bound:
                raise ValueError(f"output {s!r} longer than the step bound")
            halting += rec.count
        if halting + self.nonhalting + self.exhausted != self.machines_total:
            raise ValueError(
                "outcome counters do not sum to machines_total: "
                f"{halting} + {self.nonhalting} + {self.exhausted} "
                f"!= {self.machines_total}"
            )
        if self.runtime_hist is not None:
            if any(k < 1 or k > self.meta.bound for k in self.runtime_hist):
                raise ValueError("runtime histogram key outside 1..bound")
            if sum(self.runtime_hist.values()) != halting:
                raise ValueError("runtime histogram does not sum to the halting count")


def enumerate_indices(n: int, mode: str) -> range:
    """Index range of the chosen enumeration ("full" or "reduced")."""
    if mode == "full":
        return range(space_size(n))
    if mode == "reduced":
        return range(reduced_size(n))
    raise ValueError(f"unknown enumeration {mode!r}")


def _reverse(s: str) -> str:
    return s[::-1]


def _complement(s: str) -> str:
    return s.translate(str.maketrans("01", "10"))


def complete(raw: Aggregate) -> Aggregate:
    """Expand a raw reduced blank-0 aggregate to the full space over both blanks."""
    meta = raw.meta
    if meta.mode != MODE_RAW_REDUCED:
        raise ValueError(f"completion expects a {MODE_RAW_REDUCED} aggregate, got {meta.mode}")
    if meta.blank != "0":
        raise ValueError(f"completion expects blank 0, got blank {meta.blank}")
    if raw.machines_total != reduced_size(meta.n):
        raise ValueError(
            "completion needs the whole reduced enumeration: expected "
            f"{reduced_size(meta.n)} runs, got {raw.machines_total}"
        )
    raw.validate()
    n = meta.n
    quarter = space_size(n) // (4 * n + 2)

    out = Aggregate.empty(replace(meta, mode=MODE_COMPLETED, blank="both"))

    # Step 1: mirror closure.
    for s, rec in raw.records.items():
        out.add_record(s, rec.count, rec.min_n, rec.min_t)
        out.add_record(_reverse(s), rec.count, rec.min_n, rec.min_t)
    out.nonhalting = 2 * raw.nonhalting
    out.exhausted = 2 * raw.exhausted
    out.machines_total = 2 * raw.machines_total

    # Step 2: first entry halts.
    out.add_record("0", quarter, 1, 1)
    out.add_record("1", quarter, 1, 1)
    out.machines_total += 2 * quarter

    # Step 3: first entry stays in state 1.
    out.nonhalting += 4 * quarter
    out.machines_total += 4 * quarter

    if out.machines_total != space_size(n):
        raise AssertionError("completion arithmetic drifted from the space size")

    # Step 4: blank-symbol closure over the snapshot built so far.
    snapshot = list(out.records.items())
    for s, rec in snapshot:
        out.add_record(_complement(s), rec.count, rec.min_n, rec.min_t)
    out.nonhalting *= 2
    out.exhausted *= 2
    out.machines_total *= 2

    if raw.runtime_hist is not None:
        hist = {k: 4 * c for k, c in raw.runtime_hist.items()}
        hist[1] = hist.get(1, 0) + 4 * quarter
        out.runtime_hist = hist

    out.validate()
    return out


def full_oracle(
    n: int,
    *,
    bound: int | None = None,
    workers: int | None = None,
    filters: bool = True,
    collect_hist: bool = False,
) -> Aggregate:
    """Brute-force aggregate of the whole space over both blanks, filters on."""
    from . import runner

    bound = default_bound(n) if bound is None else bound
    plan = runner.plan_chunks(
        n, mode="full", blank="both", bound=bound,
        filters=filters, collect_hist=collect_hist,
    )
    agg = runner.orchestrate(plan, workers=workers)
    agg.meta = replace(agg.meta, mode=MODE_FULL_ORACLE)
    agg.validate()
    return agg


@dataclass(frozen=True)
class AuditReport:
    """Outcome of a filter soundness audit."""

    n: int
    blank: int
    bound: int
    recheck_bound: int
    machines_checked: int
    filtered: dict[str, int]
    violations: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def filtered_total(self) -> int:
        return sum(self.filtered.values())


def audit_filters(
    n: int,
    *,
    recheck_bound: int,
    bound: int | None = None,
    blank: int = 0,
    sample: int | None = None,
    seed: int = 0,
    block_size: int = 1 << 20,
) -> AuditReport:
    """Check filter soundness: no filtered machine may halt when rerun bare.

    Pass 1 sweeps the full space (or a uniform sample of it) with the
    detectors on and collects every filtered index.  Pass 2 reruns those
    indices with the detectors off for recheck_bound steps.  Any halt in
    pass 2 is a soundness violation and is reported with its step count.
    """
    space = space_size(n)
    bound = default_bound(n) if bound is None else bound
    if recheck_bound < bound:
        raise ValueError("recheck bound must not be below the sweep bound")

    filtered_counts = {name: 0 for name in engine.FILTER_STATUS_NAMES.values()}
    filtered_indices: list[np.ndarray] = []
    machines_checked = 0

    def scan(indices: np.ndarray) -> None:
        nonlocal machines_checked
        block = engine.sweep(n, indices, blank=blank, bound=bound, filters=True)
        machines_checked += indices.shape[0]
        for code, name in engine.FILTER_STATUS_NAMES.items():
            mask = block.status == code
            hits = int(np.count_nonzero(mask))
            if hits:
                filtered_counts[name] += hits
                filtered_indices.append(indices[mask])

    if sample is None:
        for start in range(0, space, block_size):
            stop = min(start + block_size, space)
            scan(np.arange(start, stop, dtype=np.int64))
    else:
        drawn = 0
        block_no = 0
        while drawn < sample:
            take = min(block_size, sample - drawn)
            rng = np.random.default_rng([seed, block_no])
            scan(rng.integers(0, space, size=take, dtype=np.int64))
            drawn += take
            block_no += 1

    violations: list[tuple[int, int]] = []
    for chunk in filtered_indices:
        status, steps = engine.recheck(n, chunk, blank=blank, bound=recheck_bound)
        halted = status == engine.STATUS_HALTED
        for pos in np.flatnonzero(halted):
            violations.append((int(chunk[pos]), int(steps[pos])))

    return AuditReport(
        n=n,
        blank=blank,
        bound=bound,
        recheck_bound=recheck_bound,
        machines_checked=machines_checked,
        filtered=filtered_counts,
        violations=violations,
    )


def sample_run(
    n: int,
    count: int,
    *,
    bound: int | None = None,
    blank: str = "both",
    seed: int = 0,
    filters: bool = True,
    collect_hist: bool = False,
    block_size: int = 1 << 20,
) -> Aggregate:
    """Aggregate a uniform random sample of the full space.

    Indices are drawn with replacement, one generator per block keyed by
    (seed, block number), so the result depends only on seed, count, and
    block size.  The aggregate is labelled raw-full: it is a multiset of
    full-space runs, not a census.
    """
    space = space_size(n)
    bound = default_bound(n) if bound is None else bound
    if count < 1:
        raise ValueError("sample size must be positive")
    if blank not in BLANKS:
        raise ValueError(f"blank must be one of {BLANKS}, got {blank!r}")
    blanks = (0, 1) if blank == "both" else (int(blank),)

    meta = RunMeta(n=n, bound=bound, mode=MODE_RAW_FULL, blank=blank)
    agg = Aggregate.empty(meta, with_hist=collect_hist)
    drawn = 0
    block_no = 0
    while drawn < count:
        take = min(block_size, count - drawn)
        rng = np.random.default_rng([seed, block_no])
        indices = rng.integers(0, space, size=take, dtype=np.int64)
        for b in blanks:
            block = engine.sweep(n, indices, blank=b, bound=bound, filters=filters)
            records, nonhalting, exhausted = engine.aggregate_block(block)
            hist = engine.halting_steps_histogram(block) if collect_hist else None
            agg.absorb_block(records, nonhalting, exhausted, take, hist)
        drawn += take
        block_no += 1
    agg.validate()
    return agg
