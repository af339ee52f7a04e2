"""Chunked orchestration of enumeration sweeps with resume support.

A Plan slices an enumeration (full or reduced index space) into fixed-size
chunks.  Chunk results merge through a commutative operation, so the final
aggregate does not depend on worker count or completion order; canonical
serialization then makes output files byte-identical across schedules.

Checkpoints store the plan digest, the completed chunk ids, and the merged
partial aggregate of exactly those chunks.  A resumed run verifies the
digest and reruns only what is missing; chunks are idempotent, so a crash
between checkpoint writes costs at most one stripe of work.
"""

from __future__ import annotations

import hashlib
import multiprocessing
import os
from dataclasses import dataclass, replace

import numpy as np

from . import engine, formats
from .enumeration import (
    MODE_RAW_FULL,
    MODE_RAW_REDUCED,
    Aggregate,
    RunMeta,
    default_bound,
    enumerate_indices,
    merge_stats,
)

DEFAULT_CHUNK_SIZE = 1 << 16
DEFAULT_STRIPE_SIZE = 64
ENV_WORKERS = "CTMLAB_WORKERS"


class CheckpointError(RuntimeError):
    """Raised when a checkpoint does not belong to the plan being resumed."""


@dataclass(frozen=True)
class Plan:
    n: int
    mode: str
    blank: str
    bound: int
    filters: bool
    chunk_size: int
    collect_hist: bool

    def __post_init__(self) -> None:
        if self.mode not in ("full", "reduced"):
            raise ValueError(f"plan mode must be 'full' or 'reduced', got {self.mode!r}")
        if self.blank not in ("0", "1", "both"):
            raise ValueError(f"plan blank must be '0', '1', or 'both', got {self.blank!r}")
        if self.chunk_size < 1:
            raise ValueError("chunk size must be positive")
        self.meta  # runs RunMeta validation for n and bound

    @property
    def total(self) -> int:
        return len(enumerate_indices(self.n, self.mode))

    @property
    def chunk_count(self) -> int:
        return -(-self.total // self.chunk_size) if self.total else 0

    def chunk_range(self, chunk_id: int) -> tuple[int, int]:
        if not 0 <= chunk_id < self.chunk_count:
            raise IndexError(f"chunk id {chunk_id} outside 0..{self.chunk_count - 1}")
        start = chunk_id * self.chunk_size
        return start, min(start + self.chunk_size, self.total)

    @property
    def blanks(self) -> tuple[int, ...]:
        return (0, 1) if self.blank == "both" else (int(self.blank),)

    @property
    def meta(self) -> RunMeta:
        mode = MODE_RAW_REDUCED if self.mode == "reduced" else MODE_RAW_FULL
        return RunMeta(n=self.n, bound=self.bound, mode=mode, blank=self.blank)

    @property
    def digest(self) -> str:
        key = (
            f"ctm-plan 1|codec {formats.CODEC_VERSION}|n={self.n}|mode={self.mode}"
            f"|blank={self.blank}|bound={self.bound}|filters={int(self.filters)}"
            f"|chunk={self.chunk_size}|hist={int(self.collect_hist)}|total={self.total}"
        )
        return hashlib.sha256(key.encode()).hexdigest()


def plan_chunks(
    n: int,
    *,
    mode: str,
    blank: str = "both",
    bound: int | None = None,
    filters: bool = True,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    collect_hist: bool = False,
) -> Plan:
    """Build a plan; the non-halt detectors are on unless explicitly disabled."""
    return Plan(
        n=n,
        mode=mode,
        blank=blank,
        bound=default_bound(n) if bound is None else bound,
        filters=filters,
        chunk_size=chunk_size,
        collect_hist=collect_hist,
    )


def run_chunk(plan: Plan, chunk_id: int) -> Aggregate:
    start, stop = plan.chunk_range(chunk_id)
    indices = np.arange(start, stop, dtype=np.int64)
    agg = Aggregate.empty(plan.meta, with_hist=plan.collect_hist)
    reduced = plan.mode == "reduced"
    for blank in plan.blanks:
        block = engine.sweep(
            plan.n, indices, reduced=reduced, blank=blank,
            bound=plan.bound, filters=plan.filters,
        )
        records, nonhalting, exhausted = engine.aggregate_block(block)
        hist = engine.halting_steps_histogram(block) if plan.collect_hist else None
        agg.absorb_block(records, nonhalting, exhausted, stop - start, hist)
    return agg


def merge(a: Aggregate, b: Aggregate) -> Aggregate:
    """Combine two aggregates of the same run identity."""
    if a.meta != b.meta:
        raise ValueError(f"cannot merge aggregates with different metadata: {a.meta} vs {b.meta}")
    if (a.runtime_hist is None) != (b.runtime_hist is None):
        raise ValueError("cannot merge aggregates with and without runtime histograms")
    records = dict(a.records)
    for s, rec in b.records.items():
        prev = records.get(s)
        records[s] = rec if prev is None else merge_stats(prev, rec)
    hist = None
    if a.runtime_hist is not None and b.runtime_hist is not None:
        hist = dict(a.runtime_hist)
        for k, c in b.runtime_hist.items():
            hist[k] = hist.get(k, 0) + c
    return Aggregate(
        meta=a.meta,
        records=records,
        nonhalting=a.nonhalting + b.nonhalting,
        exhausted=a.exhausted + b.exhausted,
        machines_total=a.machines_total + b.machines_total,
        runtime_hist=hist,
    )


def default_workers() -> int:
    value = os.environ.get(ENV_WORKERS)
    if value is not None:
        workers = int(value)
        if workers < 1:
            raise ValueError(f"{ENV_WORKERS} must be at least 1, got {workers}")
        return workers
    return os.cpu_count() or 1


def _chunk_task(args: tuple[Plan, int]) -> tuple[int, Aggregate]:
    plan, chunk_id = args
    return chunk_id, run_chunk(plan, chunk_id)


def _load_resume_state(plan: Plan, path: str) -> tuple[Aggregate, set[int]]:
    cp = formats.load_checkpoint(path)
    if cp.digest != plan.digest:
        raise CheckpointError(
            f"checkpoint at {path} belongs to a different plan "
            f"(digest {cp.digest[:12]}.. != {plan.digest[:12]}..)"
        )
    if cp.chunk_count != plan.chunk_count or cp.aggregate.meta != plan.meta:
        raise CheckpointError(f"checkpoint at {path} is inconsistent with the plan")
    return cp.aggregate, set(cp.completed)


def orchestrate(
    plan: Plan,
    *,
    workers: int | None = None,
    checkpoint_path: str | None = None,
    stripe_size: int = DEFAULT_STRIPE_SIZE,
) -> Aggregate:
    """Run every chunk of the plan and return the merged aggregate.

    With a checkpoint path, progress is persisted every stripe_size chunks
    and an existing checkpoint for the same plan is resumed.
    """
    if checkpoint_path is not None and plan.collect_hist:
        raise ValueError("runtime histograms are in-memory only and cannot be checkpointed")
    if stripe_size < 1:
        raise ValueError("stripe size must be positive")
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("worker count must be at least 1")

    partial = Aggregate.empty(plan.meta, with_hist=plan.collect_hist)
    completed: set[int] = set()
    if checkpoint_path is not None and os.path.exists(checkpoint_path):
        partial, completed = _load_resume_state(plan, checkpoint_path)

    pending = [i for i in range(plan.chunk_count) if i not in completed]

    def save_progress() -> None:
        if checkpoint_path is not None:
            cp = formats.Checkpoint(
                digest=plan.digest,
                chunk_count=plan.chunk_count,
                completed=frozenset(completed),
                aggregate=partial,
            )
            formats.save_checkpoint(cp, checkpoint_path)

    since_save = 0

    def take(chunk_id: int, chunk_agg: Aggregate) -> None:
        nonlocal partial, since_save
        partial = merge(partial, chunk_agg)
        completed.add(chunk_id)
        since_save += 1
        if since_save >= stripe_size:
            save_progress()
            since_save = 0

    if workers == 1 or len(pending) <= 1:
        for chunk_id in pending:
            take(chunk_id, run_chunk(plan, chunk_id))
    else:
        engine.warmup()  # compile before forking so children inherit the kernels
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(workers, len(pending))) as pool:
            tasks = ((plan, chunk_id) for chunk_id in pending)
            for chunk_id, chunk_agg in pool.imap(_chunk_task, tasks):
                take(chunk_id, chunk_agg)

    save_progress()
    partial.validate()
    return partial


def run_to_file(
    plan: Plan,
    out_path: str,
    *,
    workers: int | None = None,
    checkpoint_path: str | None = None,
    hist_path: str | None = None,
) -> Aggregate:
    """Orchestrate a plan and write the aggregate (and optional histogram)."""
    agg = orchestrate(plan, workers=workers, checkpoint_path=checkpoint_path)
    formats.save_aggregate(agg, out_path)
    if hist_path is not None:
        formats.save_runtime_hist(agg, hist_path)
    return agg
