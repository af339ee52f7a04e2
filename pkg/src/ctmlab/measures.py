"""Frequency-based measures over a completed enumeration.

A Distribution maps each produced string to its occurrence count and the
cheapest witnesses seen: min_n, the fewest distinct instructions any
producer executed, and min_t, the fewest steps among those cheapest
producers.  Probabilities are exact rationals (count over halting total);
the complexity score of a string is -log2 of its probability, and its depth
estimate is the runtime of the minimal producer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .enumeration import (
    MODE_COMPLETED,
    MODE_FULL_ORACLE,
    MODE_RAW_FULL,
    Aggregate,
)

DISTRIBUTION_MODES = (MODE_COMPLETED, MODE_FULL_ORACLE, MODE_RAW_FULL)

DEFAULT_RUNTIME_GROUP_WIDTH = 25


class StringNotObserved(KeyError):
    """Raised when a string was never produced by the underlying runs."""

    def __init__(self, s: str):
        super().__init__(s)
        self.string = s

    def __str__(self) -> str:
        return f"string {self.string!r} was not produced by any halting machine"


@dataclass(frozen=True)
class DistEntry:
    count: int
    min_n: int
    min_t: int


@dataclass(frozen=True)
class Distribution:
    n: int
    bound: int
    halting_total: int
    entries: dict[str, DistEntry]

    def __contains__(self, s: str) -> bool:
        return s in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def build_distribution(agg: Aggregate) -> Distribution:
    """Turn an aggregate over the full space into an output distribution.

    Raw reduced aggregates are rejected: their frequencies are biased until
    symmetry completion restores the missing machines.
    """
    if agg.meta.mode not in DISTRIBUTION_MODES:
        raise ValueError(
            f"cannot build a distribution from a {agg.meta.mode} aggregate; "
            f"complete it first"
        )
    agg.validate()
    halting = agg.halting_total
    if halting == 0:
        raise ValueError("aggregate has no halting machines")
    entries = {
        s: DistEntry(rec.count, rec.min_n, rec.min_t) for s, rec in agg.records.items()
    }
    return Distribution(agg.meta.n, agg.meta.bound, halting, entries)


def _lookup(dist: Distribution, s: str) -> DistEntry:
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"expected a nonempty binary string, got {s!r}")
    entry = dist.entries.get(s)
    if entry is None:
        raise StringNotObserved(s)
    return entry


def probability(dist: Distribution, s: str) -> Fraction:
    """Exact output frequency of s."""
    return Fraction(_lookup(dist, s).count, dist.halting_total)


def km(dist: Distribution, s: str) -> float:
    """Complexity score -log2(probability of s)."""
    entry = _lookup(dist, s)
    return math.log2(dist.halting_total) - math.log2(entry.count)


def min_instructions(dist: Distribution, s: str) -> int:
    """Distinct instructions executed by the cheapest producer of s."""
    return _lookup(dist, s).min_n


def ld_estimate(dist: Distribution, s: str) -> int:
    """Depth estimate: steps taken by the minimal producer of s."""
    return _lookup(dist, s).min_t


def sorted_strings(dist: Distribution) -> list[str]:
    """Strings in canonical order: by length, then lexicographic."""
    return sorted(dist.entries, key=lambda s: (len(s), s))


def modal_strings(dist: Distribution) -> list[str]:
    """Most frequent strings, canonical order."""
    top = max(entry.count for entry in dist.entries.values())
    return [s for s in sorted_strings(dist) if dist.entries[s].count == top]


@dataclass(frozen=True)
class InstructionGroupRow:
    used_n: int
    string_count: int
    mean_km: float
    mean_length: float


def instruction_group_table(dist: Distribution) -> list[InstructionGroupRow]:
    """Per-group means over distinct strings, grouped by min_n.

    Means are unweighted: every string counts once regardless of frequency.
    Only occupied groups are returned, in increasing min_n order.
    """
    groups: dict[int, list[str]] = {}
    for s, entry in dist.entries.items():
        groups.setdefault(entry.min_n, []).append(s)
    rows = []
    for used_n in sorted(groups):
        members = groups[used_n]
        rows.append(
            InstructionGroupRow(
                used_n=used_n,
                string_count=len(members),
                mean_km=math.fsum(km(dist, s) for s in members) / len(members),
                mean_length=math.fsum(len(s) for s in members) / len(members),
            )
        )
    return rows


@dataclass(frozen=True)
class RuntimeGroupRow:
    lo: int
    hi: int
    string_count: int
    min_km: float | None
    mean_km: float | None
    max_km: float | None


def runtime_group_table(
    dist: Distribution, width: int = DEFAULT_RUNTIME_GROUP_WIDTH
) -> list[RuntimeGroupRow]:
    """Complexity summary by runtime band of the minimal producer.

    Bands of the given width tile [1, bound]; a band that contains no
    string keeps its place with empty statistics.
    """
    if width < 1:
        raise ValueError("band width must be positive")
    bands: dict[int, list[float]] = {}
    for s, entry in dist.entries.items():
        band = (entry.min_t - 1) // width
        bands.setdefault(band, []).append(km(dist, s))
    rows = []
    for band in range((dist.bound + width - 1) // width):
        lo = band * width + 1
        hi = min(lo + width - 1, dist.bound)
        values = bands.get(band)
        if values:
            rows.append(
                RuntimeGroupRow(
                    lo=lo,
                    hi=hi,
                    string_count=len(values),
                    min_km=min(values),
                    mean_km=math.fsum(values) / len(values),
                    max_km=max(values),
                )
            )
        else:
            rows.append(RuntimeGroupRow(lo, hi, 0, None, None, None))
    return rows


def correlation_dataset(
    dist: Distribution,
) -> tuple[list[float], list[float], list[float], list[float]]:
    """Per-string vectors (km, min_n, min_t, length) in canonical order."""
    kms: list[float] = []
    min_ns: list[float] = []
    min_ts: list[float] = []
    lengths: list[float] = []
    for s in sorted_strings(dist):
        entry = dist.entries[s]
        kms.append(km(dist, s))
        min_ns.append(float(entry.min_n))
        min_ts.append(float(entry.min_t))
        lengths.append(float(len(s)))
    return kms, min_ns, min_ts, lengths
