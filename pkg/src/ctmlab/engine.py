"""Batch execution engine for large enumeration sweeps.

The per-machine semantics are identical to simulate.run; the loops here are
compiled with numba and operate on machine indices directly, decoding each
table on the fly.  Results come back as flat numpy arrays per block, which
aggregate_block reduces to per-string statistics.  Outputs are packed 63
bits per signed 64-bit word, so a block needs (bound+62)//63 words per
machine (a halting run's output is never longer than its step count).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .machines import reduced_size, space_size

STATUS_HALTED = 0
STATUS_NO_HALT = 1
STATUS_ESCAPEE = 2
STATUS_TWO_CYCLE = 3
STATUS_EXHAUSTED = 4

FILTER_STATUS_NAMES = {
    STATUS_NO_HALT: "no-halt-transition",
    STATUS_ESCAPEE: "escapee",
    STATUS_TWO_CYCLE: "two-cycle",
}

BITS_PER_WORD = 63
MAX_BOUND = (1 << 20) - 1  # steps must fit beside the instruction count in one word


@njit(cache=True)
def _decode_entries(n, index, reduced, wr, mv, nx):
    base = 4 * n + 2
    v = index
    start = 0
    has_halt = False
    if reduced:
        first = 2 * (n - 1)
        r = v % first
        v //= first
        wr[0] = r & 1
        mv[0] = 1
        nx[0] = 2 + (r >> 1)
        start = 1
    for e in range(start, 2 * n):
        d = v % base
        v //= base
        if d < 2:
            wr[e] = d
            mv[e] = 0
            nx[e] = 0
            has_halt = True
        else:
            j = d - 2
            wr[e] = j & 1
            mv[e] = -1 if (j >> 1) & 1 == 0 else 1
            nx[e] = 1 + (j >> 2)
    return has_halt


@njit(cache=True)
def _step_machine(n, wr, mv, nx, blank, bound, filters_on, tape, center):
    state = 1
    head = center
    vmin = center
    vmax = center
    steps = 0
    usedmask = 0
    crun = 0
    # Rolling two-step window for the period-two detector: configuration two
    # steps back plus the previous step's written/replaced symbols.
    pp_s = 1
    pp_h = center
    p_s = 1
    p_h = center
    p_w = -1
    p_r = -1
    status = STATUS_EXHAUSTED
    while steps < bound:
        k = tape[head]
        e = (state - 1) * 2 + k
        usedmask |= 1 << e
        w = wr[e]
        s2 = nx[e]
        tape[head] = w
        steps += 1
        if s2 == 0:
            status = STATUS_HALTED
            break
        head += mv[e]
        fresh = False
        if head > vmax:
            vmax = head
            fresh = True
        elif head < vmin:
            vmin = head
            fresh = True
        if filters_on:
            if steps >= 2 and s2 == pp_s and head == pp_h and p_w == p_r and w == k:
                status = STATUS_TWO_CYCLE
                break
            if fresh:
                crun += 1
                if crun > n:
                    status = STATUS_ESCAPEE
                    break
            else:
                crun = 0
        pp_s = p_s
        pp_h = p_h
        p_s = s2
        p_h = head
        p_w = w
        p_r = k
        state = s2
    return status, steps, usedmask, vmin, vmax


@njit(cache=True)
def _pack_output(tape, vmin, vmax, outbits, row):
    m = vmax - vmin + 1
    for ofs in range(m):
        if tape[vmin + ofs] != 0:
            outbits[row, ofs // BITS_PER_WORD] |= 1 << (ofs % BITS_PER_WORD)
    return m


@njit(cache=True)
def _sweep_kernel(n, indices, reduced, blank, bound, filters_on,
                  status, steps_out, used_out, outlen, outbits, tape):
    ne = 2 * n
    wr = np.empty(ne, np.int8)
    mv = np.empty(ne, np.int8)
    nx = np.empty(ne, np.int8)
    center = bound + 1
    for i in range(indices.shape[0]):
        has_halt = _decode_entries(n, indices[i], reduced, wr, mv, nx)
        if filters_on and not has_halt:
            status[i] = STATUS_NO_HALT
            steps_out[i] = 0
            used_out[i] = 0
            outlen[i] = 0
            continue
        st, steps, usedmask, vmin, vmax = _step_machine(
            n, wr, mv, nx, blank, bound, filters_on, tape, center
        )
        status[i] = st
        steps_out[i] = steps
        cnt = 0
        um = usedmask
        while um != 0:
            cnt += um & 1
            um >>= 1
        used_out[i] = cnt
        if st == STATUS_HALTED:
            outlen[i] = _pack_output(tape, vmin, vmax, outbits, i)
        else:
            outlen[i] = 0
        for p in range(vmin, vmax + 1):
            tape[p] = blank


@njit(cache=True)
def _recheck_kernel(n, indices, reduced, blank, bound, status, steps_out, tape):
    ne = 2 * n
    wr = np.empty(ne, np.int8)
    mv = np.empty(ne, np.int8)
    nx = np.empty(ne, np.int8)
    center = bound + 1
    for i in range(indices.shape[0]):
        _decode_entries(n, indices[i], reduced, wr, mv, nx)
        st, steps, usedmask, vmin, vmax = _step_machine(
            n, wr, mv, nx, blank, bound, False, tape, center
        )
        status[i] = st
        steps_out[i] = steps
        for p in range(vmin, vmax + 1):
            tape[p] = blank


@dataclass
class SweepBlock:
    """Raw per-machine results of one batch sweep."""

    n: int
    blank: int
    bound: int
    reduced: bool
    filters: bool
    status: np.ndarray
    steps: np.ndarray
    used: np.ndarray
    outlen: np.ndarray
    outbits: np.ndarray


def _check_args(n: int, blank: int, bound: int) -> None:
    space_size(n)  # validates the state count
    if blank not in (0, 1):
        raise ValueError(f"blank symbol must be 0 or 1, got {blank}")
    if not 1 <= bound <= MAX_BOUND:
        raise ValueError(f"step bound must be in 1..{MAX_BOUND}, got {bound}")


def _check_indices(n: int, indices: np.ndarray, reduced: bool) -> np.ndarray:
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if indices.size:
        limit = reduced_size(n) if reduced else space_size(n)
        lo = int(indices.min())
        hi = int(indices.max())
        if lo < 0 or hi >= limit:
            raise ValueError(
                f"machine index out of range [0, {limit}) for n={n}: saw {lo}..{hi}"
            )
    return indices


def words_for(bound: int) -> int:
    return (bound + BITS_PER_WORD - 1) // BITS_PER_WORD


def sweep(
    n: int,
    indices: np.ndarray,
    *,
    reduced: bool = False,
    blank: int = 0,
    bound: int,
    filters: bool = True,
) -> SweepBlock:
    """Run a block of machines and return per-machine outcome arrays."""
    _check_args(n, blank, bound)
    if reduced and n < 2:
        raise ValueError("reduced enumeration needs at least 2 states")
    indices = _check_indices(n, indices, reduced)
    m = indices.shape[0]
    status = np.empty(m, np.uint8)
    steps = np.empty(m, np.int32)
    used = np.empty(m, np.uint8)
    outlen = np.empty(m, np.int32)
    outbits = np.zeros((m, words_for(bound)), np.int64)
    tape = np.full(2 * bound + 3, blank, np.int8)
    _sweep_kernel(
        n, indices, reduced, blank, bound, filters,
        status, steps, used, outlen, outbits, tape,
    )
    return SweepBlock(n, blank, bound, reduced, filters, status, steps, used, outlen, outbits)


def recheck(
    n: int,
    indices: np.ndarray,
    *,
    reduced: bool = False,
    blank: int = 0,
    bound: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Re-run machines with detectors disabled; returns (status, steps).

    Used by the soundness audit: any STATUS_HALTED here for a machine the
    filters flagged is a filter bug.
    """
    _check_args(n, blank, bound)
    indices = _check_indices(n, indices, reduced)
    m = indices.shape[0]
    status = np.empty(m, np.uint8)
    steps = np.empty(m, np.int32)
    tape = np.full(2 * bound + 3, blank, np.int8)
    _recheck_kernel(n, indices, reduced, blank, bound, status, steps, tape)
    return status, steps


def _row_to_string(row: np.ndarray) -> str:
    length = int(row[0])
    chars = []
    for ofs in range(length):
        word = int(row[1 + ofs // BITS_PER_WORD])
        chars.append("1" if (word >> (ofs % BITS_PER_WORD)) & 1 else "0")
    return "".join(chars)


def aggregate_block(
    block: SweepBlock,
) -> tuple[dict[str, tuple[int, int, int]], int, int]:
    """Reduce a sweep block to ({string: (count, min_n, min_t)}, nonhalting, exhausted)."""
    status = block.status
    nonhalting = int(
        np.count_nonzero(
            (status == STATUS_NO_HALT)
            | (status == STATUS_ESCAPEE)
            | (status == STATUS_TWO_CYCLE)
        )
    )
    exhausted = int(np.count_nonzero(status == STATUS_EXHAUSTED))
    mask = status == STATUS_HALTED
    records: dict[str, tuple[int, int, int]] = {}
    m = int(np.count_nonzero(mask))
    if m:
        width = block.outbits.shape[1] + 1
        rows = np.empty((m, width), dtype=np.int64)
        rows[:, 0] = block.outlen[mask]
        rows[:, 1:] = block.outbits[mask]
        rows = np.ascontiguousarray(rows)
        void = rows.view([("", np.int64)] * width).ravel()
        _, first_idx, inverse, counts = np.unique(
            void, return_index=True, return_inverse=True, return_counts=True
        )
        # Lexicographic (instructions used, steps) minimum per string, packed
        # into one word so a single minimum reduction finds both.
        combined = (block.used[mask].astype(np.int64) << 20) | block.steps[mask].astype(np.int64)
        best = np.full(first_idx.shape[0], np.int64(1) << 40, dtype=np.int64)
        np.minimum.at(best, inverse, combined)
        step_mask = (1 << 20) - 1
        for u in range(first_idx.shape[0]):
            s = _row_to_string(rows[first_idx[u]])
            records[s] = (int(counts[u]), int(best[u]) >> 20, int(best[u]) & step_mask)
    return records, nonhalting, exhausted


def halting_steps_histogram(block: SweepBlock) -> dict[int, int]:
    """Runtime histogram of the halting machines in a block."""
    steps = block.steps[block.status == STATUS_HALTED]
    if steps.size == 0:
        return {}
    counts = np.bincount(steps)
    return {int(k): int(c) for k, c in enumerate(counts) if c}


def warmup() -> None:
    """Force kernel compilation (useful before forking worker processes)."""
    idx = np.arange(4, dtype=np.int64)
    sweep(2, idx, bound=10)
    sweep(2, idx, reduced=True, bound=10, blank=1)
    recheck(2, idx, bound=10)
