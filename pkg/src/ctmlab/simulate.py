"""Reference bounded simulator for (n,2) machines on a blank-filled tape.

Execution starts in state 1 with the head at position 0 and proceeds until
the machine halts, a non-halting detector fires, or the step bound is
exhausted.  The output of a halting machine is the symbol sequence over the
contiguous cells its head has gone through.  Three detectors prove
non-halting online:

* no-halt-transition: the table contains no halting entry (checked before
  the run starts);
* escapee: the head has entered more consecutive never-visited cells than
  the machine has states, so some state already repeated over fresh blanks;
* two-cycle: state, head position, and tape match the situation two steps
  earlier, so the machine loops with period two.

The detectors are sound but deliberately not exhaustive; runs that reach
the bound without halting are reported as exhausted and treated as
non-halting downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .machines import TransitionTable


class FilterKind(Enum):
    NO_HALT_TRANSITION = "no-halt-transition"
    ESCAPEE = "escapee"
    TWO_CYCLE = "two-cycle"


@dataclass(frozen=True)
class Halted:
    output: str
    steps: int
    used_count: int


@dataclass(frozen=True)
class Filtered:
    which: FilterKind
    steps: int


@dataclass(frozen=True)
class Exhausted:
    bound: int


RunOutcome = Halted | Filtered | Exhausted


class Tape:
    """Two-sided unbounded tape; cells not yet written read as the blank symbol.

    visited_min/visited_max track the extent of head positions, which is an
    interval because moves are single cells.
    """

    __slots__ = ("blank", "cells", "visited_min", "visited_max")

    def __init__(self, blank: int):
        if blank not in (0, 1):
            raise ValueError(f"blank symbol must be 0 or 1, got {blank}")
        self.blank = blank
        self.cells: dict[int, int] = {}
        self.visited_min = 0
        self.visited_max = 0

    def read(self, pos: int) -> int:
        return self.cells.get(pos, self.blank)

    def write(self, pos: int, symbol: int) -> None:
        self.cells[pos] = symbol

    def visit(self, pos: int) -> None:
        if pos < self.visited_min:
            self.visited_min = pos
        elif pos > self.visited_max:
            self.visited_max = pos


def extract_output(tape: Tape) -> str:
    """Symbols of the visited interval, left to right, as a 0/1 string."""
    return "".join(
        str(tape.read(p)) for p in range(tape.visited_min, tape.visited_max + 1)
    )


@dataclass(frozen=True)
class CycleRecord:
    """What one step did: configuration before it, symbol written, symbol replaced."""

    state_before: int
    head_before: int
    written: int
    prior: int


@dataclass
class Configuration:
    """Mutable run state: machine configuration plus detector bookkeeping."""

    state: int = 1
    head: int = 0
    steps: int = 0
    used: set[tuple[int, int]] = field(default_factory=set)
    escapee_run: int = 0
    cycle_window: list[CycleRecord] = field(default_factory=list)


def has_halt_transition(table: TransitionTable) -> bool:
    return any(instr.is_halt for instr in table.entries)


def escapee_check(config: Configuration, n: int) -> bool:
    """Fires once the head has crossed more consecutive fresh cells than states."""
    return config.escapee_run > n


def two_cycle_check(config: Configuration) -> bool:
    """Fires when the configuration two steps back has recurred.

    Only the two cells written in the intervening steps can have changed, so
    the tape matches exactly when each of those writes replaced the symbol
    already there.
    """
    if config.steps < 2 or len(config.cycle_window) < 2:
        return False
    before_last, last = config.cycle_window
    return (
        config.state == before_last.state_before
        and config.head == before_last.head_before
        and before_last.written == before_last.prior
        and last.written == last.prior
    )


def run(
    table: TransitionTable,
    blank: int = 0,
    bound: int = 500,
    filters: bool = True,
) -> RunOutcome:
    """Execute one machine and classify the outcome.

    With filters enabled the three detectors may report provable
    non-halting; with filters disabled the machine simply runs to halt or
    bound, which is what the soundness audit relies on.
    """
    if bound < 1:
        raise ValueError(f"step bound must be >= 1, got {bound}")
    if filters and not has_halt_transition(table):
        return Filtered(FilterKind.NO_HALT_TRANSITION, 0)

    tape = Tape(blank)
    config = Configuration()
    while config.steps < bound:
        symbol = tape.read(config.head)
        config.used.add((config.state, symbol))
        instr = table.entry(config.state, symbol)
        tape.write(config.head, instr.write)
        config.steps += 1
        if instr.is_halt:
            config.state = 0
            return Halted(extract_output(tape), config.steps, len(config.used))

        entered = config.head + instr.move
        fresh = entered < tape.visited_min or entered > tape.visited_max
        tape.visit(entered)
        config.cycle_window.append(
            CycleRecord(config.state, config.head, instr.write, symbol)
        )
        del config.cycle_window[:-2]
        config.state = instr.next_state
        config.head = entered

        if filters:
            # Fixed detector order keeps the reported filter deterministic.
            if two_cycle_check(config):
                return Filtered(FilterKind.TWO_CYCLE, config.steps)
            if fresh:
                config.escapee_run += 1
            else:
                config.escapee_run = 0
            if escapee_check(config, table.n):
                return Filtered(FilterKind.ESCAPEE, config.steps)

    return Exhausted(bound)
