"""Canonical representation, integer codec, and symmetry transforms for (n,2) Turing machines.

A machine has states 1..n plus the halting state 0, a binary tape alphabet,
and a total transition table with one instruction per (state, read symbol)
pair.  Every entry ranges over the 4n+2 possible instructions (2 halting,
4n stepping), so the full space holds (4n+2)^(2n) machines.  Indices are
mixed-radix encodings of the table and the codec is bijective.

Instruction ordering for index i in [0, 4n+2):
    i = 0 -> halt writing 0, i = 1 -> halt writing 1;
    i >= 2 -> with j = i - 2: write j mod 2, move left if (j//2) mod 2 == 0
    else right, next state 1 + j//4.
Table digit order: entry (state s, symbol k) is mixed-radix digit position
2(s-1) + k, least significant first, base 4n+2.

The reduced space keeps only machines whose (1, 0) entry steps right into a
state in 2..n.  Its first-entry ordering for r in [0, 2(n-1)): write r mod 2,
next state 2 + r//2; the remaining 2n-1 entries use the full ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

MIN_STATES = 1
MAX_STATES = 5  # keeps every space count within unsigned 64-bit range

LEFT = -1
RIGHT = 1
HALT_STATE = 0


@dataclass(frozen=True)
class Instruction:
    """One transition-table entry.

    A halting instruction writes its symbol, does not move (move 0) and
    enters the halting state 0.  A stepping instruction writes, moves one
    cell left (-1) or right (+1), and enters a state in 1..n.
    """

    write: int
    move: int
    next_state: int

    def __post_init__(self) -> None:
        if self.write not in (0, 1):
            raise ValueError(f"write symbol must be 0 or 1, got {self.write}")
        if self.next_state == HALT_STATE:
            if self.move != 0:
                raise ValueError("halting instruction has no movement")
        else:
            if self.next_state < 1:
                raise ValueError(f"next state must be >= 1, got {self.next_state}")
            if self.move not in (LEFT, RIGHT):
                raise ValueError(f"move must be -1 or +1, got {self.move}")

    @property
    def is_halt(self) -> bool:
        return self.next_state == HALT_STATE

    @classmethod
    def halt(cls, write: int) -> Instruction:
        return cls(write, 0, HALT_STATE)

    @classmethod
    def step(cls, write: int, move: int, next_state: int) -> Instruction:
        return cls(write, move, next_state)


@dataclass(frozen=True)
class TransitionTable:
    """Total transition map of an (n,2) machine.

    Entry for (state s, symbol k) lives at index 2(s-1) + k.
    """

    n: int
    entries: tuple[Instruction, ...]

    def __post_init__(self) -> None:
        if self.n < MIN_STATES:
            raise ValueError(f"state count must be >= {MIN_STATES}, got {self.n}")
        if len(self.entries) != 2 * self.n:
            raise ValueError(
                f"table for n={self.n} needs {2 * self.n} entries, got {len(self.entries)}"
            )
        for instr in self.entries:
            if instr.next_state > self.n:
                raise ValueError(
                    f"next state {instr.next_state} out of range for n={self.n}"
                )

    def entry(self, state: int, symbol: int) -> Instruction:
        if not 1 <= state <= self.n:
            raise ValueError(f"state {state} out of range 1..{self.n}")
        if symbol not in (0, 1):
            raise ValueError(f"symbol must be 0 or 1, got {symbol}")
        return self.entries[2 * (state - 1) + symbol]


def _check_supported(n: int) -> None:
    if not MIN_STATES <= n <= MAX_STATES:
        raise ValueError(f"state count {n} outside supported range {MIN_STATES}..{MAX_STATES}")


def instruction_count(n: int) -> int:
    """Number of possible instructions per table entry: 4n+2."""
    if n < MIN_STATES:
        raise ValueError(f"state count must be >= {MIN_STATES}, got {n}")
    return 4 * n + 2


def space_size(n: int) -> int:
    """Number of (n,2) machines: (4n+2)^(2n)."""
    _check_supported(n)
    return (4 * n + 2) ** (2 * n)


def reduced_size(n: int) -> int:
    """Number of machines in the reduced space: 2(n-1)(4n+2)^(2n-1)."""
    _check_supported(n)
    return 2 * (n - 1) * (4 * n + 2) ** (2 * n - 1)


def instruction_from_index(n: int, i: int) -> Instruction:
    """Instruction at position i of the canonical per-entry ordering."""
    if not 0 <= i < 4 * n + 2:
        raise ValueError(f"instruction index {i} out of range 0..{4 * n + 1}")
    if i < 2:
        return Instruction.halt(i)
    j = i - 2
    move = LEFT if (j >> 1) & 1 == 0 else RIGHT
    return Instruction.step(j & 1, move, 1 + (j >> 2))


def instruction_index(instr: Instruction) -> int:
    """Position of an instruction in the canonical per-entry ordering."""
    if instr.is_halt:
        return instr.write
    dir_bit = 0 if instr.move == LEFT else 1
    return 2 + instr.write + 2 * dir_bit + 4 * (instr.next_state - 1)


def decode(n: int, index: int) -> TransitionTable:
    """Table at a given full-space index (inverse of encode)."""
    _check_supported(n)
    if not 0 <= index < space_size(n):
        raise ValueError(f"machine index {index} out of range for n={n}")
    base = 4 * n + 2
    entries = []
    v = index
    for _ in range(2 * n):
        entries.append(instruction_from_index(n, v % base))
        v //= base
    return TransitionTable(n, tuple(entries))


def encode(table: TransitionTable) -> int:
    """Full-space index of a table (inverse of decode)."""
    _check_supported(table.n)
    base = 4 * table.n + 2
    index = 0
    for instr in reversed(table.entries):
        index = index * base + instruction_index(instr)
    return index


def in_reduced_form(table: TransitionTable) -> bool:
    """True iff entry (1,0) steps right into a state in 2..n."""
    first = table.entry(1, 0)
    return not first.is_halt and first.move == RIGHT and first.next_state >= 2


def decode_reduced(n: int, index: int) -> TransitionTable:
    """Table at a given reduced-space index.

    The reduced space requires n >= 2; its size is 2(n-1)(4n+2)^(2n-1).
    """
    _check_supported(n)
    if n < 2:
        raise ValueError("reduced enumeration needs at least 2 states")
    if not 0 <= index < reduced_size(n):
        raise ValueError(f"reduced index {index} out of range for n={n}")
    first_count = 2 * (n - 1)
    r = index % first_count
    v = index // first_count
    entries = [Instruction.step(r & 1, RIGHT, 2 + (r >> 1))]
    base = 4 * n + 2
    for _ in range(2 * n - 1):
        entries.append(instruction_from_index(n, v % base))
        v //= base
    return TransitionTable(n, tuple(entries))


def encode_reduced(table: TransitionTable) -> int:
    """Reduced-space index of a table in reduced form."""
    if not in_reduced_form(table):
        raise ValueError("table is not in reduced form")
    n = table.n
    first = table.entries[0]
    r = first.write + 2 * (first.next_state - 2)
    base = 4 * n + 2
    rest = 0
    for instr in reversed(table.entries[1:]):
        rest = rest * base + instruction_index(instr)
    return rest * 2 * (n - 1) + r


def mirror(table: TransitionTable) -> TransitionTable:
    """Left-right symmetric machine: every stepping move negated."""
    entries = tuple(
        instr if instr.is_halt else Instruction.step(instr.write, -instr.move, instr.next_state)
        for instr in table.entries
    )
    return TransitionTable(table.n, entries)


def swap_symbols(table: TransitionTable) -> TransitionTable:
    """0-1 symmetric machine: read keys and written symbols both swapped."""
    entries = []
    for state in range(1, table.n + 1):
        for symbol in (0, 1):
            source = table.entry(state, 1 - symbol)
            if source.is_halt:
                entries.append(Instruction.halt(1 - source.write))
            else:
                entries.append(
                    Instruction.step(1 - source.write, source.move, source.next_state)
                )
    return TransitionTable(table.n, tuple(entries))
