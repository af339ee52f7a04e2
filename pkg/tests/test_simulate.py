"""Behavioral checks for the reference interpreter."""

from ctmlab.machines import (
    LEFT,
    RIGHT,
    Instruction,
    TransitionTable,
    decode,
    mirror,
    space_size,
    swap_symbols,
)
from ctmlab.simulate import (
    Exhausted,
    Filtered,
    FilterKind,
    Halted,
    has_halt_transition,
    run,
)


def table_with(n, overrides, default=Instruction.halt(0)):
    entries = [default] * (2 * n)
    for (state, symbol), instr in overrides.items():
        entries[(state - 1) * 2 + symbol] = instr
    return TransitionTable(n, tuple(entries))


def test_immediate_halter():
    table = table_with(2, {(1, 0): Instruction.halt(1)})
    out = run(table, blank=0, bound=100)
    assert out == Halted(output="1", steps=1, used_count=1)


def test_two_step_machine_writes_11():
    table = table_with(2, {
        (1, 0): Instruction.step(1, RIGHT, 2),
        (2, 0): Instruction.halt(1),
    })
    out = run(table, blank=0, bound=100)
    assert out == Halted(output="11", steps=2, used_count=2)


def test_stay_in_state_one_is_an_escapee():
    table = table_with(2, {(1, 0): Instruction.step(0, RIGHT, 1)})
    out = run(table, blank=0, bound=100)
    # fresh cells 1, 2, 3: the counter passes n=2 on the third fresh cell
    assert out == Filtered(which=FilterKind.ESCAPEE, steps=3)


def test_right_runner_fires_after_two_fresh_cells_at_one_state():
    table = table_with(1, {(1, 0): Instruction.step(0, RIGHT, 1)},
                       default=Instruction.halt(0))
    out = run(table, blank=0, bound=100)
    assert out == Filtered(which=FilterKind.ESCAPEE, steps=2)


def test_ping_pong_fires_period_two_detector_at_step_two():
    table = table_with(2, {
        (1, 0): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(0, LEFT, 1),
    })
    out = run(table, blank=0, bound=100)
    assert out == Filtered(which=FilterKind.TWO_CYCLE, steps=2)


def test_flipping_ping_pong_defeats_both_detectors():
    # bounces between two cells but flips them on every visit, so the tape
    # never matches two steps earlier and no cell is ever fresh twice; the
    # state-3 halt entries exist but are unreachable
    table = table_with(3, {
        (1, 0): Instruction.step(1, RIGHT, 2),
        (1, 1): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(1, LEFT, 1),
        (2, 1): Instruction.step(0, LEFT, 1),
    })
    out = run(table, blank=0, bound=50)
    assert out == Exhausted(bound=50)


def test_state_loop_of_period_three_is_not_caught():
    # states cycle 1 -> 2 -> 3 -> 1 while drifting right one cell per lap;
    # the period-two comparison never matches and no detector fires
    table = table_with(3, {
        (1, 0): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(0, LEFT, 3),
        (3, 0): Instruction.step(0, RIGHT, 1),
    })
    out = run(table, blank=0, bound=60)
    assert out == Exhausted(bound=60)


def test_filters_off_runs_to_the_bound():
    table = table_with(2, {
        (1, 0): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(0, LEFT, 1),
    })
    out = run(table, blank=0, bound=40, filters=False)
    assert out == Exhausted(bound=40)


def test_no_halt_transition_is_filtered_statically():
    table = table_with(2, {
        (1, 0): Instruction.step(0, RIGHT, 2),
        (1, 1): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(0, LEFT, 1),
        (2, 1): Instruction.step(0, LEFT, 1),
    })
    out = run(table, blank=0, bound=100)
    assert out == Filtered(which=FilterKind.NO_HALT_TRANSITION, steps=0)


def test_has_halt_transition():
    assert has_halt_transition(decode(2, 0))
    all_step = table_with(2, {
        (1, 0): Instruction.step(0, RIGHT, 2),
        (1, 1): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(0, LEFT, 1),
        (2, 1): Instruction.step(1, LEFT, 1),
    })
    assert not has_halt_transition(all_step)


def test_has_halt_transition_count_over_the_whole_two_state_space():
    count = sum(has_halt_transition(decode(2, v)) for v in range(space_size(2)))
    # 10^4 tables minus the 8^4 built only from the 8 non-halting instructions
    assert count == 10_000 - 8 ** 4 == 5_904


def test_determinism():
    table = decode(2, 4711)
    assert run(table, blank=0, bound=100) == run(table, blank=0, bound=100)


def test_halted_invariants_exhaustive_two_state():
    halted = 0
    for v in range(space_size(2)):
        out = run(decode(2, v), blank=0, bound=200)
        if isinstance(out, Halted):
            halted += 1
            assert 1 <= len(out.output) <= out.steps <= 200
            assert 1 <= out.used_count <= 4
            assert set(out.output) <= {"0", "1"}
    assert halted > 0


def test_mirror_property_exhaustive_two_state():
    for v in range(space_size(2)):
        table = decode(2, v)
        out = run(table, blank=0, bound=100)
        mirrored = run(mirror(table), blank=0, bound=100)
        if isinstance(out, Halted):
            assert isinstance(mirrored, Halted)
            assert mirrored.output == out.output[::-1]
            assert mirrored.steps == out.steps
            assert mirrored.used_count == out.used_count
        else:
            assert type(mirrored) is type(out)
            if isinstance(out, Filtered):
                assert mirrored.which == out.which
                assert mirrored.steps == out.steps


def test_complement_property_exhaustive_two_state():
    flip = str.maketrans("01", "10")
    for v in range(space_size(2)):
        table = decode(2, v)
        for blank in (0, 1):
            out = run(table, blank=blank, bound=100)
            swapped = run(swap_symbols(table), blank=1 - blank, bound=100)
            if isinstance(out, Halted):
                assert isinstance(swapped, Halted)
                assert swapped.output == out.output.translate(flip)
                assert swapped.steps == out.steps
                assert swapped.used_count == out.used_count
            else:
                assert type(swapped) is type(out)
                if isinstance(out, Filtered):
                    assert swapped.which == out.which
                    assert swapped.steps == out.steps


def test_bound_is_respected():
    table = table_with(2, {
        (1, 0): Instruction.step(1, RIGHT, 2),
        (2, 1): Instruction.step(1, LEFT, 1),
        (1, 1): Instruction.step(0, RIGHT, 2),
        (2, 0): Instruction.step(0, LEFT, 1),
    })
    out = run(table, blank=0, bound=7, filters=False)
    assert out == Exhausted(bound=7)
