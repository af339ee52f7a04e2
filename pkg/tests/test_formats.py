"""Canonical text formats: round trips, tamper detection, atomic writes."""

import os

import pytest

from ctmlab import formats
from ctmlab.enumeration import Aggregate, RunMeta
from ctmlab.formats import (
    Checkpoint,
    FormatError,
    dumps_aggregate,
    dumps_checkpoint,
    dumps_runtime_hist,
    load_aggregate,
    load_checkpoint,
    load_runtime_hist,
    loads_aggregate,
    loads_checkpoint,
    save_aggregate,
    save_checkpoint,
    save_runtime_hist,
)


def tiny_aggregate(with_hist=False):
    meta = RunMeta(n=2, bound=100, mode="raw-full", blank="0")
    agg = Aggregate.empty(meta, with_hist=with_hist)
    agg.add_record("0", 6, 1, 1)
    agg.add_record("1", 4, 1, 1)
    agg.add_record("00", 2, 2, 3)
    agg.add_record("010", 1, 2, 5)
    agg.nonhalting = 5
    agg.exhausted = 2
    agg.machines_total = 20
    if with_hist:
        agg.runtime_hist = {1: 10, 3: 2, 5: 1}
    return agg


def test_aggregate_round_trip_bytes(tmp_path, completed2):
    for agg in (tiny_aggregate(), completed2):
        text = dumps_aggregate(agg)
        again = loads_aggregate(text)
        assert dumps_aggregate(again) == text
        assert again.records == agg.records
        assert again.meta == agg.meta
        path = tmp_path / "agg.tsv"
        save_aggregate(agg, path)
        assert dumps_aggregate(load_aggregate(path)) == text


def test_aggregate_header_layout():
    lines = dumps_aggregate(tiny_aggregate()).split("\n")
    assert lines[0] == "# ctm-aggregate 1"
    headers = [line for line in lines[1:] if line.startswith("# ")]
    keys = [line.removeprefix("# ").split("=")[0] for line in headers]
    assert keys == formats.AGGREGATE_KEYS
    assert keys[-1] == "codec"
    assert lines[len(headers) + 1] == ""


def test_aggregate_rows_sorted_by_length_then_lex():
    body = dumps_aggregate(tiny_aggregate()).split("\n\n", 1)[1]
    strings = [row.split("\t")[0] for row in body.strip().split("\n")]
    assert strings == ["0", "1", "00", "010"]


def test_aggregate_tamper_detection():
    text = dumps_aggregate(tiny_aggregate())

    with pytest.raises(FormatError):
        loads_aggregate(text.replace("0\t6\t1\t1", "0\t7\t1\t1"))  # sum breaks
    with pytest.raises(FormatError):
        loads_aggregate(text.replace("# halting=13", "# halting=14"))
    with pytest.raises(FormatError):
        loads_aggregate(text.replace("# bound=100\n", ""))  # missing header
    with pytest.raises(FormatError):
        loads_aggregate(text.replace("ctm-aggregate 1", "ctm-aggregate 2"))
    with pytest.raises(FormatError):
        loads_aggregate(text.replace("# codec=1", "# codec=9"))
    with pytest.raises(FormatError):
        loads_aggregate(text.replace("# symbols=2", "# symbols=3"))
    with pytest.raises(FormatError):
        loads_aggregate(text.rstrip("\n"))  # missing final newline
    with pytest.raises(FormatError):
        loads_aggregate(text.replace("0\t6\t1\t1", "0\t6\t1"))  # short row

    # swap two rows out of canonical order
    swapped = text.replace("0\t6\t1\t1\n1\t4\t1\t1", "1\t4\t1\t1\n0\t6\t1\t1")
    assert swapped != text
    with pytest.raises(FormatError):
        loads_aggregate(swapped)


def test_checkpoint_round_trip(tmp_path):
    agg = tiny_aggregate()
    for completed in (frozenset(), frozenset({0, 1, 2, 3, 7, 9, 10})):
        cp = Checkpoint(digest="ab" * 32, chunk_count=12, completed=completed, aggregate=agg)
        text = dumps_checkpoint(cp)
        again = loads_checkpoint(text)
        assert again == cp
        assert dumps_checkpoint(again) == text
        path = tmp_path / "c.ckpt"
        save_checkpoint(cp, path)
        assert load_checkpoint(path) == cp


def test_checkpoint_range_compaction():
    cp = Checkpoint(
        digest="d" * 64,
        chunk_count=70,
        completed=frozenset(range(64)) | {65},
        aggregate=tiny_aggregate(),
    )
    assert "# completed=0-63,65" in dumps_checkpoint(cp)
    empty = Checkpoint("d" * 64, 70, frozenset(), tiny_aggregate())
    assert "# completed=-" in dumps_checkpoint(empty)


def test_checkpoint_rejects_out_of_range_ids():
    cp = Checkpoint("d" * 64, 4, frozenset({0, 5}), tiny_aggregate())
    with pytest.raises(FormatError):
        loads_checkpoint(dumps_checkpoint(cp))


def test_runtime_hist_round_trip(tmp_path):
    agg = tiny_aggregate(with_hist=True)
    text = dumps_runtime_hist(agg)
    path = tmp_path / "hist.tsv"
    save_runtime_hist(agg, path)
    meta, hist = load_runtime_hist(path)
    assert meta == agg.meta
    assert hist == agg.runtime_hist
    assert path.read_text() == text


def test_runtime_hist_requires_histogram():
    with pytest.raises(ValueError):
        dumps_runtime_hist(tiny_aggregate(with_hist=False))


def test_runtime_hist_tamper_detection(tmp_path):
    text = dumps_runtime_hist(tiny_aggregate(with_hist=True))
    path = tmp_path / "hist.tsv"

    path.write_text(text.replace("1\t10", "1\t11"))
    with pytest.raises(FormatError):
        load_runtime_hist(path)

    path.write_text(text.replace("3\t2\n5\t1", "5\t1\n3\t2"))
    with pytest.raises(FormatError):
        load_runtime_hist(path)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.tsv"
    save_aggregate(tiny_aggregate(), target)
    save_aggregate(tiny_aggregate(), target)  # overwrite path too
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out.tsv"]
