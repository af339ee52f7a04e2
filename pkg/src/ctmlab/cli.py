"""Command-line surface for enumeration runs, completion, and reports.

Exit codes: 0 success, 1 contract violation (bad file, mismatch, failed
fit, audit violation), 2 usage error, 3 string not observed.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, enumeration, formats, measures, runner, stats

DEFAULT_RECHECK_BOUND = 10_000


def _add_run(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("run", help="enumerate machines and write an aggregate file")
    p.add_argument("--states", type=int, required=True, metavar="N",
                   help="number of machine states (1..5)")
    p.add_argument("--mode", choices=("full", "reduced"), default=None,
                   help="index space to sweep (default: reduced)")
    p.add_argument("--blank", choices=("0", "1", "both"), default="0",
                   help="tape blank symbol (default: 0)")
    p.add_argument("--bound", type=int, default=None, metavar="T",
                   help="step bound (default depends on --states)")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default: ${runner.ENV_WORKERS} or CPU count)")
    p.add_argument("--out", required=True, metavar="FILE",
                   help="aggregate output path")
    p.add_argument("--checkpoint", metavar="FILE", default=None,
                   help="persist progress here and resume from it")
    p.add_argument("--chunk-size", type=int, default=runner.DEFAULT_CHUNK_SIZE,
                   help="machines per work chunk")
    p.add_argument("--filters", choices=("on", "off"), default="on",
                   help="non-halt detectors (default: on)")
    p.add_argument("--runtime-hist", metavar="FILE", default=None,
                   help="also write a histogram of halting runtimes")
    p.add_argument("--sample", type=int, default=None, metavar="COUNT",
                   help="run a uniform random sample instead of the whole space")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed for --sample")
    p.set_defaults(func=cmd_run)


def _add_complete(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("complete", help="expand a raw reduced aggregate to the full space")
    p.add_argument("infile", metavar="RAW")
    p.add_argument("outfile", metavar="COMPLETED")
    p.set_defaults(func=cmd_complete)


def _add_km(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("km", help="per-string complexity report or grouped tables")
    p.add_argument("file", metavar="AGGREGATE")
    p.add_argument("strings", nargs="*", metavar="STRING",
                   help="binary strings to report")
    p.add_argument("--all", action="store_true", help="report every observed string")
    p.add_argument("--table", choices=("instructions", "runtime"), default=None,
                   help="emit a grouped summary table instead")
    p.add_argument("--width", type=int, default=measures.DEFAULT_RUNTIME_GROUP_WIDTH,
                   help="runtime band width for --table runtime")
    p.set_defaults(func=cmd_km)


def _add_validate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("validate",
                       help="check reduced+completion against brute force and audit filters")
    p.add_argument("--states", type=int, required=True, metavar="N")
    p.add_argument("--bound", type=int, default=None, metavar="T")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--recheck-bound", type=int, default=DEFAULT_RECHECK_BOUND,
                   help="detector-free rerun bound for the filter audit")
    p.add_argument("--against", metavar="FILE", default=None,
                   help="also diff a stored aggregate against the brute-force result")
    p.set_defaults(func=cmd_validate)


def _add_stats(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("stats", help="correlation report and optional runtime-tail fit")
    p.add_argument("file", metavar="AGGREGATE")
    p.add_argument("--histogram", metavar="FILE", default=None,
                   help="runtime histogram to fit")
    p.add_argument("--fit-start", metavar="ALPHA,LAMBDA", default=None,
                   help="starting point for the fit (default: log-linear seed)")
    p.add_argument("--tail-cutoff", type=int, default=None, metavar="K",
                   help="cutoff for the tail mass estimate (default: histogram bound)")
    p.set_defaults(func=cmd_stats)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctmlab",
        description="Exhaustive small Turing machine enumeration and "
                    "frequency-based complexity measures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run(sub)
    _add_complete(sub)
    _add_km(sub)
    _add_validate(sub)
    _add_stats(sub)
    return parser


def _print_aggregate_summary(agg: enumeration.Aggregate, path: str) -> None:
    print(
        f"wrote {path}: n={agg.meta.n} mode={agg.meta.mode} blank={agg.meta.blank} "
        f"bound={agg.meta.bound} runs={agg.machines_total} "
        f"halting={agg.halting_total} nonhalting={agg.nonhalting} "
        f"exhausted={agg.exhausted} strings={len(agg.records)}"
    )


def cmd_run(args: argparse.Namespace) -> int:
    mode = args.mode
    if args.sample is not None:
        if mode == "reduced":
            raise ValueError("--sample draws from the full space; use --mode full")
        if args.checkpoint is not None:
            raise ValueError("sampled runs are not resumable; drop --checkpoint")
        agg = enumeration.sample_run(
            args.states,
            args.sample,
            bound=args.bound,
            blank=args.blank,
            seed=args.seed,
            filters=args.filters == "on",
            collect_hist=args.runtime_hist is not None,
        )
        formats.save_aggregate(agg, args.out)
        if args.runtime_hist is not None:
            formats.save_runtime_hist(agg, args.runtime_hist)
    else:
        mode = mode or "reduced"
        filters = args.filters == "on"
        plan = runner.plan_chunks(
            args.states,
            mode=mode,
            blank=args.blank,
            bound=args.bound,
            filters=filters,
            chunk_size=args.chunk_size,
            collect_hist=args.runtime_hist is not None,
        )
        agg = runner.run_to_file(
            plan,
            args.out,
            workers=args.workers,
            checkpoint_path=args.checkpoint,
            hist_path=args.runtime_hist,
        )
    _print_aggregate_summary(agg, args.out)
    return 0


def cmd_complete(args: argparse.Namespace) -> int:
    raw = formats.load_aggregate(args.infile)
    completed = enumeration.complete(raw)
    formats.save_aggregate(completed, args.outfile)
    _print_aggregate_summary(completed, args.outfile)
    return 0


def _format_float(v: float) -> str:
    return f"{v:.10g}"


def _print_string_rows(dist: measures.Distribution, strings: list[str]) -> None:
    print("# string\tkm\tld\tmin_n\tlength")
    for s in strings:
        print(
            f"{s}\t{_format_float(measures.km(dist, s))}"
            f"\t{measures.ld_estimate(dist, s)}"
            f"\t{measures.min_instructions(dist, s)}"
            f"\t{len(s)}"
        )


def cmd_km(args: argparse.Namespace) -> int:
    dist = measures.build_distribution(formats.load_aggregate(args.file))
    chosen = sum((bool(args.strings), args.all, args.table is not None))
    if chosen != 1:
        raise ValueError("choose exactly one of: explicit strings, --all, --table")
    if args.table == "instructions":
        print("# used_n\tstrings\tmean_km\tmean_length")
        for row in measures.instruction_group_table(dist):
            print(
                f"{row.used_n}\t{row.string_count}"
                f"\t{_format_float(row.mean_km)}\t{_format_float(row.mean_length)}"
            )
    elif args.table == "runtime":
        print("# lo\thi\tstrings\tmin_km\tmean_km\tmax_km")
        for row in measures.runtime_group_table(dist, args.width):
            if row.string_count:
                cells = (
                    _format_float(row.min_km),
                    _format_float(row.mean_km),
                    _format_float(row.max_km),
                )
            else:
                cells = ("-", "-", "-")
            print(f"{row.lo}\t{row.hi}\t{row.string_count}\t" + "\t".join(cells))
    elif args.all:
        _print_string_rows(dist, measures.sorted_strings(dist))
    else:
        _print_string_rows(dist, args.strings)
    return 0


def _diff_records(
    name: str, left: enumeration.Aggregate, right: enumeration.Aggregate
) -> bool:
    """Print a verdict line; on mismatch include the first differing record."""
    strings = sorted(set(left.records) | set(right.records), key=lambda s: (len(s), s))
    for s in strings:
        a = left.records.get(s)
        b = right.records.get(s)
        if a != b:
            def fmt(rec: enumeration.StringRecord | None) -> str:
                if rec is None:
                    return "absent"
                return f"count={rec.count},min_n={rec.min_n},min_t={rec.min_t}"

            print(f"{name} FAIL at {s!r}: {fmt(a)} vs {fmt(b)}")
            return False
    tallies = [
        ("machines_total", left.machines_total, right.machines_total),
        ("halting", left.halting_total, right.halting_total),
        ("nonhalting", left.nonhalting, right.nonhalting),
        ("exhausted", left.exhausted, right.exhausted),
    ]
    for key, a_val, b_val in tallies:
        if a_val != b_val:
            print(f"{name} FAIL: {key} {a_val} vs {b_val}")
            return False
    print(f"{name} PASS ({len(strings)} strings, {left.machines_total} runs)")
    return True


def cmd_validate(args: argparse.Namespace) -> int:
    n = args.states
    if n > 4:
        raise ValueError("brute-force validation is limited to 4 states")
    oracle = enumeration.full_oracle(
        n, bound=args.bound, workers=args.workers, collect_hist=True
    )
    plan = runner.plan_chunks(n, mode="reduced", blank="0", bound=args.bound)
    completed = enumeration.complete(runner.orchestrate(plan, workers=args.workers))
    ok = _diff_records("equivalence", completed, oracle)

    audit = enumeration.audit_filters(n, recheck_bound=args.recheck_bound, bound=args.bound)
    verdict = "PASS" if audit.ok else "FAIL"
    print(
        f"filters {verdict} (checked={audit.machines_checked} "
        f"filtered={audit.filtered_total} violations={len(audit.violations)})"
    )
    for index, steps in audit.violations[:10]:
        print(f"  violation: machine {index} halts after {steps} steps")
    ok = ok and audit.ok

    if oracle.runtime_hist:
        print(f"max-halting-runtime {max(oracle.runtime_hist)}")

    if args.against is not None:
        stored = formats.load_aggregate(args.against)
        ok = _diff_records("against", stored, oracle) and ok
    return 0 if ok else 1


def cmd_stats(args: argparse.Namespace) -> int:
    dist = measures.build_distribution(formats.load_aggregate(args.file))
    report = stats.correlation_report(dist)
    print("# metric\tvalue")
    print(f"r_km_n\t{_format_float(report.r_km_n)}")
    print(f"r_km_n_given_len\t{_format_float(report.r_km_n_given_len)}")
    print(f"r_km_ld\t{_format_float(report.r_km_ld)}")
    print(f"r_km_ld_given_len\t{_format_float(report.r_km_ld_given_len)}")
    if args.histogram is not None:
        meta, hist = formats.load_runtime_hist(args.histogram)
        start = None
        if args.fit_start is not None:
            parts = args.fit_start.split(",")
            if len(parts) != 2:
                raise ValueError("--fit-start expects ALPHA,LAMBDA")
            start = (float(parts[0]), float(parts[1]))
        fit = stats.fit_exponential(stats.normalize_histogram(hist), start=start)
        cutoff = meta.bound if args.tail_cutoff is None else args.tail_cutoff
        print(f"alpha\t{_format_float(fit.alpha)}")
        print(f"lambda\t{_format_float(fit.lam)}")
        print(f"rss\t{_format_float(fit.rss)}")
        print(f"iterations\t{fit.iterations}")
        print(f"tail_cutoff\t{cutoff}")
        print(f"tail_mass_log10\t{_format_float(stats.tail_mass_log10(fit.lam, cutoff))}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except measures.StringNotObserved as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
