"""Exhaustive small Turing machine laboratory.

Enumerates every (n,2) machine (or the symmetry-reduced quarter of the
space), tallies the strings their halting runs produce, and derives
frequency-based complexity measures from the result: occurrence
probability, -log2 complexity scores, minimal-producer depth estimates,
grouped summary tables, correlations, and a runtime-tail fit.
"""

from .enumeration import (
    Aggregate,
    AuditReport,
    RunMeta,
    StringRecord,
    audit_filters,
    complete,
    default_bound,
    enumerate_indices,
    full_oracle,
    sample_run,
)
from .machines import (
    Instruction,
    TransitionTable,
    decode,
    decode_reduced,
    encode,
    encode_reduced,
    in_reduced_form,
    instruction_count,
    mirror,
    reduced_size,
    space_size,
    swap_symbols,
)
from .measures import (
    Distribution,
    StringNotObserved,
    build_distribution,
    instruction_group_table,
    km,
    ld_estimate,
    min_instructions,
    probability,
    runtime_group_table,
)
from .simulate import Exhausted, Filtered, FilterKind, Halted, run
from .stats import (
    CorrelationReport,
    FitError,
    FitResult,
    correlation_report,
    fit_exponential,
    normalize_histogram,
    partial_correlation,
    pearson,
    tail_mass_log10,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "AuditReport",
    "CorrelationReport",
    "Distribution",
    "Exhausted",
    "Filtered",
    "FilterKind",
    "FitError",
    "FitResult",
    "Halted",
    "Instruction",
    "RunMeta",
    "StringNotObserved",
    "StringRecord",
    "TransitionTable",
    "audit_filters",
    "build_distribution",
    "complete",
    "correlation_report",
    "decode",
    "decode_reduced",
    "default_bound",
    "encode",
    "encode_reduced",
    "enumerate_indices",
    "fit_exponential",
    "full_oracle",
    "in_reduced_form",
    "instruction_count",
    "instruction_group_table",
    "km",
    "ld_estimate",
    "min_instructions",
    "mirror",
    "normalize_histogram",
    "partial_correlation",
    "pearson",
    "probability",
    "reduced_size",
    "run",
    "runtime_group_table",
    "sample_run",
    "space_size",
    "swap_symbols",
    "tail_mass_log10",
    "__version__",
]
