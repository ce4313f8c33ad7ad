"""Instance I/O, baseline solvers and the repetition harness."""

from .baselines import baseline_d2ts, baseline_random_subqubo
from .harness import ALGORITHMS, BenchReport, RunRecord, load_reference_optima, run_benchmark
from .io import (
    InstanceFile,
    ParseError,
    detect_format,
    load_instances,
    parse_orlib,
    parse_palubeckis,
    write_orlib,
    write_palubeckis,
)

__all__ = [
    "ALGORITHMS", "BenchReport", "InstanceFile", "ParseError", "RunRecord",
    "baseline_d2ts", "baseline_random_subqubo", "detect_format", "load_instances", "load_reference_optima",
    "parse_orlib", "parse_palubeckis", "run_benchmark", "write_orlib", "write_palubeckis",
]
