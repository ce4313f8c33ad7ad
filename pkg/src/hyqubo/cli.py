"""Command-line front end.

Subcommands: ``solve``, ``bench``, ``sweep``, ``ablate``.

Exit codes: 0 success, 2 instance could not be read or parsed, 64 bad flags
or flag combination.  Settings may come from a ``key=value`` file given by
``--config``; command-line flags win over the file.  The output directory
defaults to ``$HYQUBO_OUTPUT_DIR`` or ``./hyqubo-out``.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from dataclasses import fields
from pathlib import Path

from .bench.harness import ALGORITHMS, load_reference_optima, run_benchmark
from .bench.io import ParseError, load_instances
from .control import ANNEALERS
from .driver import SolverConfig

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_USAGE = 64
OUTPUT_ENV = "HYQUBO_OUTPUT_DIR"

SWEEPABLE = {
    "c": ("tenure_c", int),
    "tenure_c": ("tenure_c", int),
    "z": ("z", int),
    "alpha": ("alpha", int),
    "w1": ("w1", float),
    "w2": ("w2", float),
    "w3": ("w3", float),
    "m": ("m", int),
    "annealer": ("annealer", str),
    "patience": ("patience", int),
    "sa_sweeps": ("sa_sweeps", int),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--z", type=int, default=4, help="solution-set size")
    g.add_argument("--alpha", type=int, default=None, help="tabu iterations (default 5n)")
    g.add_argument("--tenure", "--c", dest="tenure_c", type=int, default=None,
                   help="tabu tenure (default max(1, n // 150))")
    g.add_argument("--w1", type=float, default=1.0)
    g.add_argument("--w2", type=float, default=1.0)
    g.add_argument("--w3", type=float, default=0.5)
    g.add_argument("--m", type=int, default=50, help="Ising machine size")
    g.add_argument("--backend", choices=["annealing", "exact"], default="annealing")
    g.add_argument("--sa-sweeps", type=int, default=1000)
    g.add_argument("--patience", type=int, default=30,
                   help="stop after this many epochs without improvement")
    g.add_argument("--epoch-cap", type=int, default=300)
    g.add_argument("--annealer", choices=sorted(ANNEALERS), default="cosine")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--workers", type=int, default=1)


def _add_common(p, multi_instance=False):
    if multi_instance:
        p.add_argument("--instance", action="append", required=True,
                       help="instance file; repeat for several")
    else:
        p.add_argument("--instance", required=True, help="instance file")
    p.add_argument("--format", choices=["auto", "orlib", "palubeckis"], default="auto")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--config", default=None, help="key=value settings file")
    p.add_argument("--porcelain", action="store_true", help="one key=value per line on stdout")
    _add_solver_flags(p)


def build_parser() -> _Parser:
    parser = _Parser(prog="hyqubo", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="solve one problem")
    _add_common(p)
    p.add_argument("--problem", type=int, default=1, help="1-based problem index in the file")
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="hybrid")

    p = sub.add_parser("bench", help="repeated runs with success rates")
    _add_common(p, multi_instance=True)
    p.add_argument("--problems", default="all", help="comma list of 1-based indices, or 'all'")
    p.add_argument("--algorithms", default="hybrid,d2ts,random_subqubo")
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--reference", default=None, help="JSON of reference minima (default: bundled table)")
    p.add_argument("--no-timing", action="store_true", help="zero wall times for byte-stable reports")

    p = sub.add_parser("sweep", help="vary one hyperparameter")
    _add_common(p)
    p.add_argument("--problem", type=int, default=1)
    p.add_argument("--param", required=True, help=f"one of {', '.join(sorted(SWEEPABLE))}")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--repetitions", type=int, default=1)

    p = sub.add_parser("ablate", help="full solver against no_sm and no_im")
    _add_common(p)
    p.add_argument("--problems", default="all")
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--reference", default=None)
    return parser


# -- config files -----------------------------------------------------------

def read_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _config_path(argv):
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(parser, argv):
    """Install settings from ``--config`` as subcommand defaults so flags still win."""
    path = _config_path(argv)
    command = next((tok for tok in argv if tok in COMMANDS), None)
    if path is None or command is None:
        return
    try:
        cfg = read_config_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    cfg.pop("command", None)
    subparser = parser._subparsers._group_actions[0].choices[command]
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in cfg.items():
        if key not in known or key in ("config", "help"):
            raise UsageError(f"{path}: unknown setting {key!r}")
        action = known[key]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [v.strip() for v in value.split(",") if v.strip()]
        elif value.lower() in ("", "none"):
            defaults[key] = None
        else:
            defaults[key] = value
        action.required = False
    subparser.set_defaults(**defaults)


def write_snapshot(out_dir: Path, ns) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"command={ns.command}"]
    for key, value in sorted(vars(ns).items()):
        if key in ("command", "config"):
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key}={'none' if value is None else value}")
    (out_dir / "config.txt").write_text("\n".join(lines) + "\n")


# -- helpers ----------------------------------------------------------------

def solver_config(ns, **overrides) -> SolverConfig:
    names = {f.name for f in fields(SolverConfig)}
    values = {k: v for k, v in vars(ns).items() if k in names}
    values.update(overrides)
    try:
        return SolverConfig(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out_dir(ns) -> Path:
    return Path(ns.out or os.environ.get(OUTPUT_ENV) or "hyqubo-out")


def _select(problems, spec: str):
    if spec == "all":
        return problems
    try:
        picks = [int(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad problem list {spec!r}") from None
    for k in picks:
        if not 1 <= k <= len(problems):
            raise UsageError(f"problem {k} out of range 1..{len(problems)}")
    return [problems[k - 1] for k in picks]


def _load(paths, fmt):
    problems = []
    for path in paths:
        try:
            problems.extend(load_instances(path, fmt).problems)
        except OSError as exc:
            raise ParseError(f"cannot read instance: {exc}", source=str(path)) from None
    return problems


def _emit(pairs, porcelain, out):
    if porcelain:
        for key, value in pairs:
            out.write(f"{key}={value}\n")
    else:
        out.write(" ".join(f"{k}={v}" for k, v in pairs) + "\n")


def _reference(ns):
    return load_reference_optima(ns.reference) if ns.reference else load_reference_optima()


# -- commands ---------------------------------------------------------------

def cmd_solve(ns, out=sys.stdout, err=sys.stderr) -> int:
    problem = _select(_load([ns.instance], ns.format), str(ns.problem))[0]
    config = solver_config(ns)
    out_dir = _out_dir(ns)
    write_snapshot(out_dir, ns)
    t0 = time.perf_counter()
    result = ALGORITHMS[ns.algorithm](problem, config)
    wall = time.perf_counter() - t0
    trace_path = out_dir / "traces" / f"{problem.name}__{ns.algorithm}__seed{config.seed}.jsonl"
    trace_path.parent.mkdir(parents=True, exist_ok=True)
    trace_path.write_text(result.trace.to_jsonl())
    _emit([
        ("instance", problem.name),
        ("algorithm", ns.algorithm),
        ("seed", config.seed),
        ("best", result.objective),
        ("epochs", result.epochs),
        ("epochs_to_best", result.epochs_to_best),
    ], ns.porcelain, out)
    err.write(f"wall_time={wall:.3f}\n")
    return EXIT_OK


def cmd_bench(ns, out=sys.stdout, err=sys.stderr) -> int:
    problems = _select(_load(ns.instance, ns.format), ns.problems)
    algorithms = [a.strip() for a in ns.algorithms.split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise UsageError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")
    if ns.repetitions < 0:
        raise UsageError("--repetitions must be non-negative")
    out_dir = _out_dir(ns)
    write_snapshot(out_dir, ns)
    report = run_benchmark(problems, algorithms, ns.repetitions, solver_config(ns, workers=1),
                           reference=_reference(ns), out_dir=out_dir, workers=ns.workers,
                           record_timing=not ns.no_timing)
    for row in report.aggregates():
        _emit([("instance", row["instance"]), ("algorithm", row["algorithm"]),
               ("success", row["success_rate"]), ("best", row["best"]),
               ("median_epochs_to_best", row["median_epochs_to_best"])], ns.porcelain, out)
    return EXIT_OK


def _parse_values(param, raw):
    if param not in SWEEPABLE:
        raise UsageError(f"unknown sweep parameter {param!r}; choose from {sorted(SWEEPABLE)}")
    field_name, kind = SWEEPABLE[param]
    try:
        values = [kind(v.strip()) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad value list {raw!r} for {param}") from None
    if not values:
        raise UsageError("--values is empty")
    return field_name, values


def cmd_sweep(ns, out=sys.stdout, err=sys.stderr) -> int:
    field_name, values = _parse_values(ns.param, ns.values)
    problem = _select(_load([ns.instance], ns.format), str(ns.problem))[0]
    base = solver_config(ns)
    for value in values:
        solver_config(ns, **{field_name: value})
    out_dir = _out_dir(ns)
    write_snapshot(out_dir, ns)
    series = io.StringIO()
    summary = io.StringIO()
    sw = csv.writer(series, lineterminator="\n")
    sm = csv.writer(summary, lineterminator="\n")
    sw.writerow(["param", "value", "seed", "epoch", "best"])
    sm.writerow(["param", "value", "seed", "best", "epochs", "epochs_to_best"])
    for value in values:
        for rep in range(ns.repetitions):
            config = base.with_(**{field_name: value, "seed": base.seed + rep})
            result = ALGORITHMS["hybrid"](problem, config)
            for rec in result.trace.records:
                sw.writerow([ns.param, value, config.seed, rec.epoch, rec.best])
            sm.writerow([ns.param, value, config.seed, result.objective, result.epochs,
                         result.epochs_to_best])
            _emit([("param", ns.param), ("value", value), ("seed", config.seed),
                   ("best", result.objective), ("epochs_to_best", result.epochs_to_best)],
                  ns.porcelain, out)
    (out_dir / "sweep_series.csv").write_text(series.getvalue())
    (out_dir / "sweep_summary.csv").write_text(summary.getvalue())
    return EXIT_OK


def cmd_ablate(ns, out=sys.stdout, err=sys.stderr) -> int:
    problems = _select(_load([ns.instance], ns.format), ns.problems)
    config = solver_config(ns)
    reference = _reference(ns)
    out_dir = _out_dir(ns)
    write_snapshot(out_dir, ns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance", "seed", "algorithm", "init_best", "best", "gap", "epochs_to_best"])
    modes = ["hybrid", "no_sm", "no_im"]
    for problem in problems:
        for rep in range(ns.repetitions):
            run_cfg = config.with_(seed=config.seed + rep)
            results = {mode: ALGORITHMS[mode](problem, run_cfg) for mode in modes}
            target = reference.get(problem.name, min(r.objective for r in results.values()))
            for mode in modes:
                r = results[mode]
                gap = r.objective - target
                init_best = r.trace.meta["init_best"]
                writer.writerow([problem.name, run_cfg.seed, mode, init_best, r.objective, gap,
                                 r.epochs_to_best])
                _emit([("instance", problem.name), ("seed", run_cfg.seed), ("algorithm", mode),
                       ("init_best", init_best), ("best", r.objective), ("gap", gap)], ns.porcelain, out)
    (out_dir / "ablation.csv").write_text(buf.getvalue())
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "sweep": cmd_sweep, "ablate": cmd_ablate}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            ns = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        return COMMANDS[ns.command](ns, out=out, err=err)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
