"""Repeated-run benchmark harness with success-rate and epoch statistics."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from ..driver import SolveResult, SolverConfig, solve
from ..problem import QuboProblem
from .baselines import baseline_d2ts, baseline_random_subqubo

ALGORITHMS: dict[str, Callable[[QuboProblem, SolverConfig], SolveResult]] = {
    "hybrid": lambda p, c: solve(p, c, mode="full"),
    "no_sm": lambda p, c: solve(p, c, mode="no_sm"),
    "no_im": lambda p, c: solve(p, c, mode="no_im"),
    "d2ts": baseline_d2ts,
    "random_subqubo": baseline_random_subqubo,
}

CSV_COLUMNS = [
    "instance", "algorithm", "seed", "best", "reference", "reached",
    "epochs", "epochs_to_best", "epochs_to_reference", "wall_time", "trace_file",
]


def load_reference_optima(path=None) -> dict[str, int]:
    """Reference minima keyed by problem name; the bundled bqp2500 table by default."""
    if path is None:
        text = resources.files("hyqubo").joinpath("data/reference_optima.json").read_text()
    else:
        text = Path(path).read_text()
    return {k: int(v) for k, v in json.loads(text).items() if not k.startswith("_")}


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    seed: int
    best: int
    reference: int | None
    reached: bool | None
    epochs: int
    epochs_to_best: int
    epochs_to_reference: int | None
    wall_time: float
    trace_file: str | None
    series: list[int] = field(default_factory=list, repr=False)


@dataclass
class BenchReport:
    runs: list[RunRecord] = field(default_factory=list)

    def aggregates(self) -> list[dict]:
        groups: dict[tuple[str, str], list[RunRecord]] = {}
        for run in self.runs:
            groups.setdefault((run.instance, run.algorithm), []).append(run)
        rows = []
        for (instance, algorithm), runs in groups.items():
            has_ref = runs[0].reference is not None
            successes = sum(bool(r.reached) for r in runs) if has_ref else None
            rows.append({
                "instance": instance,
                "algorithm": algorithm,
                "runs": len(runs),
                "successes": successes,
                "success_rate": f"{successes}/{len(runs)}" if has_ref else "n/a",
                "best": min(r.best for r in runs),
                "median_epochs_to_best": statistics.median(r.epochs_to_best for r in runs),
            })
        return rows

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for run in self.runs:
            row = asdict(run)
            writer.writerow({k: "" if row[k] is None else row[k] for k in CSV_COLUMNS})
        return out.getvalue()

    def to_json(self) -> str:
        payload = {
            "runs": [{k: v for k, v in asdict(r).items() if k != "series"} for r in self.runs],
            "aggregates": self.aggregates(),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def series_csv(self) -> str:
        """Tidy per-epoch best-objective series for plotting."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["instance", "algorithm", "seed", "epoch", "best"])
        for run in self.runs:
            for epoch, best in enumerate(run.series):
                writer.writerow([run.instance, run.algorithm, run.seed, epoch, best])
        return out.getvalue()

    def write(self, out_dir) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "results.csv").write_text(self.to_csv())
        (out_dir / "results.json").write_text(self.to_json())
        (out_dir / "series.csv").write_text(self.series_csv())


def _trace_name(instance: str, algorithm: str, seed: int) -> str:
    return f"traces/{instance}__{algorithm}__seed{seed}.jsonl"


def run_benchmark(instances: list[QuboProblem], algorithms: list[str], repetitions: int,
                  config: SolverConfig | None = None, reference: dict[str, int] | None = None,
                  out_dir=None, workers: int = 1, record_timing: bool = True) -> BenchReport:
    """Run each (instance, algorithm) pair ``repetitions`` times, seeds ``config.seed + r``.

    With ``out_dir`` set, writes results.csv, results.json, series.csv and one
    trace per run under ``traces/``. ``record_timing=False`` zeroes wall
    times so reruns produce identical bytes.
    """
    config = config or SolverConfig()
    reference = reference or {}
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")
    jobs = [(problem, algo, config.seed + rep)
            for problem in instances for algo in algorithms for rep in range(repetitions)]
    if out_dir is not None:
        (Path(out_dir) / "traces").mkdir(parents=True, exist_ok=True)

    def run(job) -> RunRecord:
        problem, algo, seed = job
        result = ALGORITHMS[algo](problem, config.with_(seed=seed, workers=1))
        ref = reference.get(problem.name)
        trace_file = None
        if out_dir is not None:
            trace_file = _trace_name(problem.name, algo, seed)
            (Path(out_dir) / trace_file).write_text(result.trace.to_jsonl())
        wall = result.trace.records[-1].wall_time if record_timing else 0.0
        return RunRecord(
            instance=problem.name,
            algorithm=algo,
            seed=seed,
            best=result.objective,
            reference=ref,
            reached=None if ref is None else result.objective <= ref,
            epochs=result.epochs,
            epochs_to_best=result.epochs_to_best,
            epochs_to_reference=None if ref is None else result.epochs_to_reach(ref),
            wall_time=round(wall, 6),
            trace_file=trace_file,
            series=result.trace.best_series,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            runs = list(ex.map(run, jobs))
    else:
        runs = [run(job) for job in jobs]
    report = BenchReport(runs=runs)
    if out_dir is not None:
        report.write(out_dir)
    return report
