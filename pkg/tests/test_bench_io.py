import csv
import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyqubo import QuboProblem, SolverConfig, TabuConfig, evaluate, tabu_search
from hyqubo.bench import (
    BenchReport,
    ParseError,
    baseline_d2ts,
    baseline_random_subqubo,
    detect_format,
    load_instances,
    load_reference_optima,
    parse_orlib,
    parse_palubeckis,
    run_benchmark,
    write_orlib,
    write_palubeckis,
)
from hyqubo.bench.harness import CSV_COLUMNS, RunRecord
from hyqubo.driver import INIT, stream
from conftest import brute_force_min, random_problem


def orlib_text(problems):
    """Positive-sense (maximization) triplet text for matrices given as upper triangles."""
    lines = [str(len(problems))]
    for U in problems:
        entries = [(i + 1, j + 1, int(U[i, j])) for i, j in zip(*np.nonzero(np.triu(U)))]
        lines.append(f"{U.shape[0]} {len(entries)}")
        lines += [f"{i} {j} {v}" for i, j, v in entries]
    return "\n".join(lines) + "\n"


class TestParseOrlib:
    def test_hand_example(self):
        inst = parse_orlib("1\n2 2\n1 1 5\n1 2 -3\n", name="tiny")
        (p,) = inst.problems
        assert p.n == 2 and p.negated and p.name == "tiny.1"
        assert p.Q.tolist() == [[-5, 3], [3, 0]]

    def test_empty_list(self):
        assert parse_orlib("0\n").problems == []

    def test_multiple_problems(self, rng):
        mats = [np.triu(rng.integers(-9, 10, (k, k))) for k in (3, 5, 4)]
        inst = parse_orlib(orlib_text(mats), name="set")
        assert [p.n for p in inst.problems] == [3, 5, 4]
        assert [p.name for p in inst.problems] == ["set.1", "set.2", "set.3"]
        for U, p in zip(mats, inst.problems):
            assert np.array_equal(-p.Q, U + np.triu(U, 1).T)

    @pytest.mark.parametrize("text,line", [
        ("1\n3 2\n1 1 4\n", 4),            # truncated
        ("1\n2 1\n1 3 4\n", 3),            # index out of range
        ("1\n2 1\n0 1 4\n", 3),
        ("1\n2 1\n1 1 x\n", 3),            # bad token
        ("1\n2 2\n1 1 4\n2 2\n", 4),       # entry line too short
        ("1\n2 1\n1 1 4\n2 2 1\n", 4),     # more entries than declared
        ("2\n2 1\n1 1 4\n", 4),            # missing second problem
    ])
    def test_located_errors(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_orlib(text, source="f.txt")
        assert exc.value.line == line
        assert f"f.txt:{line}:" in str(exc.value)

    def test_negation_consistency(self, rng):
        # a maximization optimum of the raw matrix scores minus that value after parsing
        U = np.triu(rng.integers(-20, 21, (10, 10)))
        raw = U + np.triu(U, 1).T
        best_x = max(itertools.product((0, 1), repeat=10),
                     key=lambda x: int(np.array(x) @ raw @ np.array(x)))
        maximum = int(np.array(best_x) @ raw @ np.array(best_x))
        (p,) = parse_orlib(orlib_text([U])).problems
        assert evaluate(p, best_x) == -maximum
        assert brute_force_min(p.Q) == -maximum

    @settings(max_examples=40, deadline=None)
    @given(st.text(alphabet="0123456789 -\n", max_size=60))
    def test_parser_totality(self, text):
        try:
            inst = parse_orlib(text)
        except ParseError:
            return
        for p in inst.problems:
            assert np.array_equal(p.Q, p.Q.T)


class TestParsePalubeckis:
    def test_header_size(self):
        inst = parse_palubeckis("5000 0.1 123\n1 2 7\n4999 5000 -3\n", name="p5000")
        (p,) = inst.problems
        assert p.n == 5000 and inst.meta["density"] == 0.1 and inst.meta["seed"] == 123
        assert p.Q[0, 1] == p.Q[1, 0] == -7 and p.Q[4998, 4999] == 3

    def test_empty_body_warns(self):
        with pytest.warns(UserWarning):
            inst = parse_palubeckis("4\n")
        assert not inst.problems[0].Q.any()

    @pytest.mark.parametrize("text,line", [
        ("3\n1 4 1\n", 2),
        ("3\n1 2\n", 2),
        ("x 0.1\n", 1),
        ("3 0.5\n1 2 3\n\n2 3 q\n", 4),
    ])
    def test_located_errors(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_palubeckis(text)
        assert exc.value.line == line

    def test_round_trip_canonical(self, rng):
        U = np.triu(rng.integers(-50, 51, (30, 30)) * (rng.random((30, 30)) < 0.3))
        entries = [(i + 1, j + 1, int(U[i, j])) for i, j in zip(*np.nonzero(U))]
        text = "30 0.3 7\n" + "".join(f"{i} {j} {v}\n" for i, j, v in entries)
        first = parse_palubeckis(text).problems[0]
        assert write_palubeckis(first) == text
        again = parse_palubeckis(write_palubeckis(first)).problems[0]
        assert np.array_equal(again.Q, first.Q)

    def test_orlib_round_trip(self, rng):
        mats = [np.triu(rng.integers(-9, 10, (k, k))) for k in (4, 6)]
        text = orlib_text(mats)
        assert write_orlib(parse_orlib(text).problems) == text


class TestLoading:
    def test_detect_and_load(self, tmp_path):
        a = tmp_path / "set.txt"
        a.write_text("1\n2 2\n1 1 5\n1 2 -3\n")
        b = tmp_path / "p.txt"
        b.write_text("3 0.5 9\n1 2 4\n")
        assert detect_format(a.read_text()) == "orlib"
        assert detect_format(b.read_text()) == "palubeckis"
        inst = load_instances(a)
        assert inst.format == "orlib" and inst.problems[0].name == "set.1"
        assert len(inst.checksum) == 64
        assert load_instances(b).problems[0].n == 3

    def test_reference_table(self):
        ref = load_reference_optima()
        assert ref["bqp2500.1"] == -1515944 and ref["bqp2500.2"] == -1471392
        assert len(ref) == 10


class TestBaselines:
    def test_single_round_d2ts_is_plain_tabu(self, rng):
        p = random_problem(rng, 40)
        cfg = SolverConfig(epoch_cap=1, seed=3)
        r = baseline_d2ts(p, cfg)
        x0 = stream(3, INIT, 0).integers(0, 2, 40, dtype=np.int8)
        plain = tabu_search(p, x0, TabuConfig(alpha=4 * 5 * 40, tenure_c=1))
        assert r.objective == min(plain.ov_min, evaluate(p, x0))
        assert r.trace.meta["alpha"] == 20 * 40
        assert r.trace.meta["label"] == "simplified reimplementation"

    @pytest.mark.parametrize("baseline", [baseline_d2ts, baseline_random_subqubo])
    def test_small_instances_reach_optimum(self, baseline):
        rng = np.random.default_rng(31)
        hits = 0
        for seed in range(100):
            p = random_problem(rng, int(rng.integers(2, 21)))
            hits += baseline(p, SolverConfig(seed=seed)).objective == brute_force_min(p.Q)
        assert hits >= 90

    def test_random_subqubo_audit_flags(self, rng):
        r = baseline_random_subqubo(random_problem(rng, 30), SolverConfig(epoch_cap=2, m=10))
        meta = r.trace.meta
        assert meta["subset_selection"] == "uniform" and meta["ising_machine"] is True
        assert meta["mutation"] is False and meta["annealer"] is None and meta["m"] == 10

    @pytest.mark.parametrize("baseline", [baseline_d2ts, baseline_random_subqubo])
    def test_non_increasing(self, rng, baseline):
        series = baseline(random_problem(rng, 60), SolverConfig(epoch_cap=8, m=20)).trace.best_series
        assert all(b <= a for a, b in zip(series, series[1:]))


class TestHarness:
    def problems(self, rng):
        return [random_problem(rng, 12, name="a"), random_problem(rng, 14, name="b")]

    def test_zero_repetitions(self, rng, tmp_path):
        report = run_benchmark(self.problems(rng), ["hybrid"], 0, out_dir=tmp_path)
        assert report.runs == [] and report.aggregates() == []
        rows = list(csv.reader(io.StringIO((tmp_path / "results.csv").read_text())))
        assert rows == [CSV_COLUMNS]

    def test_byte_identical_reruns(self, rng, tmp_path):
        probs = self.problems(rng)
        cfg = SolverConfig(epoch_cap=3, sa_sweeps=100)
        outs = []
        for k, workers in enumerate((1, 3)):
            d = tmp_path / str(k)
            run_benchmark(probs, ["hybrid", "d2ts", "random_subqubo"], 2, cfg,
                          out_dir=d, workers=workers, record_timing=False)
            outs.append({f.relative_to(d).as_posix(): f.read_bytes()
                         for f in sorted(d.rglob("*")) if f.is_file()})
        assert outs[0] == outs[1]
        assert len([k for k in outs[0] if k.startswith("traces/")]) == 12

    def test_success_rate_arithmetic(self, rng):
        probs = self.problems(rng)
        ref = {"a": brute_force_min(probs[0].Q)}
        report = run_benchmark(probs, ["hybrid"], 3, SolverConfig(epoch_cap=5, sa_sweeps=100), ref)
        agg = {row["instance"]: row for row in report.aggregates()}
        reached = sum(r.reached for r in report.runs if r.instance == "a")
        assert agg["a"]["success_rate"] == f"{reached}/3"
        assert agg["b"]["success_rate"] == "n/a" and agg["b"]["successes"] is None
        data = json.loads(report.to_json())
        assert len(data["runs"]) == 6
        for row in data["aggregates"]:
            runs = [r for r in data["runs"] if r["instance"] == row["instance"]]
            assert row["median_epochs_to_best"] == float(np.median([r["epochs_to_best"] for r in runs]))
            assert (row["successes"] or 0) <= len(runs)

    def test_seeds_are_distinct(self, rng):
        report = run_benchmark(self.problems(rng)[:1], ["d2ts"], 4, SolverConfig(epoch_cap=1, seed=10))
        assert [r.seed for r in report.runs] == [10, 11, 12, 13]

    def test_unknown_algorithm(self, rng):
        with pytest.raises(ValueError):
            run_benchmark(self.problems(rng), ["qbsolv"], 1)

    def test_report_fields(self):
        run = RunRecord("x", "hybrid", 0, -5, -5, True, 3, 1, 1, 0.0, None, [0, -5])
        report = BenchReport([run])
        assert report.series_csv().splitlines()[1:] == ["x,hybrid,0,0,0", "x,hybrid,0,1,-5"]
        assert report.aggregates()[0]["success_rate"] == "1/1"
