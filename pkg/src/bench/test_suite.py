"""Tests for the benchmark suite runner and its CSV records."""

import numpy as np
import pytest

from src.bench.suite import (
    RECORD_COLUMNS,
    BenchRecord,
    export_records,
    format_table,
    load_records,
    run_suite,
)
from src.spectral.errors import FileError
from src.spectral.problems import Problem, get_problem, make_ext_rosenbrock
from src.spectral.solver import SolverConfig, SolverStatus
from src.spectral.stepsize import StepSizeRule

RULES = [StepSizeRule.BB1, StepSizeRule.TBB2P]


def _problems():
    return [get_problem("ext_rosenbrock", 20), get_problem("bdqrtic", 20)]


class TestRunSuite:

    def test_problem_major_order(self):
        records = run_suite(_problems(), RULES, SolverConfig(), progress=False)
        assert [(r.problem, r.rule) for r in records] == [
            ("ext_rosenbrock", "bb1"), ("ext_rosenbrock", "tbb2p"),
            ("bdqrtic", "bb1"), ("bdqrtic", "tbb2p"),
        ]

    def test_f_gap_only_with_known_optimum(self):
        records = run_suite(_problems(), RULES, SolverConfig(), progress=False)
        for r in records:
            assert (r.f_gap is None) == (r.problem == "bdqrtic")
            assert r.iters <= SolverConfig().max_iters

    def test_budget_exhaustion_is_a_record(self):
        records = run_suite([make_ext_rosenbrock(10)], RULES, SolverConfig(max_iters=1), progress=False)
        assert [r.status for r in records] == [SolverStatus.MAX_ITERS.value] * 2
        assert all(r.iters == 1 for r in records)

    def test_raising_cell_is_captured(self):
        def explode(x):
            raise RuntimeError("boom")

        broken = Problem("broken", 2, explode, explode, [1.0, 1.0])
        records = run_suite([broken, make_ext_rosenbrock(2)], [StepSizeRule.BB1], SolverConfig(), progress=False)
        assert records[0].status == SolverStatus.ERROR.value
        assert records[1].status == SolverStatus.CONVERGED.value

    def test_parallel_matches_sequential(self, tmp_path):
        cfg = SolverConfig()
        seq = run_suite(_problems(), list(StepSizeRule), cfg, workers=1, progress=False)
        par = run_suite(_problems(), list(StepSizeRule), cfg, workers=4, progress=False)
        strip = lambda rs: [(r.problem, r.n, r.rule, r.status, r.iters, r.f_evals, r.g_evals, r.f_gap) for r in rs]
        assert strip(seq) == strip(par)

    def test_empty_inputs(self):
        with pytest.raises(ValueError):
            run_suite([], RULES, SolverConfig())


class TestRecordsCsv:

    def test_header_only_for_empty_list(self, tmp_path):
        path = export_records([], tmp_path / "empty.csv")
        assert path.read_text() == ",".join(RECORD_COLUMNS) + "\n"

    def test_rows_and_markers(self, tmp_path):
        records = run_suite(_problems(), RULES, SolverConfig(), progress=False)
        lines = export_records(records, tmp_path / "records.csv").read_text().splitlines()
        assert lines[0] == "problem,n,rule,status,iters,f_evals,g_evals,time_s,f_gap"
        assert len(lines) == 5
        assert lines[3].endswith(",NA")

    def test_round_trip(self, tmp_path):
        records = [
            BenchRecord("ext_rosenbrock", 20, "bb1", "Converged", 12, 20, 13, 0.0125, 1.2345678901234567e-11),
            BenchRecord("bdqrtic", 20, "tbb1p", "MaxIters", 10000, 12000, 10001, 1.5, None),
        ]
        path = export_records(records, tmp_path / "r.csv")
        assert load_records(path) == records

    def test_reals_survive_exactly(self, tmp_path):
        rng = np.random.default_rng(42)
        gaps = (10.0 ** rng.uniform(-16, 2, size=200)) * rng.uniform(1, 10, size=200)
        records = [
            BenchRecord("raydan1", 10, "bb1", "Converged", i, i, i, float(t), float(gap))
            for i, (t, gap) in enumerate(zip(rng.uniform(0, 5, size=200), gaps))
        ]
        loaded = load_records(export_records(records, tmp_path / "r.csv"))
        assert [r.f_gap for r in loaded] == [r.f_gap for r in records]
        assert [r.time_seconds for r in loaded] == [r.time_seconds for r in records]

    def test_identical_bytes_apart_from_time(self, tmp_path):
        cfg = SolverConfig()
        runs = [run_suite(_problems(), RULES, cfg, progress=False) for _ in range(2)]
        fixed = [[BenchRecord(**{**r.to_dict(), "time_seconds": 0.0}) for r in run] for run in runs]
        a = export_records(fixed[0], tmp_path / "a.csv").read_bytes()
        b = export_records(fixed[1], tmp_path / "b.csv").read_bytes()
        assert a == b

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileError):
            load_records(tmp_path / "missing.csv")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("problem,n\nx,2\n")
        with pytest.raises(FileError):
            load_records(path)

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(FileError):
            export_records([], tmp_path / "no" / "such" / "dir" / "r.csv")

    def test_table(self):
        records = [BenchRecord("ext_rosenbrock", 10, "tbb2p", "Converged", 20, 25, 21, 0.01, 2e-10)]
        table = format_table(records)
        assert "TBB2'" in table and "IT" in table and "2.0000e-10" in table
