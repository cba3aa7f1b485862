"""
Benchmark Suite
===============
Runs every (problem, rule) cell through the solver and collects the metrics
reported in the experiment tables: iterations (IT), time (T) and the final
objective gap |f_opt − f*|.

Records are always returned problem-major, rule-minor, whatever order the
cells finished in.
"""

import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import pandas as pd
from tqdm import tqdm
from tqdm.contrib.concurrent import thread_map

from src.spectral.errors import FileError
from src.spectral.problems import Problem
from src.spectral.solver import FLOAT_FORMAT, SolverConfig, SolverStatus, minimize
from src.spectral.stepsize import StepSizeRule

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["problem", "n", "rule", "status", "iters", "f_evals", "g_evals", "time_s", "f_gap"]
NA = "NA"


@dataclass(frozen=True)
class BenchRecord:
    problem: str
    n: int
    rule: str
    status: str
    iters: int
    f_evals: int
    g_evals: int
    time_seconds: float
    f_gap: Optional[float] = None

    @property
    def solved(self) -> bool:
        return self.status == SolverStatus.CONVERGED.value

    def to_dict(self) -> dict:
        return asdict(self)

    def to_row(self) -> dict:
        """CSV row keyed by RECORD_COLUMNS."""
        row = asdict(self)
        row["time_s"] = row.pop("time_seconds")
        return row


def _run_cell(cell: Tuple[Problem, StepSizeRule, SolverConfig]) -> BenchRecord:
    problem, rule, cfg = cell
    try:
        result = minimize(problem, cfg.with_rule(rule))
    except Exception as e:
        logger.error(f"{problem.name} n={problem.dim} rule={rule.value} raised: {e}")
        return BenchRecord(
            problem=problem.name, n=problem.dim, rule=rule.value,
            status=SolverStatus.ERROR.value, iters=0, f_evals=0, g_evals=0, time_seconds=0.0,
        )

    f_gap = None
    if problem.known_opt_value is not None:
        f_gap = abs(result.f_final - problem.known_opt_value)
    return BenchRecord(
        problem=problem.name,
        n=problem.dim,
        rule=rule.value,
        status=result.status.value,
        iters=result.iterations,
        f_evals=result.n_f_evals,
        g_evals=result.n_g_evals,
        time_seconds=result.wall_time_seconds,
        f_gap=f_gap,
    )


def run_suite(
    problems: Sequence[Problem],
    rules: Sequence[StepSizeRule],
    base_cfg: SolverConfig,
    workers: int = 1,
    progress: bool = True,
) -> List[BenchRecord]:
    """
    Solve every problem with every rule.

    Args:
        problems: Problems to run (outer loop)
        rules: Step-size rules (inner loop)
        base_cfg: Configuration specialized per rule with SolverConfig.with_rule
        workers: Thread count; 1 runs the cells sequentially
        progress: Show a tqdm progress bar

    Returns:
        One BenchRecord per (problem, rule), problem-major
    """
    if not problems or not rules:
        raise ValueError("run_suite needs at least one problem and one rule")

    cells = [(p, StepSizeRule(r), base_cfg) for p in problems for r in rules]
    logger.info(f"Running {len(problems)} problems x {len(rules)} rules ({len(cells)} cells)")

    if workers > 1:
        records = thread_map(
            _run_cell, cells, max_workers=workers, desc="Benchmark cells", disable=not progress
        )
    else:
        records = [_run_cell(c) for c in tqdm(cells, desc="Benchmark cells", disable=not progress)]

    solved = sum(r.solved for r in records)
    logger.info(f"Suite finished: {solved}/{len(records)} cells converged")
    return list(records)


# =============================================================================
# CSV EXPORT / IMPORT
# =============================================================================

def records_frame(records: Sequence[BenchRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([r.to_row() for r in records], columns=RECORD_COLUMNS)
    return frame.astype({
        "n": "int64", "iters": "int64", "f_evals": "int64", "g_evals": "int64",
        "time_s": float, "f_gap": float,
    })


def export_records(records: Sequence[BenchRecord], path: Union[str, Path]) -> Path:
    """
    Write `problem,n,rule,status,iters,f_evals,g_evals,time_s,f_gap`, reals
    with 17 significant digits and unknown gaps as NA.
    """
    path = Path(path)
    try:
        records_frame(records).to_csv(
            path, index=False, float_format=FLOAT_FORMAT, na_rep=NA, lineterminator="\n"
        )
    except OSError as e:
        raise FileError(path, e.strerror or str(e)) from e
    logger.info(f"{len(records)} records written to {path}")
    return path


def load_records(path: Union[str, Path]) -> List[BenchRecord]:
    """Read a records CSV written by export_records."""
    path = Path(path)
    try:
        frame = pd.read_csv(
            path, na_values=[NA], keep_default_na=False, dtype={"problem": str, "rule": str},
            float_precision="round_trip",
        )
    except FileNotFoundError as e:
        raise FileError(path, "no such file") from e
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FileError(path, str(e)) from e

    missing = [c for c in RECORD_COLUMNS if c not in frame.columns]
    if missing:
        raise FileError(path, f"missing columns {missing}")

    records = []
    for row in frame.itertuples(index=False):
        f_gap = None if pd.isna(row.f_gap) else float(row.f_gap)
        records.append(BenchRecord(
            problem=row.problem, n=int(row.n), rule=row.rule, status=row.status,
            iters=int(row.iters), f_evals=int(row.f_evals), g_evals=int(row.g_evals),
            time_seconds=float(row.time_s), f_gap=f_gap,
        ))
    logger.info(f"Loaded {len(records)} records from {path}")
    return records


def format_table(records: Sequence[BenchRecord]) -> str:
    """Experiment-style table: one row per (problem, n, rule) with IT, T and the gap."""
    rows = []
    for r in records:
        try:
            label = StepSizeRule(r.rule).label
        except ValueError:
            label = r.rule
        rows.append({
            "problem": r.problem,
            "N": r.n,
            "method": label,
            "status": r.status,
            "IT": r.iters,
            "T": f"{r.time_seconds:.4f}",
            "|f_opt - f*|": NA if r.f_gap is None else f"{r.f_gap:.4e}",
        })
    if not rows:
        return "(no records)"
    return pd.DataFrame(rows).to_string(index=False)
