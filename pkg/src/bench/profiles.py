"""
Performance Profiles
====================

For problem p and solver s with cost m[p, s] (failures cost +inf):

   r[p, s] = m[p, s] / min_s' m[p, s']
   P_s(τ)  = |{p : r[p, s] <= τ}| / (number of problems)

A problem every solver failed keeps its place in the denominator and no
solver earns it. Costs are clamped below by one metric unit (1 for counts,
1 µs for time) so a zero-iteration solve never divides by zero.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.spectral.errors import FileError, MissingCellError
from src.spectral.solver import FLOAT_FORMAT

from .suite import BenchRecord

logger = logging.getLogger(__name__)

# metric name -> (BenchRecord attribute, unit)
METRICS: Dict[str, Tuple[str, float]] = {
    "iters": ("iters", 1.0),
    "f_evals": ("f_evals", 1.0),
    "g_evals": ("g_evals", 1.0),
    "time": ("time_seconds", 1e-6),
}


def default_tau_grid(tau_max: float = 16.0, points: int = 50) -> np.ndarray:
    """`points` logarithmically spaced values in [1, tau_max]."""
    if tau_max < 1.0 or points < 1:
        raise ValueError(f"need tau_max >= 1 and points >= 1, got {tau_max}, {points}")
    if points == 1:
        return np.array([1.0])
    return np.logspace(0.0, math.log10(tau_max), points)


@dataclass
class PerformanceProfile:
    metric: str
    solver_names: List[str]
    problem_keys: List[Tuple[str, int]]
    ratios: np.ndarray        # problems x solvers, inf for failures
    tau_grid: np.ndarray
    values: np.ndarray        # len(tau_grid) x solvers

    @property
    def curve(self) -> Dict[str, List[Tuple[float, float]]]:
        """solver -> [(τ, P(τ)), ...]"""
        return {
            name: list(zip(self.tau_grid.tolist(), self.values[:, j].tolist()))
            for j, name in enumerate(self.solver_names)
        }

    def solved_fraction(self) -> Dict[str, float]:
        n = max(len(self.problem_keys), 1)
        return {
            name: float(np.isfinite(self.ratios[:, j]).sum()) / n
            for j, name in enumerate(self.solver_names)
        }


def _ordered_unique(items) -> list:
    return list(dict.fromkeys(items))


def perf_profile(
    records: Sequence[BenchRecord],
    metric: str = "iters",
    tau_grid: Optional[Sequence[float]] = None,
) -> PerformanceProfile:
    """
    Dolan-Moré profile of the rules found in records.

    Args:
        records: A complete (problem, n) x rule grid
        metric: iters | f_evals | g_evals | time
        tau_grid: Increasing grid starting at 1 (default: default_tau_grid())

    Raises:
        MissingCellError: a (problem, rule) pair has no record
        ValueError: unknown metric, empty records or malformed grid
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric '{metric}' (choose from {', '.join(METRICS)})")
    if not records:
        raise ValueError("perf_profile needs at least one record")

    tau = np.asarray(default_tau_grid() if tau_grid is None else tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size == 0 or tau[0] != 1.0 or np.any(np.diff(tau) <= 0):
        raise ValueError("tau grid must be nonempty, strictly increasing and start at 1")

    attr, unit = METRICS[metric]
    problems = _ordered_unique((r.problem, r.n) for r in records)
    solvers = _ordered_unique(r.rule for r in records)
    cells = {((r.problem, r.n), r.rule): r for r in records}

    cost = np.full((len(problems), len(solvers)), np.inf)
    for i, key in enumerate(problems):
        for j, solver in enumerate(solvers):
            record = cells.get((key, solver))
            if record is None:
                raise MissingCellError(f"{key[0]}@{key[1]}", solver)
            if record.solved:
                cost[i, j] = max(float(getattr(record, attr)), unit)

    best = cost.min(axis=1, initial=np.inf)
    ratios = np.full_like(cost, np.inf)
    solved_rows = np.isfinite(best)
    ratios[solved_rows] = cost[solved_rows] / best[solved_rows, None]

    values = (ratios[None, :, :] <= tau[:, None, None]).sum(axis=1) / len(problems)
    logger.info(
        f"Profile on {metric}: {len(problems)} problems, {len(solvers)} solvers, "
        f"{int((~solved_rows).sum())} unsolved by all"
    )
    return PerformanceProfile(
        metric=metric,
        solver_names=solvers,
        problem_keys=problems,
        ratios=ratios,
        tau_grid=tau,
        values=values.astype(float),
    )


def _write(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise FileError(path, e.strerror or str(e)) from e
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def export_profile(profile: PerformanceProfile, path: Union[str, Path]) -> Path:
    """`tau,<solver...>`, one row per grid point."""
    frame = pd.DataFrame({"tau": profile.tau_grid})
    for j, name in enumerate(profile.solver_names):
        frame[name] = profile.values[:, j]
    return _write(frame, path)


def export_ratios(profile: PerformanceProfile, path: Union[str, Path]) -> Path:
    """`problem,n,<solver...>`, failures as inf."""
    frame = pd.DataFrame({
        "problem": [p for p, _ in profile.problem_keys],
        "n": [n for _, n in profile.problem_keys],
    })
    for j, name in enumerate(profile.solver_names):
        frame[name] = profile.ratios[:, j]
    return _write(frame, path)
