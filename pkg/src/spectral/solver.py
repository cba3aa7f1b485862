"""
Three-Point Spectral Gradient Solver
====================================

   1. seed x_{-1} = x_0, ᾱ_0 = alpha0
   2. stop when the gradient test holds (or a budget is exhausted)
   3. d_k = −ᾱ_k g_k
   4. λ_k from the relaxed generalized Armijo search, x_{k+1} = x_k + λ_k d_k
   5. ᾱ_{k+1} = safeguard(raw_step(rule, history), beta(history))

One call to minimize() is single-threaded and deterministic (apart from the
wall-clock budget); independent calls may run concurrently.
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .errors import ConfigError, FileError, LineSearchError, NotDescentDirectionError
from .linesearch import LineSearchConfig, positive_int, search
from .problems import Problem
from .stepsize import IterateHistory, SafeguardConfig, StepSizeRule, beta, raw_step, safeguard

logger = logging.getLogger(__name__)

TOL_MODES = {"relative": "relative", "rel": "relative", "absolute": "absolute", "abs": "absolute"}
TRACE_COLUMNS = ["k", "f", "gnorm", "alpha_bar", "lambda", "p"]
FLOAT_FORMAT = "%.17g"


class SolverStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    TIMEOUT = "Timeout"
    LINE_SEARCH_FAIL = "LineSearchFail"
    NON_FINITE_VALUE = "NonFiniteValue"
    # only assigned by the benchmark runner when a cell raises
    ERROR = "Error"


# =============================================================================
# CONFIGURATION
# =============================================================================

@dataclass(frozen=True)
class SolverConfig:
    """
    Full parameter set of one run. Defaults are the reference experiment
    settings (relative tolerance 1e-6, 10000 iterations, 600 s).
    """
    rule: StepSizeRule = StepSizeRule.TBB1
    safeguard: SafeguardConfig = field(default_factory=SafeguardConfig)
    linesearch: LineSearchConfig = field(default_factory=LineSearchConfig)
    tol: float = 1e-6
    tol_mode: str = "relative"
    max_iters: int = 10000
    max_time_seconds: float = 600.0
    alpha0: float = 1.0
    keep_points: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rule", StepSizeRule(self.rule))
        mode = TOL_MODES.get(str(self.tol_mode).lower())
        if mode is None:
            raise ConfigError(f"tol_mode must be relative|absolute, got '{self.tol_mode}'")
        object.__setattr__(self, "tol_mode", mode)
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if not positive_int(self.max_iters):
            raise ConfigError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not self.max_time_seconds > 0:
            raise ConfigError(f"max_time_seconds must be positive, got {self.max_time_seconds}")
        if not self.safeguard.alpha_min <= self.alpha0 <= self.safeguard.alpha_max:
            raise ConfigError(
                f"alpha0={self.alpha0} outside [{self.safeguard.alpha_min}, {self.safeguard.alpha_max}]"
            )

    def with_rule(self, rule: StepSizeRule) -> "SolverConfig":
        return replace(self, rule=StepSizeRule(rule))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["rule"] = self.rule.value
        return data


# =============================================================================
# RESULTS
# =============================================================================

@dataclass(frozen=True)
class IterationRecord:
    k: int
    f: float
    gnorm: float
    alpha_bar: float
    lam: float
    p: int


@dataclass(frozen=True, eq=False)
class SolverResult:
    status: SolverStatus
    x_final: np.ndarray
    f_final: float
    gnorm_final: float
    trace: Tuple[IterationRecord, ...]
    n_f_evals: int
    n_g_evals: int
    wall_time_seconds: float
    rule: StepSizeRule = StepSizeRule.TBB1
    problem: str = ""
    points: Optional[Tuple[np.ndarray, ...]] = None

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def converged(self) -> bool:
        return self.status is SolverStatus.CONVERGED

    def summary_line(self) -> str:
        """`status iters f_final gnorm time_s`"""
        return (
            f"{self.status.value} {self.iterations} {self.f_final:.10e} "
            f"{self.gnorm_final:.6e} {self.wall_time_seconds:.3f}"
        )

    def trace_frame(self) -> pd.DataFrame:
        rows = [(r.k, r.f, r.gnorm, r.alpha_bar, r.lam, r.p) for r in self.trace]
        frame = pd.DataFrame(rows, columns=TRACE_COLUMNS)
        return frame.astype({"k": "int64", "p": "int64", "f": float, "gnorm": float,
                             "alpha_bar": float, "lambda": float})

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "rule": self.rule.value,
            "status": self.status.value,
            "iterations": self.iterations,
            "f_final": self.f_final,
            "gnorm_final": self.gnorm_final,
            "n_f_evals": self.n_f_evals,
            "n_g_evals": self.n_g_evals,
            "wall_time_seconds": self.wall_time_seconds,
        }


def export_trace(result: SolverResult, path: Union[str, Path]) -> Path:
    """Write the trace as CSV (`k,f,gnorm,alpha_bar,lambda,p`, 17 significant digits)."""
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        result.trace_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise FileError(path, e.strerror or str(e)) from e
    logger.info(f"Trace with {result.iterations} rows written to {path}")
    return path


# =============================================================================
# ALGORITHM
# =============================================================================

def direction(alpha_bar: float, g: np.ndarray) -> np.ndarray:
    """d = −ᾱ g"""
    return -alpha_bar * g


def check_stop(gnorm_k: float, gnorm_0: float, cfg: SolverConfig) -> bool:
    """
    relative: ‖g_k‖ < tol·‖g_0‖ (a zero initial gradient stops immediately)
    absolute: ‖g_k‖ <= tol
    """
    if cfg.tol_mode == "relative":
        return gnorm_0 <= 0.0 or gnorm_k < cfg.tol * gnorm_0
    return gnorm_k <= cfg.tol


def _finite(value: float, vector: Optional[np.ndarray] = None) -> bool:
    if not math.isfinite(value):
        return False
    return vector is None or bool(np.all(np.isfinite(vector)))


def minimize(problem: Problem, cfg: SolverConfig) -> SolverResult:
    """
    Minimize problem from its start point with the configured step-size rule.

    Numerical trouble never raises: line-search failure, non-finite values
    and exhausted budgets are reported through SolverResult.status.

    Args:
        problem: Objective with analytic gradient
        cfg: Solver configuration

    Returns:
        SolverResult with the per-iteration trace and exact evaluation counts
    """
    started = time.perf_counter()
    ls_cfg = cfg.linesearch

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        x = np.array(problem.start_point, dtype=float)
        f = float(problem.value_at(x))
        g = np.asarray(problem.gradient_at(x), dtype=float)
        n_f, n_g = 1, 1
        gnorm = float(np.linalg.norm(g))
        gnorm0 = gnorm

        trace: List[IterationRecord] = []
        points: List[np.ndarray] = [x] if cfg.keep_points else []
        status: Optional[SolverStatus] = None

        if not _finite(f, g):
            status = SolverStatus.NON_FINITE_VALUE
        else:
            history = IterateHistory.seed(x, g)
            alpha_bar = cfg.alpha0

        k = 0
        while status is None:
            if check_stop(gnorm, gnorm0, cfg):
                status = SolverStatus.CONVERGED
                break
            if k >= cfg.max_iters:
                status = SolverStatus.MAX_ITERS
                break
            if time.perf_counter() - started > cfg.max_time_seconds:
                status = SolverStatus.TIMEOUT
                break

            d = direction(alpha_bar, g)
            try:
                outcome = search(problem.value_at, x, f, g, d, alpha_bar, ls_cfg)
            except LineSearchError as e:
                n_f += e.n_evals
                logger.warning(f"{problem.name}/{cfg.rule.value}: {e} at k={k}")
                status = SolverStatus.LINE_SEARCH_FAIL
                break
            except NotDescentDirectionError as e:
                logger.warning(f"{problem.name}/{cfg.rule.value}: {e} at k={k}")
                status = SolverStatus.LINE_SEARCH_FAIL
                break
            n_f += outcome.n_evals

            g_new = np.asarray(problem.gradient_at(outcome.x_new), dtype=float)
            n_g += 1
            if not _finite(outcome.f_new, g_new):
                status = SolverStatus.NON_FINITE_VALUE
                break

            trace.append(IterationRecord(k, f, gnorm, alpha_bar, outcome.lam, outcome.p))
            logger.debug(
                f"k={k} f={f:.6e} |g|={gnorm:.3e} alpha_bar={alpha_bar:.4g} "
                f"lambda={outcome.lam:.4g} p={outcome.p}"
            )

            x, f, g = outcome.x_new, outcome.f_new, g_new
            gnorm = float(np.linalg.norm(g))
            if cfg.keep_points:
                points.append(x)

            history = history.shift(x, g)
            alpha_bar = safeguard(raw_step(cfg.rule, history), beta(history), cfg.safeguard)
            k += 1

    elapsed = time.perf_counter() - started
    logger.info(
        f"{problem.name} n={problem.dim} rule={cfg.rule.value}: {status.value} "
        f"after {len(trace)} iterations ({elapsed:.3f}s, f={f:.6e}, |g|={gnorm:.3e})"
    )
    return SolverResult(
        status=status,
        x_final=x,
        f_final=f,
        gnorm_final=gnorm,
        trace=tuple(trace),
        n_f_evals=n_f,
        n_g_evals=n_g,
        wall_time_seconds=elapsed,
        rule=cfg.rule,
        problem=problem.name,
        points=tuple(points) if cfg.keep_points else None,
    )
