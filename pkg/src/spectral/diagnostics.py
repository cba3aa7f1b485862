"""
Convergence Diagnostics
=======================
Post-hoc rate analysis of a solver run against a known minimizer:

  - root_rate:           (e_K / e_0)^(1/K), the empirical R-linear factor
  - superlinear_ratios:  e_{k+1} / e_k
  - secant_residuals:    ‖s_k/(λ_k ᾱ_k) − G(x*) s_k‖ / ‖s_k‖, with G(x*)·v by
                         central differences of the gradient; tends to zero
                         exactly when the iterates converge superlinearly
  - monotone_descent:    f_k nonincreasing
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import FileError, NonFiniteEvaluationError
from .problems import Problem
from .solver import FLOAT_FORMAT, SolverResult

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)


@dataclass
class RateReport:
    root_rate: Optional[float]
    superlinear_ratios: List[float] = field(default_factory=list)
    secant_residuals: Optional[List[Optional[float]]] = None
    monotone: bool = True
    value_root_rate: Optional[float] = None
    errors: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def root_rate(errors: Sequence[float]) -> Optional[float]:
    """
    (errors[K] / errors[0])^(1/K) for the last K whose error is above
    10·eps·errors[0].

    Returns:
        The rate, or None when no entry after the first is above rounding noise
    """
    e = np.asarray(errors, dtype=float)
    if e.size < 2 or not e[0] > 0:
        return None
    above = np.nonzero(e[1:] > 10.0 * EPS * e[0])[0]
    if above.size == 0:
        return None
    K = int(above[-1]) + 1
    return float((e[K] / e[0]) ** (1.0 / K))


def superlinear_ratios(errors: Sequence[float]) -> List[float]:
    e = np.asarray(errors, dtype=float)
    if e.size < 2 or np.any(e <= 0):
        raise ValueError("superlinear_ratios needs at least two positive errors")
    return (e[1:] / e[:-1]).tolist()


def monotone_descent(f_values: Sequence[float]) -> bool:
    f = np.asarray(f_values, dtype=float)
    if f.size == 0:
        raise ValueError("monotone_descent needs at least one value")
    return bool(np.all(f[1:] <= f[:-1]))


def hessian_fd_step(x: np.ndarray) -> float:
    """eps^(1/3)·(1 + ‖x‖_inf), rounded to a power of two so that h·v is exact."""
    h = EPS ** (1.0 / 3.0) * (1.0 + float(np.max(np.abs(x), initial=0.0)))
    return 2.0 ** round(math.log2(h))


def fd_hessian_vec(problem: Problem, x: np.ndarray, v: np.ndarray, h: Optional[float] = None) -> np.ndarray:
    """
    (∇f(x + h v) − ∇f(x − h v)) / (2h) ≈ G(x)·v

    Raises:
        NonFiniteEvaluationError: gradient is inf/NaN at a probe
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.linalg.norm(v) > 0:
        raise ValueError("fd_hessian_vec needs a nonzero direction")
    if h is None:
        h = hessian_fd_step(x)

    probes = []
    for sign in (1.0, -1.0):
        probe = x + sign * h * v
        grad = np.asarray(problem.gradient_at(probe), dtype=float)
        if not np.all(np.isfinite(grad)):
            raise NonFiniteEvaluationError("gradient", probe)
        probes.append(grad)
    return (probes[0] - probes[1]) / (2.0 * h)


def secant_residuals(
    trace_points: Sequence[Tuple[np.ndarray, float, float]],
    x_star: np.ndarray,
    problem: Problem,
) -> List[Optional[float]]:
    """
    One residual per consecutive pair of trace points.

    Args:
        trace_points: (x_k, λ_k, ᾱ_k) per iteration; the last entry only
            contributes its point
        x_star: Known minimizer
        problem: Objective providing the gradient

    Returns:
        ‖u/(λ_k ᾱ_k) − G(x*) u‖ with u = s_k/‖s_k‖; None where s_k = 0
    """
    residuals: List[Optional[float]] = []
    for (x_k, lam, alpha_bar), (x_next, _, _) in zip(trace_points, trace_points[1:]):
        s = np.asarray(x_next, dtype=float) - np.asarray(x_k, dtype=float)
        s_norm = float(np.linalg.norm(s))
        if not s_norm > 0:
            residuals.append(None)
            continue
        u = s / s_norm
        gu = fd_hessian_vec(problem, x_star, u)
        residuals.append(float(np.linalg.norm(u / (lam * alpha_bar) - gu)))
    return residuals


def _positive_prefix(values: np.ndarray) -> np.ndarray:
    stop = np.nonzero(~(values > 0))[0]
    return values[: stop[0]] if stop.size else values


def rate_report(result: SolverResult, problem: Problem) -> RateReport:
    """
    Diagnostics for a run made with keep_points=True on a problem with a
    known minimizer.
    """
    if result.points is None:
        raise ValueError("rate_report needs a result solved with keep_points=True")
    if problem.known_opt_point is None:
        raise ValueError(f"{problem.name} has no known minimizer")

    x_star = problem.known_opt_point
    errors = np.array([np.linalg.norm(x - x_star) for x in result.points])
    positive = _positive_prefix(errors)
    ratios = superlinear_ratios(positive) if positive.size >= 2 else []

    f_values = [r.f for r in result.trace] + [result.f_final]
    value_rate = None
    if problem.known_opt_value is not None:
        gaps = _positive_prefix(np.abs(np.asarray(f_values) - problem.known_opt_value))
        value_rate = root_rate(gaps)

    triples = [(x, r.lam, r.alpha_bar) for x, r in zip(result.points, result.trace)]
    triples.append((result.points[-1], math.nan, math.nan))

    report = RateReport(
        root_rate=root_rate(positive),
        superlinear_ratios=ratios,
        secant_residuals=secant_residuals(triples, x_star, problem),
        monotone=monotone_descent(f_values),
        value_root_rate=value_rate,
        errors=errors.tolist(),
    )
    logger.info(
        f"{problem.name}: root rate {report.root_rate}, monotone={report.monotone}, "
        f"{len(ratios)} ratios"
    )
    return report


def append_report(report: RateReport, path: Union[str, Path]) -> Path:
    """Append the report to a trace CSV under a `# diagnostics` header."""
    path = Path(path)
    summary = pd.DataFrame([{
        "root_rate": report.root_rate,
        "value_root_rate": report.value_root_rate,
        "monotone": "true" if report.monotone else "false",
    }])
    n = len(report.errors)
    per_k = pd.DataFrame({
        "k": range(n),
        "error": report.errors,
        "ratio": report.superlinear_ratios + [None] * (n - len(report.superlinear_ratios)),
        "secant_residual": (report.secant_residuals or []) + [None] * (n - len(report.secant_residuals or [])),
    })
    per_k = per_k.astype({"error": float, "ratio": float, "secant_residual": float})
    try:
        with open(path, "a", encoding="utf-8", newline="") as fh:
            fh.write("# diagnostics\n")
            summary.to_csv(fh, index=False, float_format=FLOAT_FORMAT, na_rep="NA", lineterminator="\n")
            per_k.to_csv(fh, index=False, float_format=FLOAT_FORMAT, na_rep="NA", lineterminator="\n")
    except OSError as e:
        raise FileError(path, e.strerror or str(e)) from e
    return path
