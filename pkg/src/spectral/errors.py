"""
Spectral Solver Errors
======================
Single exception hierarchy for the solver kit. Every error also derives from
the closest builtin so callers can keep catching ValueError / OSError / ...
"""

from pathlib import Path
from typing import Optional, Union

import numpy as np


class SpectralError(Exception):
    """Base class for every error raised by the solver kit."""


class ConfigError(SpectralError, ValueError):
    """A configuration field is outside its admissible range."""


class InvalidDimensionError(SpectralError, ValueError):
    """A problem was requested with a dimension it does not support."""

    def __init__(self, name: str, n: int, rule: str):
        self.name = name
        self.n = n
        self.rule = rule
        super().__init__(f"{name}: dimension n={n} not supported (requires {rule})")


class UnknownProblemError(SpectralError, KeyError):
    """No problem of that name in the collection."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unknown problem '{self.name}'"


class NonFiniteEvaluationError(SpectralError, ArithmeticError):
    """Objective or gradient evaluated to inf/NaN at a probe point."""

    def __init__(self, what: str, probe: Optional[np.ndarray] = None, index: Optional[int] = None):
        self.what = what
        self.probe = None if probe is None else np.array(probe, copy=True)
        self.index = index
        where = f" at probe {index}" if index is not None else ""
        super().__init__(f"non-finite {what}{where}")


class NotDescentDirectionError(SpectralError, ValueError):
    """g^T d >= 0 where a descent direction was required."""

    def __init__(self, slope: float):
        self.slope = slope
        super().__init__(f"not a descent direction: g^T d = {slope:.6g} >= 0")


class LineSearchError(SpectralError, RuntimeError):
    """Backtracking exhausted its budget without accepting a step."""

    def __init__(self, last_lambda: float, p: int, n_evals: int):
        self.last_lambda = last_lambda
        self.p = p
        self.n_evals = n_evals
        super().__init__(
            f"line search failed after {p} backtracks (last trial lambda={last_lambda:.6g})"
        )


class MissingCellError(SpectralError, KeyError):
    """A (problem, solver) pair is absent from a benchmark grid."""

    def __init__(self, problem: str, solver: str):
        self.problem = problem
        self.solver = solver
        super().__init__((problem, solver))

    def __str__(self) -> str:
        return f"missing benchmark cell: problem={self.problem} solver={self.solver}"


class FileError(SpectralError, OSError):
    """Reading or writing a CSV artifact failed."""

    def __init__(self, path: Union[str, Path], reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")

    def __str__(self) -> str:
        return f"{self.path}: {self.reason}"
