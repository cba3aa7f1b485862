# Spectral step-size gradient solvers (two-point and three-point rules)
from .errors import (
    ConfigError,
    FileError,
    InvalidDimensionError,
    LineSearchError,
    MissingCellError,
    NonFiniteEvaluationError,
    NotDescentDirectionError,
    SpectralError,
    UnknownProblemError,
)
from .problems import Problem, check_gradient, fd_gradient, get_problem, list_problems, standard_collection
from .stepsize import IterateHistory, SafeguardConfig, StepSizeRule, raw_step, safeguard
from .linesearch import LineSearchConfig, LineSearchOutcome, search
from .solver import SolverConfig, SolverResult, SolverStatus, export_trace, minimize
from .diagnostics import RateReport, append_report, rate_report

__all__ = [
    'SpectralError', 'ConfigError', 'FileError', 'InvalidDimensionError', 'LineSearchError',
    'MissingCellError', 'NonFiniteEvaluationError', 'NotDescentDirectionError', 'UnknownProblemError',
    'Problem', 'check_gradient', 'fd_gradient', 'get_problem', 'list_problems', 'standard_collection',
    'IterateHistory', 'SafeguardConfig', 'StepSizeRule', 'raw_step', 'safeguard',
    'LineSearchConfig', 'LineSearchOutcome', 'search',
    'SolverConfig', 'SolverResult', 'SolverStatus', 'export_trace', 'minimize',
    'RateReport', 'append_report', 'rate_report',
]
