"""
Relaxed Generalized Armijo Line Search
======================================

Backtracking over λ ∈ {1, ω, ω², ...} with the acceptance test

   scaled   (default):  f(x + λd) <= f(x) + μ1·λ·[gᵀd + λ·L·‖d‖² / (2ᾱ)]
   unscaled          :  f(x + λd) <= f(x) + μ1·λ·gᵀd + L·‖d‖² / (2ᾱ)

with the relaxation bound L = θ·ᾱ·(−gᵀd)/‖d‖², θ ∈ [0, 1]. Both forms reduce
to plain generalized Armijo at θ = 0. The scaled form guarantees
f(x + λd) < f(x); the unscaled form may accept an increase.
"""

import logging
import math
import numbers
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, LineSearchError, NotDescentDirectionError

logger = logging.getLogger(__name__)

RELAX_FORMS = ("scaled", "unscaled")


def positive_int(value) -> bool:
    """True for integers >= 1, including integral floats; False for inf, nan and bool."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        return False
    if not math.isfinite(value):
        return False
    return int(value) == value and value >= 1


@dataclass(frozen=True)
class LineSearchConfig:
    mu1: float = 0.32
    mu2: float = 0.32
    omega: float = 0.76
    relax_factor: float = 1.0
    max_backtracks: int = 60
    gamma1: float = 1.0
    gamma2: float = 0.76
    relax_form: str = "scaled"

    def __post_init__(self):
        if not 0.0 < self.mu1 <= self.mu2 < 1.0:
            raise ConfigError(f"need 0 < mu1 <= mu2 < 1, got mu1={self.mu1}, mu2={self.mu2}")
        if not 0.0 < self.omega < 1.0:
            raise ConfigError(f"omega must lie in (0, 1), got {self.omega}")
        if not 0.0 <= self.relax_factor <= 1.0:
            raise ConfigError(f"relax_factor must lie in [0, 1], got {self.relax_factor}")
        if not positive_int(self.max_backtracks):
            raise ConfigError(f"max_backtracks must be a positive integer, got {self.max_backtracks}")
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ConfigError(f"gamma1, gamma2 must be positive, got {self.gamma1}, {self.gamma2}")
        if self.relax_form not in RELAX_FORMS:
            raise ConfigError(f"relax_form must be one of {RELAX_FORMS}, got '{self.relax_form}'")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class LineSearchOutcome:
    """
    Accepted step of one search.

    Attributes:
        lam: Accepted λ = ω^p, built by repeated multiplication
        p: Backtrack count
        f_new: Objective at x_new
        n_evals: Objective evaluations consumed (p + 1)
        x_new: x + lam·d
        lambda_star: Last rejected trial (lam / ω) when p >= 1
        relax_bound: L used in the acceptance test
    """
    lam: float
    p: int
    f_new: float
    n_evals: int
    x_new: np.ndarray
    lambda_star: Optional[float] = None
    relax_bound: float = 0.0


def relax_bound(alpha_bar: float, g: np.ndarray, d: np.ndarray, theta: float) -> float:
    """
    L = θ·ᾱ·(−gᵀd)/‖d‖².

    Raises:
        NotDescentDirectionError: gᵀd >= 0
    """
    slope = float(np.dot(g, d))
    if not slope < 0.0:
        raise NotDescentDirectionError(slope)
    return theta * alpha_bar * (-slope) / float(np.dot(d, d))


def acceptance_rhs(
    f_x: float,
    slope: float,
    dd: float,
    lam: float,
    alpha_bar: float,
    bound: float,
    mu: float,
    form: str = "scaled",
) -> float:
    """Right-hand side of the acceptance test at trial λ."""
    relax = bound * dd / (2.0 * alpha_bar)
    if form == "scaled":
        return f_x + mu * lam * (slope + lam * relax)
    return f_x + mu * lam * slope + relax


def search(
    f_eval: Callable[[np.ndarray], float],
    x: np.ndarray,
    f_x: float,
    g: np.ndarray,
    d: np.ndarray,
    alpha_bar: float,
    cfg: LineSearchConfig,
) -> LineSearchOutcome:
    """
    Backtrack from λ = 1 until the acceptance test holds.

    Non-finite trial values count as rejections.

    Args:
        f_eval: Objective
        x: Current point
        f_x: f(x), supplied by the caller
        g: ∇f(x)
        d: Descent direction
        alpha_bar: Safeguarded step that built d
        cfg: Line-search parameters

    Returns:
        LineSearchOutcome for the largest accepted λ

    Raises:
        NotDescentDirectionError: gᵀd >= 0
        LineSearchError: more than cfg.max_backtracks rejections
    """
    bound = relax_bound(alpha_bar, g, d, cfg.relax_factor)
    slope = float(np.dot(g, d))
    dd = float(np.dot(d, d))

    lam = 1.0
    p = 0
    lambda_star = None
    while True:
        trial = x + lam * d
        f_new = f_eval(trial)
        rhs = acceptance_rhs(f_x, slope, dd, lam, alpha_bar, bound, cfg.mu1, cfg.relax_form)
        if math.isfinite(f_new) and f_new <= rhs:
            return LineSearchOutcome(
                lam=lam, p=p, f_new=float(f_new), n_evals=p + 1, x_new=trial,
                lambda_star=lambda_star, relax_bound=bound,
            )
        if p >= cfg.max_backtracks:
            logger.debug(f"line search exhausted: p={p}, lambda={lam:.3e}")
            raise LineSearchError(lam, p, p + 1)
        lambda_star = lam
        lam *= cfg.omega
        p += 1


def certificate_holds(
    f_eval: Callable[[np.ndarray], float],
    x: np.ndarray,
    f_x: float,
    g: np.ndarray,
    d: np.ndarray,
    alpha_bar: float,
    outcome: LineSearchOutcome,
    cfg: LineSearchConfig,
) -> bool:
    """
    Re-assert the relaxed generalized Armijo conditions for an accepted step.

    The accepted λ must pass the μ1 test, and either λ >= γ1 or the previous
    trial λ* must fail the μ2 test with λ >= γ2·λ*.
    """
    slope = float(np.dot(g, d))
    dd = float(np.dot(d, d))
    rhs = acceptance_rhs(f_x, slope, dd, outcome.lam, alpha_bar, outcome.relax_bound, cfg.mu1, cfg.relax_form)
    if not outcome.f_new <= rhs:
        return False
    if outcome.lam >= cfg.gamma1:
        return True
    if outcome.lambda_star is None or outcome.lam < cfg.gamma2 * outcome.lambda_star * (1.0 - 1e-15):
        return False
    star = outcome.lambda_star
    f_star = f_eval(x + star * d)
    rhs_star = acceptance_rhs(f_x, slope, dd, star, alpha_bar, outcome.relax_bound, cfg.mu2, cfg.relax_form)
    return not (math.isfinite(f_star) and f_star <= rhs_star)
