"""
Spectral Step Sizes
===================

Raw two-point and three-point step sizes plus the safeguard that projects
them into a curvature-dependent interval.

   s1 = x_k − x_{k−1}     y1 = g_k − g_{k−1}
   s2 = x_k − x_{k−2}     y2 = g_k − g_{k−2}

   bb1   = s1ᵀs1 / s1ᵀy1                  bb2   = s1ᵀy1 / y1ᵀy1
   tbb1  = (‖s1‖² + ‖s2‖²) / (s1ᵀy1 + s2ᵀy2)
   tbb2  = (s1ᵀy1 + s2ᵀy2) / (‖y1‖² + ‖y2‖²)
   tbb1p = λ bb1 + (1 − λ) bb2,  λ = (‖s2‖²/s2ᵀy2 − bb2) / (bb1 − bb2)
   tbb2p = λ bb1 + (1 − λ) bb2,  λ = (s2ᵀy2/‖y2‖² − bb2) / (bb1 − bb2)

A degenerate value is returned as None. A denominator counts as degenerate
when it is not larger than DEN_RTOL times the Cauchy-Schwarz scale
sqrt(‖s‖²‖y‖²) of the pairs it involves, so every value is invariant under
a joint rescaling of (s1, s2, y1, y2).
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEN_RTOL = 1e-12
MIX_RTOL = 1e-10


# =============================================================================
# TYPES
# =============================================================================

class StepSizeRule(str, Enum):
    BB1 = "bb1"
    BB2 = "bb2"
    TBB1 = "tbb1"
    TBB2 = "tbb2"
    TBB1P = "tbb1p"
    TBB2P = "tbb2p"

    @classmethod
    def from_name(cls, name: str) -> "StepSizeRule":
        try:
            return cls(name.strip().lower())
        except ValueError:
            choices = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown step-size rule '{name}' (choose from {choices})") from None

    @property
    def label(self) -> str:
        """Table label: TBB1P -> TBB1'."""
        return self.name[:-1] + "'" if self.name.endswith("P") else self.name


@dataclass(frozen=True)
class SafeguardConfig:
    alpha_min: float = 0.006
    alpha_max: float = 100.0
    sigma1: float = 0.52
    sigma2: float = 1.2

    def __post_init__(self):
        if not 0.0 < self.alpha_min < self.alpha_max or not math.isfinite(self.alpha_max):
            raise ConfigError(
                f"need 0 < alpha_min < alpha_max < inf, got {self.alpha_min}, {self.alpha_max}"
            )
        if not 0.0 < self.sigma1 < 1.0:
            raise ConfigError(f"sigma1 must lie in (0, 1), got {self.sigma1}")
        if not 1.0 < self.sigma2 < 2.0:
            raise ConfigError(f"sigma2 must lie in (1, 2), got {self.sigma2}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class IterateHistory:
    """
    The three most recent iterates and gradients.

    Seeded with x_{-1} = x_0 so that s2 = s1 and y2 = y1 after the first shift.
    """
    x_curr: np.ndarray
    x_prev: np.ndarray
    x_prev2: np.ndarray
    g_curr: np.ndarray
    g_prev: np.ndarray
    g_prev2: np.ndarray

    def __post_init__(self):
        vectors = (self.x_curr, self.x_prev, self.x_prev2, self.g_curr, self.g_prev, self.g_prev2)
        shapes = {np.shape(v) for v in vectors}
        if len(shapes) != 1 or len(next(iter(shapes))) != 1 or np.size(self.x_curr) < 1:
            raise ValueError(f"history vectors must share one shape (n,), got {sorted(shapes)}")
        if not all(np.all(np.isfinite(v)) for v in vectors):
            raise ValueError("history vectors must be finite")

    @classmethod
    def seed(cls, x0: np.ndarray, g0: np.ndarray) -> "IterateHistory":
        x0 = np.asarray(x0, dtype=float)
        g0 = np.asarray(g0, dtype=float)
        return cls(x0, x0, x0, g0, g0, g0)

    def shift(self, x_new: np.ndarray, g_new: np.ndarray) -> "IterateHistory":
        """(x_prev2, x_prev, x_curr) <- (x_prev, x_curr, x_new), same for gradients."""
        return IterateHistory(
            np.asarray(x_new, dtype=float), self.x_curr, self.x_prev,
            np.asarray(g_new, dtype=float), self.g_curr, self.g_prev,
        )

    @property
    def dim(self) -> int:
        return int(np.size(self.x_curr))

    @property
    def s1(self) -> np.ndarray:
        return self.x_curr - self.x_prev

    @property
    def s2(self) -> np.ndarray:
        return self.x_curr - self.x_prev2

    @property
    def y1(self) -> np.ndarray:
        return self.g_curr - self.g_prev

    @property
    def y2(self) -> np.ndarray:
        return self.g_curr - self.g_prev2

    @cached_property
    def products(self) -> Tuple[float, float, float, float, float, float]:
        """(s1ᵀs1, s1ᵀy1, y1ᵀy1, s2ᵀs2, s2ᵀy2, y2ᵀy2)"""
        s1, y1, s2, y2 = self.s1, self.y1, self.s2, self.y2
        return (
            float(s1 @ s1), float(s1 @ y1), float(y1 @ y1),
            float(s2 @ s2), float(s2 @ y2), float(y2 @ y2),
        )


# =============================================================================
# RAW STEP SIZES
# =============================================================================

def _scale(ss: float, yy: float) -> float:
    return math.sqrt(ss * yy)


def _ratio(num: float, den: float, scale: float) -> Optional[float]:
    if not abs(den) > DEN_RTOL * scale:
        return None
    value = num / den
    return value if math.isfinite(value) else None


def bb1(h: IterateHistory) -> Optional[float]:
    ss1, sy1, yy1, *_ = h.products
    return _ratio(ss1, sy1, _scale(ss1, yy1))


def bb2(h: IterateHistory) -> Optional[float]:
    ss1, sy1, yy1, *_ = h.products
    return _ratio(sy1, yy1, _scale(ss1, yy1))


def beta(h: IterateHistory) -> Optional[float]:
    """Curvature estimate centring the safeguard interval (same formula as bb2)."""
    return bb2(h)


def tbb1(h: IterateHistory) -> Optional[float]:
    ss1, sy1, yy1, ss2, sy2, yy2 = h.products
    return _ratio(ss1 + ss2, sy1 + sy2, _scale(ss1, yy1) + _scale(ss2, yy2))


def tbb2(h: IterateHistory) -> Optional[float]:
    ss1, sy1, yy1, ss2, sy2, yy2 = h.products
    return _ratio(sy1 + sy2, yy1 + yy2, _scale(ss1, yy1) + _scale(ss2, yy2))


def _bb_pair_coincides(a1: float, a2: float) -> bool:
    return abs(a1 - a2) <= MIX_RTOL * max(abs(a1), abs(a2))


def mix_weight(h: IterateHistory, variant: int) -> Optional[float]:
    """
    Affine weight λ placing the second-pair secant step between bb1 and bb2.

    Not clamped to [0, 1]; the safeguard bounds the final step.

    Args:
        h: Iterate history
        variant: 1 uses ‖s2‖²/s2ᵀy2, 2 uses s2ᵀy2/‖y2‖²

    Returns:
        λ, or None when bb1/bb2 are degenerate, nearly equal, or the inner
        denominator is degenerate
    """
    if variant not in (1, 2):
        raise ValueError(f"variant must be 1 or 2, got {variant}")
    a1, a2 = bb1(h), bb2(h)
    if a1 is None or a2 is None or _bb_pair_coincides(a1, a2):
        return None
    _, _, _, ss2, sy2, yy2 = h.products
    scale = _scale(ss2, yy2)
    inner = _ratio(ss2, sy2, scale) if variant == 1 else _ratio(sy2, yy2, scale)
    if inner is None:
        return None
    return (inner - a2) / (a1 - a2)


def tbb_prime(h: IterateHistory, variant: int) -> Optional[float]:
    """λ·bb1 + (1 − λ)·bb2; bb1 when the two BB values nearly coincide."""
    a1, a2 = bb1(h), bb2(h)
    if a1 is None or a2 is None:
        return None
    if _bb_pair_coincides(a1, a2):
        return a1
    lam = mix_weight(h, variant)
    if lam is None:
        return None
    return lam * a1 + (1.0 - lam) * a2


_DISPATCH = {
    StepSizeRule.BB1: bb1,
    StepSizeRule.BB2: bb2,
    StepSizeRule.TBB1: tbb1,
    StepSizeRule.TBB2: tbb2,
    StepSizeRule.TBB1P: lambda h: tbb_prime(h, 1),
    StepSizeRule.TBB2P: lambda h: tbb_prime(h, 2),
}


def raw_step(rule: StepSizeRule, h: IterateHistory) -> Optional[float]:
    return _DISPATCH[StepSizeRule(rule)](h)


# =============================================================================
# SAFEGUARD
# =============================================================================

def active_interval(beta_val: Optional[float], cfg: SafeguardConfig) -> Tuple[float, float]:
    """
    [max(α_min, σ1|β|), min(α_max, σ2|β|)], or [α_min, α_max] when β is
    degenerate or the β-interval is empty.
    """
    if beta_val is not None and math.isfinite(beta_val):
        lo = max(cfg.alpha_min, cfg.sigma1 * abs(beta_val))
        hi = min(cfg.alpha_max, cfg.sigma2 * abs(beta_val))
        if lo <= hi:
            return lo, hi
    return cfg.alpha_min, cfg.alpha_max


def safeguard(alpha_raw: Optional[float], beta_val: Optional[float], cfg: SafeguardConfig) -> float:
    """
    Clamp a raw step into the active interval.

    A degenerate (None) or non-finite raw step takes the upper end of the
    interval. The result is always in [α_min, α_max].
    """
    lo, hi = active_interval(beta_val, cfg)
    if alpha_raw is None or not math.isfinite(alpha_raw):
        logger.debug(f"degenerate raw step, using interval upper end {hi:.6g}")
        return hi
    return min(max(alpha_raw, lo), hi)
