"""
Test Problems
=============

Objective contract, finite-difference oracle and the built-in collection of
smooth unconstrained test problems.

COLLECTION:
═══════════

   name              n rule      f(x)                                              x0                 x*
   ────────────────  ──────────  ────────────────────────────────────────────────  ─────────────────  ──────────────
   ext_rosenbrock    n even      Σ (x2i − x2i−1²)² + (1 − x2i−1)²                   (−1.2, 1, ...)     (1, ..., 1)
   block_chained     n % 10 = 0  Σ_blocks (1 − xfirst)² + (1 − xlast)²              (−2, ..., −2)      (1, ..., 1)
                                   + Σ_{j in block} (xj² − xj+1)²
   ext_white_holst   n even      Σ 100 (x2i − x2i−1³)² + (1 − x2i−1)²               (−1.2, 1, ...)     (1, ..., 1)
   ext_beale         n even      Σ (1.5 − u(1−v))² + (2.25 − u(1−v²))²              (1, 0.8, ...)      (3, 0.5, ...)
                                   + (2.625 − u(1−v³))²
   ext_himmelblau    n even      Σ (u² + v − 11)² + (u + v² − 7)²                   (1, ..., 1)        (3, 2, ...)
   ext_powell        n % 4 = 0   Σ (x1 + 10x2)² + 5(x3 − x4)² + (x2 − 2x3)⁴          (3, −1, 0, 1, ...) (0, ..., 0)
                                   + 10(x1 − x4)⁴
   ext_tridiagonal1  n even      Σ (u + v − 3)² + (u − v + 1)⁴                      (2, ..., 2)        (1, 2, ...)
   raydan1           n >= 1      Σ (i/10)(exp(xi) − xi)                             (1, ..., 1)        (0, ..., 0)
   raydan2           n >= 1      Σ exp(xi) − xi                                     (1, ..., 1)        (0, ..., 0)
   diagonal2         n >= 1      Σ exp(xi) − xi / i                                 (1/1, ..., 1/n)    xi = −ln i
   quadratic_qf1     n >= 1      ½ Σ i xi² − xn                                     (1, ..., 1)        (0, ..., 0, 1/n)
   arwhead           n >= 2      Σ_{i<n} (−4xi + 3) + (xi² + xn²)²                  (1, ..., 1)        (1, ..., 1, 0)
   bdqrtic           n >= 5      Σ_{i<=n−4} (−4xi + 3)²                             (1, ..., 1)        unknown
                                   + (xi² + 2xi+1² + 3xi+2² + 4xi+3² + 5xn²)²

(u, v) = (x2i−1, x2i) for the paired families; blocks are consecutive runs of
ten coordinates.

Every evaluator is a pure function of its argument: no caches, no counters,
so one Problem may be evaluated from several threads at once.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from .errors import InvalidDimensionError, NonFiniteEvaluationError, UnknownProblemError

logger = logging.getLogger(__name__)

Vector = np.ndarray
ValueFn = Callable[[Vector], float]
GradientFn = Callable[[Vector], Vector]


# =============================================================================
# PROBLEM CONTRACT
# =============================================================================

def _frozen(values, n: int, what: str) -> Vector:
    arr = np.array(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{what} has shape {arr.shape}, expected ({n},)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Problem:
    """
    Named smooth objective with analytic gradient.

    Attributes:
        name: Collection identifier (used by the CLI)
        dim: Dimension n
        value_at: x -> f(x)
        gradient_at: x -> ∇f(x)
        start_point: x0
        known_opt_value: f* when known
        known_opt_point: x* when known
        dim_rule: Human-readable dimension constraint
    """
    name: str
    dim: int
    value_at: ValueFn
    gradient_at: GradientFn
    start_point: Vector
    known_opt_value: Optional[float] = None
    known_opt_point: Optional[Vector] = None
    dim_rule: str = "n >= 1"

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidDimensionError(self.name, self.dim, self.dim_rule)
        object.__setattr__(self, "start_point", _frozen(self.start_point, self.dim, "start_point"))
        if self.known_opt_point is not None:
            object.__setattr__(
                self, "known_opt_point", _frozen(self.known_opt_point, self.dim, "known_opt_point")
            )

    @property
    def has_known_optimum(self) -> bool:
        return self.known_opt_value is not None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "dim_rule": self.dim_rule,
            "known_opt_value": self.known_opt_value,
        }


# =============================================================================
# FINITE-DIFFERENCE ORACLE
# =============================================================================

def default_fd_step(x: Vector) -> float:
    """h = 1e-6 * (1 + ||x||_inf)"""
    return 1e-6 * (1.0 + float(np.max(np.abs(x), initial=0.0)))


def fd_gradient(problem: Problem, x: Vector, h: Optional[float] = None) -> Vector:
    """
    Central-difference gradient.

    Component i is (f(x + h e_i) - f(x - h e_i)) / (2h).

    Args:
        problem: Objective to differentiate
        x: Finite point of length problem.dim
        h: Step; defaults to default_fd_step(x)

    Returns:
        Approximate gradient of length problem.dim

    Raises:
        NonFiniteEvaluationError: f is inf/NaN at one of the probes
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise InvalidDimensionError(problem.name, x.size, f"n = {problem.dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("fd_gradient requires a finite point")
    if h is None:
        h = default_fd_step(x)
    if not h > 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")

    work = x.copy()
    grad = np.empty(problem.dim)
    for i in range(problem.dim):
        xi = work[i]
        work[i] = xi + h
        f_plus = problem.value_at(work)
        if not np.isfinite(f_plus):
            raise NonFiniteEvaluationError("objective", work, index=i)
        work[i] = xi - h
        f_minus = problem.value_at(work)
        if not np.isfinite(f_minus):
            raise NonFiniteEvaluationError("objective", work, index=i)
        work[i] = xi
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def gradient_error(problem: Problem, x: Vector, h: Optional[float] = None) -> float:
    """||g - g_fd||_inf / max(1, ||g||_inf)"""
    g = np.asarray(problem.gradient_at(x), dtype=float)
    fd = fd_gradient(problem, x, h)
    return float(np.max(np.abs(g - fd)) / max(1.0, float(np.max(np.abs(g)))))


@dataclass
class GradientCheck:
    """Outcome of comparing gradient_at with the FD oracle."""
    problem: str
    dim: int
    errors: List[float] = field(default_factory=list)
    tolerance: float = 1e-5

    @property
    def max_rel_error(self) -> float:
        return max(self.errors) if self.errors else 0.0

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


def check_gradient(
    problem: Problem,
    n_random: int = 10,
    seed: int = 0,
    low: float = -2.0,
    high: float = 2.0,
    tolerance: float = 1e-5,
    progress: bool = False,
) -> GradientCheck:
    """
    Check gradient_at at x0 and at n_random uniform points in [low, high]^n.

    Args:
        problem: Problem under test
        n_random: Number of random probe points
        seed: Seed for numpy's default_rng
        low, high: Box for the random points
        tolerance: Pass threshold on the relative error
        progress: Show a tqdm bar over the points

    Returns:
        GradientCheck with one relative error per point (x0 first)
    """
    rng = np.random.default_rng(seed)
    points = [problem.start_point] + [
        rng.uniform(low, high, size=problem.dim) for _ in range(n_random)
    ]
    report = GradientCheck(problem=problem.name, dim=problem.dim, tolerance=tolerance)
    for x in tqdm(points, desc=f"check-grad {problem.name}", disable=not progress):
        report.errors.append(gradient_error(problem, x))
    logger.debug(f"{problem.name} n={problem.dim}: max rel error {report.max_rel_error:.3e}")
    return report


# =============================================================================
# COLLECTION MEMBERS
# =============================================================================

def _require(name: str, n: int, ok: bool, rule: str) -> None:
    if not ok:
        raise InvalidDimensionError(name, n, rule)


def _tiled(pattern, n: int) -> Vector:
    return np.tile(np.asarray(pattern, dtype=float), n // len(pattern))


def make_ext_rosenbrock(n: int) -> Problem:
    """
    Extended Rosenbrock without the usual factor 100.

    f = Σ_{i=1}^{n/2} [(x_2i − x_2i−1²)² + (1 − x_2i−1)²], f* = 0 at all-ones.
    """
    _require("ext_rosenbrock", n, n >= 2 and n % 2 == 0, "n even, n >= 2")

    def value(x):
        u, v = x[0::2], x[1::2]
        return float(np.sum((v - u * u) ** 2 + (1.0 - u) ** 2))

    def gradient(x):
        u, v = x[0::2], x[1::2]
        t = v - u * u
        g = np.empty_like(x, dtype=float)
        g[0::2] = -4.0 * u * t - 2.0 * (1.0 - u)
        g[1::2] = 2.0 * t
        return g

    return Problem(
        name="ext_rosenbrock", dim=n, value_at=value, gradient_at=gradient,
        start_point=_tiled([-1.2, 1.0], n), known_opt_value=0.0,
        known_opt_point=np.ones(n), dim_rule="n even",
    )


def make_block_chained(n: int) -> Problem:
    """
    Blocks of ten coordinates, each a chained quartic with fixed ends.

    f = Σ_blocks [(1 − x_first)² + (1 − x_last)² + Σ_j (x_j² − x_j+1)²], f* = 0 at all-ones.
    """
    _require("block_chained", n, n >= 10 and n % 10 == 0, "n % 10 == 0")

    def value(x):
        b = x.reshape(-1, 10)
        t = b[:, :-1] ** 2 - b[:, 1:]
        return float(np.sum((1.0 - b[:, 0]) ** 2) + np.sum((1.0 - b[:, -1]) ** 2) + np.sum(t * t))

    def gradient(x):
        b = x.reshape(-1, 10)
        t = b[:, :-1] ** 2 - b[:, 1:]
        g = np.zeros_like(b, dtype=float)
        g[:, :-1] += 4.0 * b[:, :-1] * t
        g[:, 1:] -= 2.0 * t
        g[:, 0] -= 2.0 * (1.0 - b[:, 0])
        g[:, -1] -= 2.0 * (1.0 - b[:, -1])
        return g.reshape(-1)

    return Problem(
        name="block_chained", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.full(n, -2.0), known_opt_value=0.0,
        known_opt_point=np.ones(n), dim_rule="n % 10 == 0",
    )


def make_ext_white_holst(n: int, c: float = 100.0) -> Problem:
    _require("ext_white_holst", n, n >= 2 and n % 2 == 0, "n even, n >= 2")

    def value(x):
        u, v = x[0::2], x[1::2]
        return float(np.sum(c * (v - u ** 3) ** 2 + (1.0 - u) ** 2))

    def gradient(x):
        u, v = x[0::2], x[1::2]
        t = v - u ** 3
        g = np.empty_like(x, dtype=float)
        g[0::2] = -6.0 * c * u * u * t - 2.0 * (1.0 - u)
        g[1::2] = 2.0 * c * t
        return g

    return Problem(
        name="ext_white_holst", dim=n, value_at=value, gradient_at=gradient,
        start_point=_tiled([-1.2, 1.0], n), known_opt_value=0.0,
        known_opt_point=np.ones(n), dim_rule="n even",
    )


def make_ext_beale(n: int) -> Problem:
    _require("ext_beale", n, n >= 2 and n % 2 == 0, "n even, n >= 2")

    def _terms(x):
        u, v = x[0::2], x[1::2]
        a1 = 1.5 - u * (1.0 - v)
        a2 = 2.25 - u * (1.0 - v * v)
        a3 = 2.625 - u * (1.0 - v ** 3)
        return u, v, a1, a2, a3

    def value(x):
        _, _, a1, a2, a3 = _terms(x)
        return float(np.sum(a1 * a1 + a2 * a2 + a3 * a3))

    def gradient(x):
        u, v, a1, a2, a3 = _terms(x)
        g = np.empty_like(x, dtype=float)
        g[0::2] = -2.0 * (a1 * (1.0 - v) + a2 * (1.0 - v * v) + a3 * (1.0 - v ** 3))
        g[1::2] = 2.0 * u * (a1 + 2.0 * v * a2 + 3.0 * v * v * a3)
        return g

    return Problem(
        name="ext_beale", dim=n, value_at=value, gradient_at=gradient,
        start_point=_tiled([1.0, 0.8], n), known_opt_value=0.0,
        known_opt_point=_tiled([3.0, 0.5], n), dim_rule="n even",
    )


def make_ext_himmelblau(n: int) -> Problem:
    _require("ext_himmelblau", n, n >= 2 and n % 2 == 0, "n even, n >= 2")

    def value(x):
        u, v = x[0::2], x[1::2]
        return float(np.sum((u * u + v - 11.0) ** 2 + (u + v * v - 7.0) ** 2))

    def gradient(x):
        u, v = x[0::2], x[1::2]
        a = u * u + v - 11.0
        b = u + v * v - 7.0
        g = np.empty_like(x, dtype=float)
        g[0::2] = 4.0 * u * a + 2.0 * b
        g[1::2] = 2.0 * a + 4.0 * v * b
        return g

    return Problem(
        name="ext_himmelblau", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.ones(n), known_opt_value=0.0,
        known_opt_point=_tiled([3.0, 2.0], n), dim_rule="n even",
    )


def make_ext_powell(n: int) -> Problem:
    _require("ext_powell", n, n >= 4 and n % 4 == 0, "n % 4 == 0")

    def _terms(x):
        b = x.reshape(-1, 4)
        t1 = b[:, 0] + 10.0 * b[:, 1]
        t2 = b[:, 2] - b[:, 3]
        t3 = b[:, 1] - 2.0 * b[:, 2]
        t4 = b[:, 0] - b[:, 3]
        return t1, t2, t3, t4

    def value(x):
        t1, t2, t3, t4 = _terms(x)
        return float(np.sum(t1 * t1 + 5.0 * t2 * t2 + t3 ** 4 + 10.0 * t4 ** 4))

    def gradient(x):
        t1, t2, t3, t4 = _terms(x)
        g = np.empty((t1.size, 4))
        g[:, 0] = 2.0 * t1 + 40.0 * t4 ** 3
        g[:, 1] = 20.0 * t1 + 4.0 * t3 ** 3
        g[:, 2] = 10.0 * t2 - 8.0 * t3 ** 3
        g[:, 3] = -10.0 * t2 - 40.0 * t4 ** 3
        return g.reshape(-1)

    return Problem(
        name="ext_powell", dim=n, value_at=value, gradient_at=gradient,
        start_point=_tiled([3.0, -1.0, 0.0, 1.0], n), known_opt_value=0.0,
        known_opt_point=np.zeros(n), dim_rule="n % 4 == 0",
    )


def make_ext_tridiagonal1(n: int) -> Problem:
    _require("ext_tridiagonal1", n, n >= 2 and n % 2 == 0, "n even, n >= 2")

    def value(x):
        u, v = x[0::2], x[1::2]
        return float(np.sum((u + v - 3.0) ** 2 + (u - v + 1.0) ** 4))

    def gradient(x):
        u, v = x[0::2], x[1::2]
        a = 2.0 * (u + v - 3.0)
        b = 4.0 * (u - v + 1.0) ** 3
        g = np.empty_like(x, dtype=float)
        g[0::2] = a + b
        g[1::2] = a - b
        return g

    return Problem(
        name="ext_tridiagonal1", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.full(n, 2.0), known_opt_value=0.0,
        known_opt_point=_tiled([1.0, 2.0], n), dim_rule="n even",
    )


def make_raydan1(n: int) -> Problem:
    _require("raydan1", n, n >= 1, "n >= 1")
    c = np.arange(1, n + 1) / 10.0
    c.setflags(write=False)

    def value(x):
        return float(np.sum(c * (np.exp(x) - x)))

    def gradient(x):
        return c * (np.exp(x) - 1.0)

    x_star = np.zeros(n)
    return Problem(
        name="raydan1", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.ones(n), known_opt_value=value(x_star),
        known_opt_point=x_star, dim_rule="n >= 1",
    )


def make_raydan2(n: int) -> Problem:
    _require("raydan2", n, n >= 1, "n >= 1")

    def value(x):
        return float(np.sum(np.exp(x) - x))

    def gradient(x):
        return np.exp(x) - 1.0

    return Problem(
        name="raydan2", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.ones(n), known_opt_value=float(n),
        known_opt_point=np.zeros(n), dim_rule="n >= 1",
    )


def make_diagonal2(n: int) -> Problem:
    _require("diagonal2", n, n >= 1, "n >= 1")
    i = np.arange(1, n + 1, dtype=float)
    inv = 1.0 / i
    inv.setflags(write=False)

    def value(x):
        return float(np.sum(np.exp(x) - x * inv))

    def gradient(x):
        return np.exp(x) - inv

    x_star = -np.log(i)
    return Problem(
        name="diagonal2", dim=n, value_at=value, gradient_at=gradient,
        start_point=inv, known_opt_value=value(x_star),
        known_opt_point=x_star, dim_rule="n >= 1",
    )


def make_quadratic_qf1(n: int) -> Problem:
    _require("quadratic_qf1", n, n >= 1, "n >= 1")
    d = np.arange(1, n + 1, dtype=float)
    d.setflags(write=False)

    def value(x):
        return float(0.5 * np.sum(d * x * x) - x[-1])

    def gradient(x):
        g = d * x
        g[-1] -= 1.0
        return g

    x_star = np.zeros(n)
    x_star[-1] = 1.0 / n
    return Problem(
        name="quadratic_qf1", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.ones(n), known_opt_value=-0.5 / n,
        known_opt_point=x_star, dim_rule="n >= 1",
    )


def make_arwhead(n: int) -> Problem:
    _require("arwhead", n, n >= 2, "n >= 2")

    def value(x):
        head, last = x[:-1], x[-1]
        return float(np.sum(-4.0 * head + 3.0 + (head * head + last * last) ** 2))

    def gradient(x):
        head, last = x[:-1], x[-1]
        q = head * head + last * last
        g = np.empty_like(x, dtype=float)
        g[:-1] = -4.0 + 4.0 * head * q
        g[-1] = 4.0 * last * np.sum(q)
        return g

    x_star = np.ones(n)
    x_star[-1] = 0.0
    return Problem(
        name="arwhead", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.ones(n), known_opt_value=0.0,
        known_opt_point=x_star, dim_rule="n >= 2",
    )


def make_bdqrtic(n: int) -> Problem:
    """Banded quartic; no closed-form optimum, so f_gap is reported as missing."""
    _require("bdqrtic", n, n >= 5, "n >= 5")
    w = np.array([1.0, 2.0, 3.0, 4.0])

    def _quartic(x):
        m = n - 4
        band = np.stack([x[j:j + m] for j in range(4)])
        q = w @ (band * band) + 5.0 * x[-1] ** 2
        return band, q

    def value(x):
        band, q = _quartic(x)
        return float(np.sum((-4.0 * band[0] + 3.0) ** 2 + q * q))

    def gradient(x):
        band, q = _quartic(x)
        m = n - 4
        g = np.zeros(n)
        g[:m] += -8.0 * (-4.0 * band[0] + 3.0)
        for j in range(4):
            g[j:j + m] += 4.0 * w[j] * band[j] * q
        g[-1] += 20.0 * x[-1] * np.sum(q)
        return g

    return Problem(
        name="bdqrtic", dim=n, value_at=value, gradient_at=gradient,
        start_point=np.ones(n), dim_rule="n >= 5",
    )


def make_diagonal_quadratic(diag, start_point, name: str = "diag_quadratic") -> Problem:
    """f = ½ Σ d_i x_i², minimizer 0. Not part of the collection."""
    d = np.array(diag, dtype=float)
    if d.ndim != 1 or d.size < 1 or np.any(d <= 0):
        raise ValueError("diagonal must be a nonempty vector of positive entries")
    d.setflags(write=False)

    def value(x):
        return float(0.5 * np.sum(d * x * x))

    def gradient(x):
        return d * x

    return Problem(
        name=name, dim=d.size, value_at=value, gradient_at=gradient,
        start_point=start_point, known_opt_value=0.0, known_opt_point=np.zeros(d.size),
    )


# Registry order is the collection order.
PROBLEM_FACTORIES: Dict[str, Tuple[Callable[[int], Problem], str]] = {
    "ext_rosenbrock": (make_ext_rosenbrock, "n even"),
    "block_chained": (make_block_chained, "n % 10 == 0"),
    "ext_white_holst": (make_ext_white_holst, "n even"),
    "ext_beale": (make_ext_beale, "n even"),
    "ext_himmelblau": (make_ext_himmelblau, "n even"),
    "ext_powell": (make_ext_powell, "n % 4 == 0"),
    "ext_tridiagonal1": (make_ext_tridiagonal1, "n even"),
    "raydan1": (make_raydan1, "n >= 1"),
    "raydan2": (make_raydan2, "n >= 1"),
    "diagonal2": (make_diagonal2, "n >= 1"),
    "quadratic_qf1": (make_quadratic_qf1, "n >= 1"),
    "arwhead": (make_arwhead, "n >= 2"),
    "bdqrtic": (make_bdqrtic, "n >= 5"),
}

MIN_COLLECTION_DIM = 1


def list_problems() -> List[Tuple[str, str]]:
    """(name, dim_constraint) for every collection member."""
    return [(name, rule) for name, (_, rule) in PROBLEM_FACTORIES.items()]


def get_problem(name: str, n: int) -> Problem:
    """
    Build one collection member by name.

    Raises:
        UnknownProblemError: name not in the collection
        InvalidDimensionError: n violates the member's dimension rule
    """
    key = name.strip().lower()
    if key not in PROBLEM_FACTORIES:
        raise UnknownProblemError(name)
    factory, _ = PROBLEM_FACTORIES[key]
    return factory(n)


def standard_collection(n: int, names: Optional[List[str]] = None) -> List[Problem]:
    """
    Every collection member that accepts dimension n.

    Members whose dimension rule rejects n are skipped with a warning.

    Args:
        n: Dimension
        names: Restrict to these members (default: all)

    Raises:
        InvalidDimensionError: n below the smallest supported dimension
    """
    if n < MIN_COLLECTION_DIM:
        raise InvalidDimensionError("collection", n, f"n >= {MIN_COLLECTION_DIM}")

    problems = []
    for name in names or list(PROBLEM_FACTORIES):
        try:
            problems.append(get_problem(name, n))
        except InvalidDimensionError as e:
            logger.warning(f"Skipping {e}")
    return problems
