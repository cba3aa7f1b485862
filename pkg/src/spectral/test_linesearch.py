"""Tests for the relaxed generalized Armijo backtracking search."""

import math

import numpy as np
import pytest

from src.spectral.errors import ConfigError, LineSearchError, NotDescentDirectionError
from src.spectral.linesearch import (
    LineSearchConfig,
    acceptance_rhs,
    certificate_holds,
    relax_bound,
    search,
)

DEFAULT = LineSearchConfig()


def half_square(x):
    return 0.5 * float(x @ x)


def one(v):
    return np.array([v], dtype=float)


class TestRelaxBound:

    def test_unit_case(self):
        assert relax_bound(1.0, one(1), one(-1), 1.0) == 1.0

    def test_zero_theta(self):
        assert relax_bound(3.7, one(2.0), one(-0.3), 0.0) == 0.0

    def test_scaled_case(self):
        assert relax_bound(4.0, one(1), one(-4), 1.0) == 1.0

    def test_ascent_direction(self):
        with pytest.raises(NotDescentDirectionError):
            relax_bound(1.0, one(1), one(1), 1.0)


class TestSearch:

    def test_full_step_accepted(self):
        out = search(half_square, one(1), 0.5, one(1), one(-1), 1.0, DEFAULT)
        assert (out.lam, out.p, out.n_evals) == (1.0, 0, 1)
        assert out.f_new == 0.0
        assert out.lambda_star is None

    def test_backtracking_trace(self):
        out = search(half_square, one(1), 0.5, one(1), one(-4), 4.0, DEFAULT)
        assert out.p == 4
        assert out.n_evals == 5
        assert out.lam == 0.76 * 0.76 * 0.76 * 0.76
        assert out.lam == pytest.approx(0.333622, abs=1e-6)
        assert out.f_new == pytest.approx(0.05594, abs=1e-5)
        assert out.lambda_star == 0.76 * 0.76 * 0.76
        rhs = acceptance_rhs(0.5, -4.0, 16.0, out.lam, 4.0, out.relax_bound, 0.32)
        assert rhs == pytest.approx(0.14420, abs=1e-4)

    def test_ascent_direction(self):
        with pytest.raises(NotDescentDirectionError):
            search(half_square, one(1), 0.5, one(1), one(1), 1.0, DEFAULT)

    def test_non_finite_trials_are_rejections(self):
        def f(x):
            return 0.5 * x[0] ** 2 if x[0] > -0.5 else math.nan

        out = search(f, one(1), 0.5, one(1), one(-4), 4.0, DEFAULT)
        assert out.p == 4

    def test_budget_exhausted(self):
        cfg = LineSearchConfig(max_backtracks=5)
        with pytest.raises(LineSearchError) as info:
            search(lambda x: math.inf, one(1), 0.5, one(1), one(-1), 1.0, cfg)
        assert info.value.p == 5
        assert info.value.n_evals == 6
        assert info.value.last_lambda == pytest.approx(0.76 ** 5)

    def test_forms_coincide_without_relaxation(self):
        scaled = LineSearchConfig(relax_factor=0.0)
        unscaled = LineSearchConfig(relax_factor=0.0, relax_form="unscaled")
        a = search(half_square, one(1), 0.5, one(1), one(-4), 4.0, scaled)
        b = search(half_square, one(1), 0.5, one(1), one(-4), 4.0, unscaled)
        assert (a.lam, a.p) == (b.lam, b.p)

    def test_unscaled_form_may_increase(self):
        cfg = LineSearchConfig(relax_form="unscaled")
        out = search(half_square, one(1), 0.5, one(1), one(-4), 4.0, cfg)
        assert out.p == 2
        assert out.f_new > 0.5

    def test_certificate_on_examples(self):
        for d, alpha_bar in ((-1.0, 1.0), (-4.0, 4.0)):
            out = search(half_square, one(1), 0.5, one(1), one(d), alpha_bar, DEFAULT)
            assert certificate_holds(half_square, one(1), 0.5, one(1), one(d), alpha_bar, out, DEFAULT)


class TestSearchProperties:

    @staticmethod
    def _case(rng):
        q, r, s = rng.uniform(0.1, 5.0), rng.uniform(0.0, 1.0), rng.uniform(-2.0, 2.0)

        def f(x):
            t = x[0]
            return 0.5 * q * t * t + r * t ** 4 + s * t

        def grad(t):
            return q * t + 4.0 * r * t ** 3 + s

        x = one(rng.uniform(-3.0, 3.0))
        g = one(grad(x[0]))
        alpha_bar = float(10.0 ** rng.uniform(-2, 1))
        return f, x, g, -alpha_bar * g, alpha_bar

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 1000:
            f, x, g, d, alpha_bar = self._case(rng)
            if g[0] == 0.0:
                continue
            cfg = LineSearchConfig(relax_factor=float(rng.uniform(0.0, 1.0)))
            f_x = f(x)
            slope, dd = float(g @ d), float(d @ d)
            bound = relax_bound(alpha_bar, g, d, cfg.relax_factor)

            expected, lam = None, 1.0
            for p in range(cfg.max_backtracks + 1):
                if f(x + lam * d) <= acceptance_rhs(f_x, slope, dd, lam, alpha_bar, bound, cfg.mu1):
                    expected = (p, lam)
                    break
                lam *= cfg.omega

            out = search(f, x, f_x, g, d, alpha_bar, cfg)
            assert (out.p, out.lam) == expected
            assert certificate_holds(f, x, f_x, g, d, alpha_bar, out, cfg)
            assert out.f_new <= f_x + 0.5 * cfg.mu1 * out.lam * slope + 1e-12 * max(1.0, abs(f_x))
            checked += 1

    def test_relaxation_never_needs_more_backtracks(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            f, x, g, d, alpha_bar = self._case(rng)
            if g[0] == 0.0:
                continue
            plain = search(f, x, f(x), g, d, alpha_bar, LineSearchConfig(relax_factor=0.0))
            relaxed = search(f, x, f(x), g, d, alpha_bar, LineSearchConfig(relax_factor=1.0))
            assert relaxed.p <= plain.p


class TestLineSearchConfig:

    def test_defaults(self):
        assert (DEFAULT.mu1, DEFAULT.mu2, DEFAULT.omega, DEFAULT.relax_factor) == (0.32, 0.32, 0.76, 1.0)
        assert DEFAULT.max_backtracks == 60

    @pytest.mark.parametrize("kwargs", [
        dict(mu1=0.5, mu2=0.4),
        dict(mu1=0.0),
        dict(omega=1.0),
        dict(relax_factor=1.5),
        dict(max_backtracks=0),
        dict(max_backtracks=math.inf),
        dict(max_backtracks=math.nan),
        dict(max_backtracks=True),
        dict(gamma1=0.0),
        dict(relax_form="printed"),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            LineSearchConfig(**kwargs)
