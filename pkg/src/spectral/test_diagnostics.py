"""Tests for the convergence-rate diagnostics."""

import numpy as np
import pytest

from src.spectral.diagnostics import (
    append_report,
    fd_hessian_vec,
    monotone_descent,
    rate_report,
    root_rate,
    secant_residuals,
    superlinear_ratios,
)
from src.spectral.problems import make_diagonal_quadratic, make_ext_rosenbrock
from src.spectral.solver import SolverConfig, SolverStatus, export_trace, minimize
from src.spectral.stepsize import StepSizeRule


class TestRates:

    def test_root_rate_geometric(self):
        np.testing.assert_allclose(root_rate([1, 0.5, 0.25, 0.125]), 0.5, rtol=1e-10)
        np.testing.assert_allclose(root_rate([1, 0.1, 0.01]), 0.1, rtol=1e-10)

    @pytest.mark.parametrize("theta", [0.9, 0.5, 0.01])
    def test_root_rate_recovers_ratio(self, theta):
        errors = 3.0 * theta ** np.arange(6)
        np.testing.assert_allclose(root_rate(errors), theta, rtol=1e-10)

    def test_root_rate_insufficient_data(self):
        result = minimize(make_diagonal_quadratic([1.0, 1.0], [5.0, 5.0]), SolverConfig(keep_points=True))
        errors = [np.linalg.norm(x) for x in result.points]
        assert root_rate(errors) is None
        assert root_rate([1.0, 1e-17, 1e-18]) is None

    def test_superlinear_ratios(self):
        np.testing.assert_allclose(superlinear_ratios([1, 0.1, 0.001]), [0.1, 0.01])
        assert superlinear_ratios([2.0, 2.0, 2.0]) == [1.0, 1.0]
        assert superlinear_ratios([1, 0.5, 0.25]) == [0.5, 0.5]

    def test_superlinear_ratios_need_positive_errors(self):
        with pytest.raises(ValueError):
            superlinear_ratios([1.0, 0.0])

    def test_monotone_descent(self):
        assert monotone_descent([3, 2, 2, 1])
        assert not monotone_descent([1, 2])
        assert monotone_descent([7.0])


class TestHessianVector:

    def test_identity(self):
        p = make_diagonal_quadratic([1.0, 1.0], [1.0, 1.0])
        np.testing.assert_allclose(fd_hessian_vec(p, np.array([0.3, -2.0]), np.array([1.0, 0.0])), [1, 0], atol=1e-8)

    def test_diagonal(self):
        p = make_diagonal_quadratic([1.0, 4.0], [1.0, 1.0])
        np.testing.assert_allclose(fd_hessian_vec(p, np.array([1.0, 1.0]), np.array([0.0, 1.0])), [0, 4], atol=1e-8)

    def test_ext_rosenbrock_hessian_column(self):
        p = make_ext_rosenbrock(2)
        np.testing.assert_allclose(fd_hessian_vec(p, np.ones(2), np.array([1.0, 0.0])), [10.0, -4.0], atol=1e-4)
        np.testing.assert_allclose(fd_hessian_vec(p, np.ones(2), np.array([0.0, 1.0])), [-4.0, 2.0], atol=1e-4)

    def test_zero_direction(self):
        p = make_diagonal_quadratic([1.0], [1.0])
        with pytest.raises(ValueError):
            fd_hessian_vec(p, np.zeros(1), np.zeros(1))


class TestSecantResiduals:

    @staticmethod
    def _points(rng, n, steps, scale):
        return [(rng.standard_normal(n), scale, 1.0) for _ in range(steps)]

    def test_exact_zero_for_unit_steps_on_identity(self):
        p = make_diagonal_quadratic(np.ones(4), np.ones(4))
        points = self._points(np.random.default_rng(42), 4, 6, 1.0)
        assert secant_residuals(points, np.zeros(4), p) == [0.0] * 5

    def test_half_steps_on_identity(self):
        p = make_diagonal_quadratic(np.ones(3), np.ones(3))
        points = self._points(np.random.default_rng(1), 3, 4, 0.5)
        np.testing.assert_allclose(secant_residuals(points, np.zeros(3), p), [1.0] * 3, rtol=1e-9)

    def test_zero_step_is_marked(self):
        p = make_diagonal_quadratic(np.ones(2), np.ones(2))
        x = np.array([1.0, 2.0])
        assert secant_residuals([(x, 1.0, 1.0), (x.copy(), 1.0, 1.0)], np.zeros(2), p) == [None]

    def test_invariant_under_step_scaling(self):
        p = make_diagonal_quadratic([1.0, 3.0, 9.0], np.ones(3))
        rng = np.random.default_rng(5)
        x0, s = rng.standard_normal(3), rng.standard_normal(3)
        base = secant_residuals([(x0, 0.7, 1.3), (x0 + s, 1.0, 1.0)], np.zeros(3), p)
        scaled = secant_residuals([(x0, 0.7, 1.3), (x0 + 1e-3 * s, 1.0, 1.0)], np.zeros(3), p)
        np.testing.assert_allclose(scaled, base, rtol=1e-8)

    def test_ext_rosenbrock_run(self):
        problem = make_ext_rosenbrock(2)
        result = minimize(problem, SolverConfig(rule=StepSizeRule.TBB2P, keep_points=True))
        assert result.status is SolverStatus.CONVERGED
        report = rate_report(result, problem)
        assert len(report.secant_residuals) == result.iterations
        assert all(r is None or r >= 0.0 for r in report.secant_residuals)
        assert report.monotone


class TestRateReport:

    @pytest.mark.parametrize("rule", list(StepSizeRule))
    def test_r_linear_on_diagonal_quadratic(self, rule):
        rng = np.random.default_rng(42)
        diag = np.arange(1.0, 11.0)
        for _ in range(10):
            problem = make_diagonal_quadratic(diag, rng.uniform(-3.0, 3.0, size=10))
            cfg = SolverConfig(rule=rule, tol_mode="absolute", tol=1e-10, keep_points=True)
            report = rate_report(minimize(problem, cfg), problem)
            assert report.root_rate is not None and report.root_rate < 1.0
            assert len(report.superlinear_ratios) == len(report.errors) - 1

    def test_requires_kept_points(self):
        problem = make_ext_rosenbrock(2)
        with pytest.raises(ValueError):
            rate_report(minimize(problem, SolverConfig()), problem)

    def test_appended_block(self, tmp_path):
        problem = make_ext_rosenbrock(4)
        result = minimize(problem, SolverConfig(keep_points=True))
        path = export_trace(result, tmp_path / "trace.csv")
        append_report(rate_report(result, problem), path)
        lines = path.read_text().splitlines()
        marker = lines.index("# diagnostics")
        assert marker == result.iterations + 1
        assert lines[marker + 1] == "root_rate,value_root_rate,monotone"
        assert lines[marker + 3] == "k,error,ratio,secant_residual"
        assert len(lines) == marker + 4 + result.iterations + 1
