"""Tests for the HJB residuals and the verification suite."""

import math

import numpy as np
import pytest

from amplifier_module_tool_extraction.core.sensitivity import random_base_params
from amplifier_module_tool_extraction.core.solver import solve
from amplifier_module_tool_extraction.core.value import StatePoint
from amplifier_module_tool_extraction.core.verify import (
    H2_VARIANTS,
    generator_quadrature,
    gamma_u_derivative,
    h1_derivative,
    near_offsets,
    residual_gamma_u,
    residual_H1,
    residual_H2,
    residual_T,
    run_hjb_suite,
    u_section,
    value_section,
)
from amplifier_module_tool_extraction.exceptions import (
    QuadratureNonConvergenceError,
    ValidationError,
)


class TestResidualsP0:
    """Closed-form anchors on the pure-diffusion set."""

    def test_gradient_constraint(self, p0_solution):
        assert residual_T(p0_solution, StatePoint(2.5, 1.0)) == pytest.approx(0.0, abs=1e-12)
        assert residual_T(p0_solution, StatePoint(0.0, 1.0)) < 0.0

    def test_h1(self, p0_solution):
        assert residual_H1(p0_solution, p0_solution.bstar) == pytest.approx(0.0, abs=1e-9)
        assert residual_H1(p0_solution, 3.0) == pytest.approx(-1.5, abs=1e-9)

    def test_h1_below_barrier(self, p0_solution):
        with pytest.raises(ValidationError):
            residual_H1(p0_solution, 1.0)

    def test_h2_variants(self, p0_solution):
        pt = StatePoint(4.0, 1.0)
        assert residual_H2(p0_solution, pt, "direct") == pytest.approx(-2.5, abs=1e-9)
        assert residual_H2(p0_solution, pt, "sigma_squared") == pytest.approx(-2.5, abs=1e-9)
        assert residual_H2(p0_solution, pt, "sigma") == pytest.approx(-1.5 - math.sqrt(2.0) / 2.0, abs=1e-9)
        assert residual_H2(p0_solution, pt, "displayed") == pytest.approx(-2.5, abs=1e-9)

    def test_h2_unknown_variant(self, p0_solution):
        with pytest.raises(ValidationError, match="Unknown H2 variant"):
            residual_H2(p0_solution, StatePoint(4.0, 1.0), "sigma_cubed")

    def test_gamma_u(self, p0_solution):
        assert residual_gamma_u(p0_solution, 1.0) == pytest.approx(0.0, abs=1e-12)
        assert residual_gamma_u(p0_solution, p0_solution.bstar) == pytest.approx(-1.0, abs=1e-9)

    def test_waiting_generator_vanishes(self, p0_solution):
        target = value_section(p0_solution, 1.0)
        for x in (-3.0, 0.0, 1.5, 1.99):
            assert generator_quadrature(p0_solution, target, x) == pytest.approx(0.0, abs=1e-12)


class TestResidualsWithJumps:
    """Analytic residuals against the quadrature generator."""

    def test_gradient_constraint_on_waiting(self, p1_solution):
        b = p1_solution.bstar
        for x in np.linspace(b - 10.0, b - 1e-6, 1000):
            assert residual_T(p1_solution, StatePoint(float(x), 1.0)) <= 1e-12

    def test_h1_matches_quadrature(self, p1_solution):
        sol = p1_solution
        for off in (0.05, 0.4, 2.0):
            x = sol.bstar + off
            y = off / sol.params.alpha + 1.0
            dv = generator_quadrature(sol, value_section(sol, y), x)
            assert residual_H1(sol, x) == pytest.approx(dv, abs=1e-7)

    def test_h1_derivative(self, p2_solution):
        h = 1e-6
        x = p2_solution.bstar + 0.7
        fd = (residual_H1(p2_solution, x + h) - residual_H1(p2_solution, x - h)) / (2 * h)
        assert h1_derivative(p2_solution, x) == pytest.approx(fd, rel=1e-5)

    def test_h2_matches_quadrature(self, p1_solution):
        sol = p1_solution
        for y, off in ((0.5, 0.3), (2.0, 0.25), (1.0, 2.0 ** -12), (2.0, 4.0)):
            pt = StatePoint(sol.bstar + sol.params.alpha * y + off, y)
            dv = generator_quadrature(sol, value_section(sol, y), pt.x)
            assert residual_H2(sol, pt, "direct") == pytest.approx(dv, abs=1e-7)
            assert residual_H2(sol, pt, "sigma_squared") == pytest.approx(dv, abs=1e-7)
            assert residual_H2(sol, pt) < 0.0

    def test_h2_landing_term_with_mixtures(self, p2_solution):
        sol = p2_solution
        for y in (0.5, 1.5):
            pt = StatePoint(sol.bstar + sol.params.alpha * y + 0.6, y)
            dv = generator_quadrature(sol, value_section(sol, y), pt.x)
            for variant in ("direct", "sigma_squared"):
                assert residual_H2(sol, pt, variant) == pytest.approx(dv, abs=1e-7)

    def test_displayed_h2_misses_generator(self, p1_solution):
        sol = p1_solution
        pt = StatePoint(sol.bstar + sol.params.alpha * 2.0 + 0.25, 2.0)
        dv = generator_quadrature(sol, value_section(sol, 2.0), pt.x)
        gap = residual_H2(sol, pt, "displayed") - dv
        assert abs(gap) > 1e-3
        assert residual_H2(sol, pt, "direct") == pytest.approx(dv, abs=1e-7)

    def test_gamma_u_matches_quadrature(self, p2_solution):
        sol = p2_solution
        target = u_section(sol)
        for x in (sol.bstar - 1.0, sol.bstar + 0.5, sol.bstar + 3.0):
            assert residual_gamma_u(sol, x) == pytest.approx(generator_quadrature(sol, target, x), abs=1e-7)

    def test_gamma_u_derivative(self, p1_solution):
        h = 1e-6
        for off in (0.1, 1.0, 4.0):
            x = p1_solution.bstar + off
            fd = (residual_gamma_u(p1_solution, x + h) - residual_gamma_u(p1_solution, x - h)) / (2 * h)
            slope = gamma_u_derivative(p1_solution, x)
            assert slope < 0.0
            assert slope == pytest.approx(fd, rel=1e-5)

    def test_quadrature_budget(self, p1_solution):
        with pytest.raises(QuadratureNonConvergenceError):
            generator_quadrature(p1_solution, value_section(p1_solution, 1.0), p1_solution.bstar, max_evaluations=1)


class TestHjbSuite:
    """Tests for the full inequality suite."""

    def test_near_offsets(self):
        offsets = near_offsets(3)
        assert offsets == [0.5, 0.25, 0.125]

    def test_p0_suite(self, p0_solution):
        report = run_hjb_suite(p0_solution)
        assert report.passed, report.failures
        assert report.h2_variant == "sigma_squared"
        assert report.u2_left == pytest.approx(1.0, rel=1e-10)
        assert report.u2_right == 0.0

    @pytest.mark.parametrize("fixture", ["p1_solution", "p2_solution"])
    def test_suite_with_jumps(self, fixture, request):
        sol = request.getfixturevalue(fixture)
        report = run_hjb_suite(sol, levels=12, far_points=6)
        assert report.passed, report.failures
        assert report.h2_variant == "sigma_squared"
        assert report.h2_discrepancy["sigma_squared"] <= 1e-7
        assert report.h2_discrepancy["direct"] <= 1e-7
        assert report.h2_discrepancy["displayed"] > 1e-3
        assert set(report.h2_discrepancy) == set(H2_VARIANTS)
        assert report.max_H1 < 0.0
        assert report.max_gamma_u_selling < 0.0
        assert report.gamma_u_at_bstar == pytest.approx(report.gamma_u_expected, abs=1e-9)

    def test_report_dict(self, p0_solution):
        data = run_hjb_suite(p0_solution, levels=4, far_points=2).to_dict()
        assert data["passed"] is True
        assert data["failures"] == []
        assert data["grid"]["bstar"] == p0_solution.bstar

    def test_tolerances_reach_checks(self, p1_solution):
        report = run_hjb_suite(p1_solution, levels=4, far_points=2, tolerances={"quadrature": -1.0})
        assert not report.passed
        assert any("quadrature" in failure for failure in report.failures)

    @pytest.mark.slow
    def test_h2_on_random_models(self):
        rng = np.random.default_rng(15)
        for _ in range(15):
            sol = solve(random_base_params(rng, min_n=1))
            report = run_hjb_suite(sol, levels=8, far_points=4)
            assert report.h2_discrepancy["direct"] <= 1e-7
            assert report.h2_discrepancy["sigma_squared"] <= 1e-7
            assert report.max_H2 < 0.0
