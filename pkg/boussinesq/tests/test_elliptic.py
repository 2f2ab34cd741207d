"""
Tests for the banded elliptic solvers: clamped biharmonic, Stokes, Leray and Helmholtz.
"""

import numpy as np
from django.test import SimpleTestCase

from boussinesq.exceptions import PreconditionError
from boussinesq.numerics.dynamics import HydrostaticProfile, bubble_perturbation
from boussinesq.numerics.elliptic import (
    bilaplacian_constant,
    clear_factorization_cache,
    leray_decompose,
    leray_project,
    solve_biharmonic_clamped,
    solve_helmholtz,
    solve_stokes_buoyancy,
    stokes_residual,
    weak_divergence,
)
from boussinesq.numerics.fields import VelocityField, d1_array, ddx1_physical, l2_norm, velocity_l2
from boussinesq.numerics.grid import Field, SpectralField, build_grid, to_physical, to_spectral


def observed_orders(errors) -> list[float]:
    return [float(np.log2(a / b)) for a, b in zip(errors, errors[1:])]


def random_velocity(grid, rng) -> VelocityField:
    def component():
        coeffs = rng.standard_normal((grid.kmax + 1, grid.n2)) + 1j * rng.standard_normal(
            (grid.kmax + 1, grid.n2)
        )
        coeffs[0] = coeffs[0].real
        return to_physical(SpectralField(grid, coeffs))

    return VelocityField(component(), component())


class BiharmonicTests(SimpleTestCase):
    def tearDown(self):
        clear_factorization_cache()

    @staticmethod
    def manufactured_error(n2: int) -> float:
        """Max error for psi = cos(x1) sin^2(pi x2)."""
        grid = build_grid(4, n2)
        pi2 = np.pi**2
        source = Field.from_function(
            grid,
            lambda x1, x2: np.cos(x1) * (0.5 - (8 * pi2**2 + 4 * pi2 + 0.5) * np.cos(2 * np.pi * x2)),
        )
        exact = Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.sin(np.pi * x2) ** 2)
        psi = solve_biharmonic_clamped(to_spectral(source))
        return float(np.max(np.abs(psi.values - exact.values)))

    def test_manufactured_solution_converges_at_second_order(self):
        errors = [self.manufactured_error(n2) for n2 in (65, 129, 257)]
        for order in observed_orders(errors):
            self.assertGreaterEqual(order, 1.9)

    def test_solver_is_linear(self):
        grid = build_grid(8, 33)
        rng = np.random.default_rng(2)
        h1, h2 = (to_spectral(Field(grid, rng.standard_normal((grid.n1, grid.n2)))) for _ in range(2))
        combined = SpectralField(grid, 2.0 * h1.coeffs - 0.5 * h2.coeffs)
        psi = solve_biharmonic_clamped(combined).values
        expected = 2.0 * solve_biharmonic_clamped(h1).values - 0.5 * solve_biharmonic_clamped(h2).values
        self.assertLess(np.max(np.abs(psi - expected)), 1e-10 * np.max(np.abs(expected)))

    def test_zero_source_gives_zero_solution(self):
        grid = build_grid(4, 33)
        psi = solve_biharmonic_clamped(SpectralField.zeros(grid))
        self.assertTrue(np.all(psi.values == 0))

    def test_non_finite_source_raises(self):
        grid = build_grid(4, 33)
        source = SpectralField.zeros(grid)
        source.coeffs[1, 5] = np.inf
        with self.assertRaises(PreconditionError):
            solve_biharmonic_clamped(source)


class StokesTests(SimpleTestCase):
    def test_stratified_density_leaves_fluid_at_rest(self):
        grid = build_grid(8, 65)
        rho = Field.from_profile(grid, HydrostaticProfile.linear(grid, 1.0).rho_s)
        solution = solve_stokes_buoyancy(rho)
        self.assertLessEqual(velocity_l2(solution.v), 1e-10 * l2_norm(rho))

    def test_velocity_satisfies_no_slip(self):
        grid = build_grid(16, 65)
        rho = Field.from_function(grid, lambda x1, x2: 1 - x2 + 0.1 * np.cos(x1) * np.sin(np.pi * x2) ** 4)
        v = solve_stokes_buoyancy(rho).v
        for comp in (v.u1, v.u2):
            self.assertLess(np.max(np.abs(comp.values[:, [0, -1]])), 1e-13)
        self.assertGreater(velocity_l2(v), 0.0)

    def test_solution_is_linear_in_density(self):
        grid = build_grid(8, 33)
        g = Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.sin(np.pi * x2) ** 2)
        b = bubble_perturbation(grid, 1.0, 0.3, 4.0)
        v_g, v_b = solve_stokes_buoyancy(g).v, solve_stokes_buoyancy(b).v
        v = solve_stokes_buoyancy(Field(grid, 0.3 * g.values + 2.0 * b.values)).v
        expected = VelocityField(
            Field(grid, 0.3 * v_g.u1.values + 2.0 * v_b.u1.values),
            Field(grid, 0.3 * v_g.u2.values + 2.0 * v_b.u2.values),
        )
        self.assertLess(velocity_l2(v - expected), 1e-10 * velocity_l2(expected))

    def test_momentum_residual_converges_on_bubble(self):
        residuals = []
        for n2 in (65, 129, 257):
            grid = build_grid(85, n2)
            profile = HydrostaticProfile.linear(grid, 1.0)
            theta = bubble_perturbation(grid, 0.1, 0.15, 4.0)
            rho = Field(grid, theta.values + profile.rho_s[None, :])
            r1, r2 = stokes_residual(rho, solve_stokes_buoyancy(rho))
            residuals.append(float(np.hypot(r1, r2)))
        for order in observed_orders(residuals):
            self.assertGreaterEqual(order, 1.9)


class LerayTests(SimpleTestCase):
    def setUp(self):
        self.grid = build_grid(8, 65)
        self.rng = np.random.default_rng(11)

    def test_gradients_are_projected_out(self):
        grid = self.grid
        potential = Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.sin(np.pi * x2) ** 2 + x2**2)
        gradient = VelocityField(
            ddx1_physical(potential),
            Field(grid, d1_array(potential.values, grid.dx2)),
        )
        projected = leray_project(gradient)
        self.assertLess(velocity_l2(projected), 1e-8 * velocity_l2(gradient))

    def test_projection_is_idempotent_and_non_expansive(self):
        for _ in range(50):
            f = random_velocity(self.grid, self.rng)
            once = leray_project(f)
            twice = leray_project(once)
            self.assertLessEqual(velocity_l2(twice - once), 1e-8 * velocity_l2(once))
            self.assertLessEqual(velocity_l2(once), velocity_l2(f) * (1 + 1e-6))

    def test_projection_is_weakly_divergence_free(self):
        f = random_velocity(self.grid, self.rng)
        div = weak_divergence(leray_project(f))
        scale = velocity_l2(f) / self.grid.dx2
        self.assertLess(np.max(np.abs(div.values)), 1e-9 * scale)

    def test_decomposition_pair_reconstructs_projection(self):
        """v = -grad q - f is minus the projection, q has zero mean."""
        f = random_velocity(self.grid, self.rng)
        v, q = leray_decompose(f)
        projected = leray_project(f)
        self.assertLess(velocity_l2(VelocityField(v.u1 + projected.u1, v.u2 + projected.u2)), 1e-12 * velocity_l2(f))
        self.assertLessEqual(velocity_l2(v), velocity_l2(f) * (1 + 1e-6))
        mean = float(np.sum(self.grid.trapezoid_weights * to_spectral(q).coeffs[0].real))
        self.assertAlmostEqual(mean, 0.0, places=10)

    def test_divergence_free_field_maps_to_its_negative(self):
        """For weakly divergence-free f the potential is constant and v = -f."""
        f = leray_project(random_velocity(self.grid, self.rng))
        v, q = leray_decompose(f)
        self.assertLess(velocity_l2(VelocityField(v.u1 + f.u1, v.u2 + f.u2)), 1e-8 * velocity_l2(f))
        self.assertLess(l2_norm(q), 1e-8 * velocity_l2(f))

    def test_stream_function_field_maps_to_its_negative(self):
        grid = build_grid(4, 257)
        psi = Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.sin(np.pi * x2) ** 2)
        f = VelocityField(
            Field(grid, d1_array(psi.values, grid.dx2)),
            ddx1_physical(psi).scaled(-1.0),
        )
        v, _ = leray_decompose(f)
        self.assertLess(velocity_l2(VelocityField(v.u1 + f.u1, v.u2 + f.u2)), 1e-3 * velocity_l2(f))

    def test_non_finite_input_raises(self):
        f = random_velocity(self.grid, self.rng)
        f.u2.values[2, 2] = np.nan
        with self.assertRaises(PreconditionError):
            leray_project(f)


class HelmholtzTests(SimpleTestCase):
    def test_solution_satisfies_the_stencil(self):
        n2 = 33
        h = 1.0 / (n2 - 1)
        k, alpha = 2, 0.1
        rng = np.random.default_rng(5)
        rhs = rng.standard_normal(n2)
        y = solve_helmholtz(k, alpha, rhs)
        self.assertEqual(y[0], 0.0)
        self.assertEqual(y[-1], 0.0)
        lap = (y[2:] - 2 * y[1:-1] + y[:-2]) / h**2 - k**2 * y[1:-1]
        np.testing.assert_allclose(y[1:-1] - alpha * lap, rhs[1:-1], atol=1e-10)

    def test_zero_alpha_is_identity_on_interior(self):
        rhs = np.random.default_rng(6).standard_normal(17)
        y = solve_helmholtz(3, 0.0, rhs)
        np.testing.assert_allclose(y[1:-1], rhs[1:-1], rtol=1e-14)

    def test_sine_mode_is_an_eigenfunction(self):
        n2, alpha = 129, 0.5
        h = 1.0 / (n2 - 1)
        x2 = np.linspace(0.0, 1.0, n2)
        rhs = np.sin(np.pi * x2)
        y = solve_helmholtz(0, alpha, rhs)
        discrete = 4.0 / h**2 * np.sin(0.5 * np.pi * h) ** 2
        np.testing.assert_allclose(y[1:-1], rhs[1:-1] / (1 + alpha * discrete), atol=1e-10)
        np.testing.assert_allclose(y, rhs / (1 + alpha * np.pi**2), atol=1e-4)

    def test_large_alpha_contracts_by_the_wavenumber(self):
        k, alpha = 5, 1e3
        rhs = np.random.default_rng(8).uniform(-1.0, 1.0, 65)
        y = solve_helmholtz(k, alpha, rhs)
        bound = np.linalg.norm(rhs[1:-1]) / (1 + alpha * k**2) * (1 + 1e-2)
        self.assertLessEqual(np.linalg.norm(y), bound)

    def test_solution_is_linear(self):
        rng = np.random.default_rng(9)
        a, b = rng.standard_normal(33), rng.standard_normal(33)
        combined = solve_helmholtz(2, 0.1, 3.0 * a - b)
        expected = 3.0 * solve_helmholtz(2, 0.1, a) - solve_helmholtz(2, 0.1, b)
        np.testing.assert_allclose(combined, expected, atol=1e-10 * np.max(np.abs(expected)))

    def test_negative_alpha_raises(self):
        with self.assertRaises(PreconditionError):
            solve_helmholtz(1, -0.5, np.zeros(17))


class NormEquivalenceTests(SimpleTestCase):
    def test_bilaplacian_constant_is_stable_under_refinement(self):
        constants = []
        for n2 in (65, 129, 257):
            grid = build_grid(4, n2)
            f = Field.from_function(grid, lambda x1, x2: np.cos(x1) * np.sin(np.pi * x2) ** 4)
            constants.append(bilaplacian_constant(f))
        self.assertTrue(all(np.isfinite(c) and c > 0 for c in constants))
        self.assertLess(max(constants) / min(constants), 1.2)

    def test_zero_field_raises(self):
        with self.assertRaises(PreconditionError):
            bilaplacian_constant(Field.zeros(build_grid(4, 33)))
