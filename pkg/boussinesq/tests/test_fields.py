"""
Tests for differential operators, quadrature and norms.
"""

import numpy as np
from django.test import SimpleTestCase

from boussinesq.exceptions import PreconditionError
from boussinesq.numerics.dynamics import SimState, velocity_from_state
from boussinesq.numerics.fields import (
    VelocityField,
    d2dx2,
    ddx1,
    ddx1_physical,
    ddx2,
    divergence,
    grad_sq,
    h_k_norm,
    integrate,
    l2_norm,
    stratification_surrogate,
    w_k_inf_grid_max,
)
from boussinesq.numerics.grid import Field, SpectralField, build_grid, to_physical, to_spectral


class OperatorTests(SimpleTestCase):
    def setUp(self):
        self.grid = build_grid(8, 33)

    def test_ddx1_multiplies_by_ik(self):
        f = to_spectral(Field.from_function(self.grid, lambda x1, x2: np.cos(x1) + 0 * x2))
        expected = Field.from_function(self.grid, lambda x1, x2: -np.sin(x1) + 0 * x2)
        np.testing.assert_allclose(to_physical(ddx1(f)).values, expected.values, atol=1e-12)

        flat = SpectralField.from_profile(self.grid, self.grid.x2**2)
        np.testing.assert_array_equal(ddx1(flat).coeffs, 0.0)

    def test_ddx1_is_spectrally_exact(self):
        f = Field.from_function(self.grid, lambda x1, x2: np.sin(3 * x1) * (1 + x2))
        expected = Field.from_function(self.grid, lambda x1, x2: 3 * np.cos(3 * x1) * (1 + x2))
        np.testing.assert_allclose(ddx1_physical(f).values, expected.values, atol=1e-12)

    def test_ddx2_is_exact_on_quadratics(self):
        f = Field.from_function(self.grid, lambda x1, x2: x2**2)
        np.testing.assert_allclose(ddx2(f).values, 2 * Field.from_function(self.grid, lambda x1, x2: x2).values, atol=1e-12)

    def test_d2dx2_is_exact_on_cubics_including_walls(self):
        f = Field.from_function(self.grid, lambda x1, x2: x2**3 - x2)
        expected = Field.from_function(self.grid, lambda x1, x2: 6 * x2)
        np.testing.assert_allclose(d2dx2(f).values, expected.values, atol=1e-9)

    def test_integrate_constant_and_linear(self):
        one = Field.from_function(self.grid, lambda x1, x2: np.ones_like(x1))
        self.assertAlmostEqual(integrate(one), 2 * np.pi, places=12)
        height = Field.from_function(self.grid, lambda x1, x2: x2)
        self.assertAlmostEqual(integrate(height), np.pi, places=12)

    def test_l2_norm_of_mode(self):
        """||cos x1|| over T x (0,1) is sqrt(pi)."""
        f = Field.from_function(self.grid, lambda x1, x2: np.cos(x1) + 0 * x2)
        self.assertAlmostEqual(l2_norm(f), np.sqrt(np.pi), places=12)

    def test_sobolev_norms_are_monotone_in_order(self):
        f = Field.from_function(self.grid, lambda x1, x2: np.cos(x1) * np.sin(np.pi * x2) ** 4)
        norms = [h_k_norm(f, k) for k in range(5)]
        self.assertAlmostEqual(norms[0], l2_norm(f), places=12)
        self.assertTrue(all(a <= b for a, b in zip(norms, norms[1:])))
        self.assertGreaterEqual(w_k_inf_grid_max(f, 2), w_k_inf_grid_max(f, 1))

    def test_sobolev_order_outside_range_raises(self):
        f = Field.zeros(self.grid)
        with self.assertRaises(PreconditionError):
            h_k_norm(f, 5)
        with self.assertRaises(PreconditionError):
            w_k_inf_grid_max(f, -1)

    def test_grad_sq_of_shear(self):
        """u = (x2, 0) has ||grad u||^2 = 2 pi."""
        u = VelocityField(Field.from_function(self.grid, lambda x1, x2: x2 + 0 * x1), Field.zeros(self.grid))
        self.assertAlmostEqual(grad_sq(u), 2 * np.pi, places=10)


class StratificationSurrogateTests(SimpleTestCase):
    def setUp(self):
        self.grid = build_grid(4, 65)
        self.rho_s = 1.0 - self.grid.x2

    def perturbation(self, eps):
        return Field.from_function(self.grid, lambda x1, x2: eps * np.cos(x1) * np.sin(np.pi * x2) ** 2)

    def test_stratified_density_gives_zero(self):
        self.assertLessEqual(stratification_surrogate(Field.from_profile(self.grid, self.rho_s)), 1e-10)

    def test_linear_in_perturbation(self):
        small = stratification_surrogate(self.perturbation(0.01))
        large = stratification_surrogate(self.perturbation(0.02))
        self.assertGreater(small, 0.0)
        self.assertAlmostEqual(large / small, 2.0, places=8)

    def test_background_profile_does_not_contribute(self):
        g = self.perturbation(1.0).values
        with_background = stratification_surrogate(Field(self.grid, self.rho_s[None, :] + 0.01 * g))
        unit = stratification_surrogate(Field(self.grid, self.rho_s[None, :] + g))
        self.assertAlmostEqual(with_background / (0.01 * unit), 1.0, places=8)


class StreamFunctionVelocityTests(SimpleTestCase):
    def test_velocity_from_stream_function_is_divergence_free(self):
        grid = build_grid(8, 65)
        rng = np.random.default_rng(3)
        coeffs = rng.standard_normal((grid.kmax + 1, grid.n2)) + 1j * rng.standard_normal((grid.kmax + 1, grid.n2))
        coeffs[:, 0] = coeffs[:, -1] = 0.0
        coeffs[0] = 0.0
        state = SimState(
            t=0.0,
            theta=SpectralField.zeros(grid),
            phi=SpectralField(grid, coeffs),
            mean_u1=np.sin(np.pi * grid.x2),
        )
        u = velocity_from_state(state)
        scale = max(np.max(np.abs(u.u1.values)), np.max(np.abs(u.u2.values))) / grid.dx2
        self.assertLess(np.max(np.abs(divergence(u).values)), 1e-12 * scale)

    def test_velocity_vanishes_on_walls(self):
        grid = build_grid(4, 33)
        x2 = grid.x2
        phi = SpectralField.zeros(grid)
        phi.coeffs[1] = np.sin(np.pi * x2) ** 2
        state = SimState(0.0, SpectralField.zeros(grid), phi, np.zeros(grid.n2))
        u = velocity_from_state(state)
        for comp in (u.u1, u.u2):
            self.assertLess(np.max(np.abs(comp.values[:, [0, -1]])), 1e-14)
        self.assertGreater(np.max(np.abs(to_physical(phi).values)), 0.5)
