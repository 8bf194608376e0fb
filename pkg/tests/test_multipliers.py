import numpy as np
import pytest
from numpy.testing import assert_allclose

from lp_euler.core import SpectralField, VectorField, derivative, gradient
from lp_euler.errors import DivergenceError, HomogeneousMultiplierError
from lp_euler.ops import (
    convective_term,
    frac_deriv,
    leray,
    pressure_gradient,
    riesz_multiplier,
)
from lp_euler.verify import FieldGenSpec, generate


def _field(grid, func):
    return SpectralField.from_samples(func(*grid.coordinates), grid)


def _vector(grid, *funcs):
    return VectorField([_field(grid, func) for func in funcs])


def _taylor_green_velocity(grid):
    return _vector(
        grid,
        lambda x, y: np.sin(x) * np.cos(y),
        lambda x, y: -np.cos(x) * np.sin(y),
    )


class TestRiesz:
    def test_cosine(self, grid2d):
        f = _field(grid2d, lambda x, y: np.cos(x))
        expected = np.sin(grid2d.coordinates[0])
        assert_allclose(riesz_multiplier(f, 0).samples(), expected,
                        atol=1e-14)
        assert_allclose(riesz_multiplier(f, 1).samples(), 0, atol=1e-14)

    def test_divergence_recovers_field(self, grid2d):
        f = generate(FieldGenSpec(seed=3, band_range=(0, 3)), grid2d)
        total = derivative(riesz_multiplier(f, 0), 0) + derivative(
            riesz_multiplier(f, 1), 1
        )
        assert_allclose(total.samples(), f.samples(), atol=1e-12)

    def test_rejects_mean(self, grid2d):
        f = _field(grid2d, lambda x, y: 1 + np.cos(x))
        with pytest.raises(HomogeneousMultiplierError):
            riesz_multiplier(f, 0)

    def test_rejects_direction(self, grid2d):
        f = _field(grid2d, lambda x, y: np.cos(x))
        with pytest.raises(ValueError):
            riesz_multiplier(f, 2)


class TestFractionalDerivative:
    @pytest.mark.parametrize(["s", "factor"], [
        pytest.param(1.0, 2.0, id="s=1"),
        pytest.param(2.0, 4.0, id="s=2"),
        pytest.param(0.5, np.sqrt(2.0), id="s=1/2"),
        pytest.param(-1.0, 0.5, id="s=-1"),
    ])
    def test_pure_mode(self, grid2d, s, factor):
        f = _field(grid2d, lambda x, y: np.cos(2 * x))
        assert_allclose(frac_deriv(f, s).samples(), factor * f.samples(),
                        atol=1e-13)

    def test_identity_keeps_mean(self, grid2d):
        f = _field(grid2d, lambda x, y: 3 + np.cos(x))
        assert frac_deriv(f, 0) is f
        assert frac_deriv(f, 1).mean == 0

    def test_inverse_pair(self, grid2d):
        f = generate(FieldGenSpec(seed=6, band_range=(-1, 3)), grid2d)
        back = frac_deriv(frac_deriv(f, 1.5), -1.5)
        assert_allclose(back.samples(), f.without_mean().samples(),
                        atol=1e-12)


class TestLeray:
    def test_output_is_divergence_free(self, grid2d):
        u = generate(FieldGenSpec(seed=1, kind="vector"), grid2d)
        assert u.divergence_residual() > 1e-3
        assert leray(u).divergence_residual() < 1e-12

    def test_idempotent(self, grid2d):
        u = generate(FieldGenSpec(seed=2, kind="vector"), grid2d)
        once = leray(u)
        twice = leray(once)
        for a, b in zip(once, twice):
            assert_allclose(a.coeffs, b.coeffs, atol=1e-14)

    def test_gradients_are_removed(self, grid2d):
        phi = generate(FieldGenSpec(seed=3, band_range=(0, 3)), grid2d)
        projected = leray(gradient(phi))
        assert_allclose(projected.samples(), 0, atol=1e-12)

    def test_divergence_free_fields_pass(self, grid2d):
        u = _taylor_green_velocity(grid2d)
        assert_allclose(leray(u).samples(), u.samples(), atol=1e-14)

    def test_mean_passes_through(self, grid2d):
        u = _vector(grid2d, lambda x, y: 2 + np.cos(x),
                    lambda x, y: -1 + np.zeros_like(x))
        assert_allclose(leray(u).mean, [2, -1], atol=1e-14)


class TestPressure:
    def test_shear_flow(self, grid2d):
        u = _vector(grid2d, lambda x, y: np.sin(y),
                    lambda x, y: np.zeros_like(x))
        assert_allclose(pressure_gradient(u).samples(), 0, atol=1e-14)

    def test_taylor_green(self, grid2d):
        u = _taylor_green_velocity(grid2d)
        grad_p = pressure_gradient(u)
        x, y = grid2d.coordinates
        expected = [-0.5 * np.sin(2 * x), -0.5 * np.sin(2 * y)]
        assert_allclose(grad_p.samples(), expected, atol=1e-13)
        total = convective_term(u) + grad_p
        assert_allclose(total.samples(), 0, atol=1e-13)

    def test_projects_the_convective_term(self, grid2d):
        u = generate(FieldGenSpec(seed=5, kind="divergence_free",
                                  band_range=(0, 2)), grid2d)
        nonlinear = convective_term(u)
        total = nonlinear + pressure_gradient(u)
        assert total.divergence_residual() < 1e-12
        for a, b in zip(total, leray(nonlinear)):
            assert_allclose(a.coeffs, b.coeffs, atol=1e-14)

    def test_rejects_compressible_velocity(self, grid2d):
        u = _vector(grid2d, lambda x, y: np.sin(x),
                    lambda x, y: np.zeros_like(x))
        with pytest.raises(DivergenceError):
            pressure_gradient(u)
