import numpy as np
import pytest
from numpy.testing import assert_allclose

from lp_euler.core import Grid, SpectralField
from lp_euler.errors import SupportError
from lp_euler.ops import (
    MaximalConfig,
    ball_indicator,
    maximal,
    peetre_maximal,
    peetre_ratio,
    support_radius,
)
from lp_euler.verify import FieldGenSpec, generate


class TestMaximalConfig:
    def test_default_radii(self):
        assert MaximalConfig(n=32).radii == (1, 2, 4, 8, 16)

    @pytest.mark.parametrize("radii", [
        pytest.param([], id="empty"),
        pytest.param([1, 1], id="repeated"),
        pytest.param([2, 4], id="no single cell"),
        pytest.param([-1, 2], id="negative"),
    ])
    def test_invalid(self, radii):
        with pytest.raises(ValueError):
            MaximalConfig(radii=radii)

    def test_needs_radii_or_n(self):
        with pytest.raises(ValueError):
            MaximalConfig()


class TestMaximal:
    def test_balls_are_open(self, grid2d):
        assert np.count_nonzero(ball_indicator(grid2d, 1)) == 1
        assert np.count_nonzero(ball_indicator(grid2d, 2)) == 9

    def test_constant(self, grid2d):
        samples = np.full(grid2d.shape, -3.0)
        assert_allclose(maximal(samples, grid2d), 3.0, rtol=1e-12)

    def test_spike(self, grid2d):
        samples = np.zeros(grid2d.shape)
        samples[0, 0] = 1.0
        mf = maximal(samples, grid2d, MaximalConfig(radii=[1, 2]))
        assert mf[0, 0] == 1.0
        assert mf[1, 1] == pytest.approx(1 / 9)
        assert mf[5, 5] == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.repeat(3)
    def test_pointwise_bounds(self, grid2d):
        samples = np.random.default_rng().standard_normal(grid2d.shape)
        mf = maximal(samples, grid2d)
        assert np.all(mf >= np.abs(samples))
        assert np.all(mf <= np.max(np.abs(samples)))

    def test_sublinear(self, grid2d):
        rng = np.random.default_rng(4)
        f = rng.standard_normal(grid2d.shape)
        g = rng.standard_normal(grid2d.shape)
        lhs = maximal(f + g, grid2d)
        rhs = maximal(f, grid2d) + maximal(g, grid2d)
        assert np.all(lhs <= rhs * (1 + 1e-12))

    def test_rejects_complex(self, grid2d):
        with pytest.raises(TypeError):
            maximal(np.zeros(grid2d.shape, dtype=complex), grid2d)

    def test_rejects_shape(self, grid2d):
        with pytest.raises(ValueError):
            maximal(np.zeros((32, 8)), grid2d)


class TestPeetre:
    def test_dominates_modulus(self, grid2d):
        values = np.abs(
            np.random.default_rng(1).standard_normal(grid2d.shape)
        )
        sup = peetre_maximal(values, grid2d, t=4.0, r=0.5)
        assert np.all(sup >= values)
        assert np.all(sup <= values.max())

    def test_single_spike_decay(self):
        grid = Grid(d=1, n=16, L=1.0)
        values = np.zeros(grid.shape)
        values[0] = 1.0
        sup = peetre_maximal(values, grid, t=1.0, r=1.0)
        expected = (1 + grid.periodic_distance) ** -1.0
        assert_allclose(sup, expected, rtol=1e-12)

    def test_invalid_parameters(self, grid2d):
        values = np.ones(grid2d.shape)
        with pytest.raises(ValueError):
            peetre_maximal(values, grid2d, t=0.0, r=1.0)
        with pytest.raises(ValueError):
            peetre_maximal(-values, grid2d, t=1.0, r=1.0)

    def test_zero_field(self, grid2d):
        report = peetre_ratio(SpectralField.zeros(grid2d), t=4.0)
        assert report.empty
        assert report.ratio is None

    def test_support_checked(self, grid2d):
        f = generate(FieldGenSpec(seed=0, band_range=(0, 3)), grid2d)
        assert support_radius(f) > 4.0
        with pytest.raises(SupportError):
            peetre_ratio(f, t=4.0)

    def test_band_limited_ratio(self, grid2d):
        f = generate(FieldGenSpec(seed=0, band_range=(0, 2)), grid2d)
        t = 8.0
        assert support_radius(f) <= t
        report = peetre_ratio(f, t=t)
        assert report.ratio > 0
        assert report.gradient_ratio > 0
        assert report.lhs == pytest.approx(report.ratio * report.rhs)

    def test_quotient_is_one_only_at_the_peak(self, grid2d):
        f = generate(FieldGenSpec(seed=3, band_range=(0, 2)), grid2d)
        report = peetre_ratio(f, t=8.0)
        absu = np.abs(f.samples())
        peak = np.unravel_index(np.argmax(absu), absu.shape)
        assert report.quotient[peak] == pytest.approx(1.0, rel=1e-12)
        assert report.ratio >= report.quotient[peak]
        # Near the zeros of f the Peetre side is far below the bound.
        assert np.min(report.quotient[absu < 0.1 * absu.max()]) < 0.5

    def test_ratio_exceeds_one_without_averaging(self):
        # With single-cell balls M(|u|^r)^{1/r} = |u|, which the slowly
        # decaying Peetre weight beats next to the peak of cos.
        grid = Grid(d=1, n=8, L=1.0)
        x = grid.coordinates[0]
        f = SpectralField.from_samples(np.cos(x), grid)
        report = peetre_ratio(f, t=1.0, r=4.0, cfg=MaximalConfig(radii=[1.0]))
        weight = (1 + grid.dx) ** -0.25
        assert report.quotient[1] == pytest.approx(
            weight / np.cos(grid.dx), rel=1e-12
        )
        assert report.ratio > 1.2
