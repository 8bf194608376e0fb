import numpy as np
import pytest
from numpy.testing import assert_allclose

from lp_euler.core import Grid, SpectralField, dealias_mask
from lp_euler.errors import BlowUpError
from lp_euler.euler2d import (
    CSV_COLUMNS,
    PRESETS,
    EulerState,
    SimConfig,
    biot_savart,
    cfl_number,
    integrate,
    measure,
    preset,
    rhs,
    richardson_order,
    simulate,
    step_rk4,
)
import lp_euler.euler2d.simulation as simulation


@pytest.fixture
def grid():
    return Grid(d=2, n=32, L=1.0)


class TestPresets:
    @pytest.mark.parametrize("name", PRESETS)
    def test_mean_free_and_dealiased(self, grid, name):
        omega = preset(name, grid)
        assert omega.mean == 0
        assert not np.any(omega.coeffs[~dealias_mask(grid)])
        assert omega.max_amplitude() > 0

    def test_taylor_green(self, grid):
        omega = preset("taylor-green", grid)
        x, y = grid.coordinates
        assert_allclose(omega.samples(), 2 * np.sin(x) * np.sin(y),
                        atol=1e-14)

    def test_random_smooth(self, grid):
        a = preset("random-smooth", grid, seed=4)
        b = preset("random-smooth", grid, seed=4)
        c = preset("random-smooth", grid, seed=5)
        assert np.array_equal(a.coeffs, b.coeffs)
        assert not np.allclose(a.coeffs, c.coeffs)
        rms = np.sqrt(np.mean(a.samples() ** 2))
        assert rms == pytest.approx(1.0, rel=1e-12)

    def test_vortex_pair_is_antisymmetric(self, grid):
        samples = preset("vortex-pair", grid).samples()
        # Mirroring x_1 about the box centre swaps the two vortices.
        mirrored = np.roll(samples[::-1], 1, axis=0)
        assert_allclose(mirrored, -samples, atol=1e-12)

    def test_invalid(self, grid):
        with pytest.raises(ValueError):
            preset("hurricane", grid)
        with pytest.raises(ValueError):
            preset("shear", Grid(d=3, n=8, L=1.0))


class TestBiotSavart:
    def test_taylor_green_velocity(self, grid):
        u = biot_savart(preset("taylor-green", grid))
        x, y = grid.coordinates
        assert_allclose(u[0].samples(), np.sin(x) * np.cos(y), atol=1e-14)
        assert_allclose(u[1].samples(), -np.cos(x) * np.sin(y), atol=1e-14)

    def test_divergence_free(self, grid):
        u = biot_savart(preset("random-smooth", grid, seed=1))
        assert u.divergence_residual() < 1e-14

    def test_needs_2d(self):
        grid = Grid(d=3, n=8, L=1.0)
        with pytest.raises(ValueError):
            biot_savart(SpectralField.zeros(grid))


class TestRightHandSide:
    @pytest.mark.parametrize("name", ["taylor-green", "shear"])
    def test_steady_states(self, grid, name):
        assert rhs(preset(name, grid)).max_amplitude() < 1e-12

    def test_invariants_of_truncated_dynamics(self, grid):
        omega = preset("random-smooth", grid, seed=2)
        domega = rhs(omega)
        assert domega.mean == 0
        # d/dt of the enstrophy, sum conj(w) dw over all modes.
        rate = np.vdot(omega.coeffs, domega.coeffs).real
        scale = np.sum(np.abs(omega.coeffs) * np.abs(domega.coeffs))
        assert abs(rate) < 1e-12 * scale

    def test_zero_step_is_identity(self, grid):
        state = EulerState(0.3, preset("random-smooth", grid))
        assert step_rk4(state, 0.0) is state

    def test_step_advances_time(self, grid):
        state = EulerState(0.0, preset("random-smooth", grid))
        after = step_rk4(state, 0.01)
        assert after.t == pytest.approx(0.01)
        assert not np.array_equal(after.omega.coeffs, state.omega.coeffs)

    def test_non_finite_stage(self, grid):
        coeffs = np.zeros(grid.shape, dtype=complex)
        coeffs[1, 1] = coeffs[-1, -1] = np.inf
        state = EulerState(0.0, SpectralField(grid, coeffs))
        with pytest.raises(BlowUpError):
            step_rk4(state, 0.01)

    def test_integrate_lands_on_t_end(self, grid):
        omega = preset("random-smooth", grid, seed=3)
        stepped = integrate(omega, 0.25, 0.1)
        manual = EulerState(0.0, omega)
        for h in (0.1, 0.1, 0.05):
            manual = step_rk4(manual, h)
        assert_allclose(stepped.coeffs, manual.omega.coeffs, atol=1e-15)


class TestSimConfig:
    def test_defaults(self, grid):
        config = SimConfig(grid, dt=0.1, t_end=0.25)
        assert config.n_steps == 3
        assert config.time_at(2) == pytest.approx(0.2)
        assert config.time_at(3) == 0.25
        assert config.to_dict()["initial_condition"] == "taylor-green"

    def test_exact_multiple(self, grid):
        assert SimConfig(grid, dt=0.1, t_end=1.0).n_steps == 10
        assert SimConfig(grid, dt=0.1, t_end=0.0).n_steps == 0

    @pytest.mark.parametrize(["kwargs", "error"], [
        pytest.param({"dt": 0.0}, ValueError, id="dt=0"),
        pytest.param({"dt": -1e-3}, ValueError, id="negative dt"),
        pytest.param({"dt": np.inf}, ValueError, id="infinite dt"),
        pytest.param({"t_end": -1.0}, ValueError, id="negative t_end"),
        pytest.param({"C0": 0.0}, ValueError, id="C0=0"),
        pytest.param({"monitor_period": 0}, ValueError, id="period"),
        pytest.param({"initial_condition": "calm"}, ValueError, id="preset"),
        pytest.param({"initial_condition": 3}, TypeError, id="type"),
    ])
    def test_invalid(self, grid, kwargs, error):
        arguments = {"dt": 1e-3, "t_end": 0.1}
        arguments.update(kwargs)
        with pytest.raises(error):
            SimConfig(grid, **arguments)

    def test_needs_2d_grid(self):
        with pytest.raises(ValueError):
            SimConfig(Grid(d=3, n=8, L=1.0), dt=1e-3, t_end=0.1)
        with pytest.raises(TypeError):
            SimConfig((2, 32, 1.0), dt=1e-3, t_end=0.1)

    def test_initial_field_checks(self, grid):
        x, _ = grid.coordinates
        with_mean = SpectralField.from_samples(1 + np.cos(x), grid)
        with pytest.raises(ValueError):
            SimConfig(grid, 1e-3, 0.1, initial_condition=with_mean)
        other = preset("shear", Grid(d=2, n=16, L=1.0))
        with pytest.raises(ValueError):
            SimConfig(grid, 1e-3, 0.1, initial_condition=other)

    def test_low_smoothness_warns(self, grid):
        with pytest.warns(UserWarning, match="below d\\+1"):
            config = SimConfig(grid, dt=1e-3, t_end=0.1, s=2.0)
        assert config.s == 2.0


class TestSimulate:
    def test_taylor_green_is_steady(self, grid):
        config = SimConfig(grid, dt=0.01, t_end=0.1, monitor_period=2)
        trajectory = simulate(config)
        assert list(trajectory.times) == pytest.approx(
            [0, 0.02, 0.04, 0.06, 0.08, 0.1]
        )
        assert trajectory.drift("energy") < 1e-12
        assert trajectory.drift("f_norm") < 1e-10
        assert trajectory[0].energy == pytest.approx(np.pi**2, rel=1e-12)
        assert trajectory[0].enstrophy == pytest.approx(
            2 * np.pi**2, rel=1e-12
        )
        assert not trajectory.stopped
        assert trajectory.final_state.t == 0.1

    def test_zero_data(self, grid):
        config = SimConfig(
            grid, dt=0.05, t_end=0.2,
            initial_condition=SpectralField.zeros(grid),
        )
        trajectory = simulate(config)
        summary = trajectory.summary()
        assert summary["u0_f_norm"] == 0.0
        assert summary["fitted_C0"] == 1.0
        assert summary["T0_estimate"] is None
        assert summary["global_check"] == "pass"

    def test_single_sample(self, grid):
        trajectory = simulate(SimConfig(grid, dt=1e-3, t_end=0.0))
        assert len(trajectory) == 1
        summary = trajectory.summary()
        assert summary["samples"] == 1
        assert summary["fitted_C0"] == 1.0
        assert summary["global_check"] == "pass"
        assert summary["T0_estimate"] == pytest.approx(
            1 / summary["u0_f_norm"]
        )

    def test_shortened_last_step(self, grid):
        config = SimConfig(grid, dt=0.02, t_end=0.05, monitor_period=1,
                           initial_condition="random-smooth")
        trajectory = simulate(config)
        assert list(trajectory.times) == pytest.approx([0, 0.02, 0.04, 0.05])

    def test_invariants(self, grid):
        config = SimConfig(grid, dt=0.01, t_end=0.2, monitor_period=5,
                           initial_condition="random-smooth", seed=3)
        trajectory = simulate(config)
        assert np.all(trajectory.column("mean_vorticity") == 0)
        assert np.max(trajectory.column("divergence")) < 1e-12
        assert trajectory.drift("energy") < 1e-6
        assert trajectory.drift("enstrophy") < 1e-6
        summary = trajectory.summary()
        assert summary["global_check"] == "pass"
        assert summary["fitted_C0"] >= 1.0
        assert len(summary["l1_u"]) == len(trajectory)

    def test_csv(self, grid, tmp_path):
        config = SimConfig(grid, dt=0.01, t_end=0.05, monitor_period=1)
        trajectory = simulate(config)
        path = tmp_path / "run.csv"
        trajectory.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(trajectory)
        table = np.loadtxt(path, delimiter=",", skiprows=1)
        assert_allclose(table[:, 0], trajectory.times)

    def test_cfl_limit(self, grid):
        u = biot_savart(preset("taylor-green", grid))
        assert cfl_number(u, grid.dx) == pytest.approx(1.0)
        with pytest.raises(ValueError, match="CFL"):
            simulate(SimConfig(grid, dt=0.6 * grid.dx, t_end=1.0))
        config = SimConfig(grid, dt=0.45 * grid.dx, t_end=0.45 * grid.dx)
        with pytest.warns(UserWarning, match="CFL"):
            trajectory = simulate(config)
        assert len(trajectory) == 2

    def test_non_finite_stop(self, grid, monkeypatch):
        real_step = simulation.step_rk4
        calls = []

        def failing_step(state, dt, dealias=True):
            calls.append(dt)
            if len(calls) > 2:
                raise BlowUpError()
            return real_step(state, dt, dealias=dealias)

        monkeypatch.setattr(simulation, "step_rk4", failing_step)
        config = SimConfig(grid, dt=0.01, t_end=0.1, monitor_period=1,
                           initial_condition="random-smooth")
        trajectory = simulate(config)
        assert trajectory.stopped
        assert len(trajectory) == 3
        assert trajectory.final_state.t == pytest.approx(0.02)
        with pytest.warns(UserWarning, match="blow-up"):
            summary = trajectory.summary()
        assert summary["blowup_stop"] is True
        assert summary["global_check"] == "fail"

    def test_growth_guard(self, grid, monkeypatch):
        def exploding_step(state, dt, dealias=True):
            return EulerState(state.t + dt, state.omega * 1e7)

        monkeypatch.setattr(simulation, "step_rk4", exploding_step)
        trajectory = simulate(SimConfig(grid, dt=0.01, t_end=0.1))
        assert trajectory.stopped
        assert "vorticity grew" in trajectory.stop_reason
        assert len(trajectory) == 1
        assert trajectory.summary()["global_check"] == "fail"

    def test_measure_taylor_green(self, grid):
        record = measure(EulerState(0.0, preset("taylor-green", grid)))
        assert record.linf_u == pytest.approx(1.0)
        assert record.grad_p_l1 > 0
        assert record.divergence < 1e-14
        assert record.mean_vorticity == 0


class TestTemporalOrder:
    def test_steady_flow_has_no_error(self, grid):
        with pytest.raises(ValueError):
            richardson_order(preset("shear", grid), 0.1, 0.05)

    @pytest.mark.slow
    def test_fourth_order(self, grid):
        omega = preset("random-smooth", grid, seed=1)
        order = richardson_order(omega, 0.2, 0.02)
        assert 3.5 <= order <= 4.5


class TestLongRuns:
    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["taylor-green", "shear"])
    def test_steady_states(self, name):
        grid = Grid(d=2, n=128, L=1.0)
        config = SimConfig(grid, dt=1e-3, t_end=1.0, monitor_period=100,
                           initial_condition=name)
        trajectory = simulate(config)
        assert trajectory.final_state.t == 1.0
        omega0 = preset(name, grid)
        change = trajectory.final_state.omega - omega0
        assert np.max(np.abs(change.samples())) <= 1e-8
        assert trajectory.drift("f_norm") <= 1e-6
        assert trajectory.summary()["global_check"] == "pass"

    @pytest.mark.slow
    def test_conservation(self):
        grid = Grid(d=2, n=256, L=1.0)
        config = SimConfig(grid, dt=1e-3, t_end=2.0, monitor_period=200,
                           initial_condition="random-smooth", seed=7)
        trajectory = simulate(config)
        assert trajectory.final_state.t == 2.0
        assert trajectory.drift("energy") <= 1e-8
        assert trajectory.drift("enstrophy") <= 1e-6
        assert np.max(trajectory.column("divergence")) <= 1e-10
        assert np.max(trajectory.column("mean_vorticity")) <= 1e-13

    @pytest.mark.slow
    def test_vortex_pair_constant_is_resolution_stable(self):
        # T0 is about 0.02 here, so the samples are spaced well inside it.
        fitted = []
        for n in (128, 256):
            config = SimConfig(Grid(d=2, n=n, L=1.0), dt=1e-3, t_end=0.05,
                               monitor_period=5,
                               initial_condition="vortex-pair")
            trajectory = simulate(config)
            summary = trajectory.summary()
            assert summary["envelope_samples"] >= 2
            early = trajectory.times < 0.8 * summary["T0_estimate"]
            envelope = trajectory.envelope()
            assert np.all(trajectory.sup_f_norm()[early] <= envelope[early])
            fitted.append(summary["fitted_C0"])
        assert 0.5 <= fitted[1] / fitted[0] <= 2.0

    @pytest.mark.slow
    def test_vortex_pair_global_check(self):
        grid = Grid(d=2, n=256, L=1.0)
        config = SimConfig(grid, dt=1e-3, t_end=5.0, monitor_period=250,
                           initial_condition="vortex-pair")
        trajectory = simulate(config)
        summary = trajectory.summary()
        assert summary["blowup_stop"] is False
        assert summary["t_final"] == 5.0
        assert summary["global_check"] == "pass"
        assert np.isfinite(summary["global_C"])
        assert summary["energy_drift"] < 1e-6
