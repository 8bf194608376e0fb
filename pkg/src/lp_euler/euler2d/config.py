"""Run configuration of the 2D Euler solver."""

import math
import numbers
import warnings

import numpy as np

from ..core import Grid, SpectralField
from .presets import PRESETS, preset


__all__ = ["SimConfig"]

# Relative mean tolerated in a supplied initial vorticity.
MEAN_TOL = 1e-12


class SimConfig:
    """
    Parameters of one Euler run.

    Parameters
    ----------
    grid: :class:`.Grid`
        Two dimensional grid.
    dt: float
        Time step, positive.
    t_end: float
        Final time, non-negative. The last step is shortened when ``dt``
        does not divide ``t_end``.
    s: float, optional
        Smoothness index of the monitored ``F^s_{1,inf}`` norm. Values
        below ``d + 1 = 3`` are accepted with a warning.
    C0: float, optional
        Envelope constant. Fitted from the run when not given.
    initial_condition: str or :class:`.SpectralField`, optional
        A preset name, see :func:`.preset`, or a mean-free vorticity on
        ``grid``.
    dealias: bool, optional
        Apply the 2/3 rule to the nonlinear term.
    monitor_period: int, optional
        Steps between diagnostics samples.
    seed: int, optional
        Seed of the ``random-smooth`` preset.
    slope: float, optional
        Spectral slope of the ``random-smooth`` preset.
    """

    def __init__(
        self,
        grid,
        dt,
        t_end,
        s=3.0,
        C0=None,
        initial_condition="taylor-green",
        dealias=True,
        monitor_period=10,
        seed=0,
        slope=None,
    ):
        if not isinstance(grid, Grid):
            raise TypeError("grid must be a Grid instance.")
        if grid.d != 2:
            raise ValueError(f"The Euler solver needs d=2, got {grid!r}.")
        self.grid = grid
        if not isinstance(dt, numbers.Real) or not dt > 0.0:
            raise ValueError(f"dt must be positive, got {dt}.")
        if not isinstance(t_end, numbers.Real) or not t_end >= 0.0:
            raise ValueError(f"t_end must be non-negative, got {t_end}.")
        if not (np.isfinite(dt) and np.isfinite(t_end)):
            raise ValueError("dt and t_end must be finite.")
        self.dt = float(dt)
        self.t_end = float(t_end)
        if not np.isfinite(s):
            raise ValueError("s must be finite.")
        if s < grid.d + 1:
            warnings.warn(
                f"s={s} is below d+1={grid.d + 1}; the persistence "
                "estimate is not guaranteed."
            )
        self.s = float(s)
        if C0 is not None and not C0 > 0.0:
            raise ValueError(f"C0 must be positive, got {C0}.")
        self.C0 = None if C0 is None else float(C0)
        if isinstance(initial_condition, str):
            if initial_condition not in PRESETS:
                raise ValueError(
                    f"Unknown preset {initial_condition!r}, expected one "
                    f"of {PRESETS}."
                )
        elif isinstance(initial_condition, SpectralField):
            if initial_condition.grid != grid:
                raise ValueError(
                    "The initial vorticity lives on "
                    f"{initial_condition.grid!r}, expected {grid!r}."
                )
            scale = initial_condition.max_amplitude()
            if abs(initial_condition.mean) > MEAN_TOL * scale:
                raise ValueError("The initial vorticity must be mean free.")
        else:
            raise TypeError(
                "initial_condition must be a preset name or a SpectralField."
            )
        self.initial_condition = initial_condition
        self.dealias = bool(dealias)
        if (
            isinstance(monitor_period, bool)
            or not isinstance(monitor_period, (int, np.integer))
            or monitor_period < 1
        ):
            raise ValueError("monitor_period must be a positive integer.")
        self.monitor_period = int(monitor_period)
        self.seed = seed
        self.slope = slope

    @property
    def n_steps(self):
        """Number of time steps, 0 for ``t_end = 0``."""
        return int(math.ceil(self.t_end / self.dt - 1e-9))

    def time_at(self, step):
        """Time after ``step`` steps; the last step lands on ``t_end``."""
        if step >= self.n_steps:
            return self.t_end
        return step * self.dt

    def initial_vorticity(self):
        if isinstance(self.initial_condition, SpectralField):
            return self.initial_condition
        return preset(
            self.initial_condition, self.grid, seed=self.seed, slope=self.slope
        )

    def to_dict(self):
        if isinstance(self.initial_condition, str):
            initial = self.initial_condition
        else:
            initial = "field"
        return {
            "grid": self.grid.to_dict(),
            "dt": self.dt,
            "t_end": self.t_end,
            "s": self.s,
            "C0": self.C0,
            "initial_condition": initial,
            "dealias": self.dealias,
            "monitor_period": self.monitor_period,
            "seed": self.seed,
            "slope": self.slope,
        }

    def __repr__(self):
        return (
            f"SimConfig(grid={self.grid!r}, dt={self.dt}, "
            f"t_end={self.t_end}, s={self.s})"
        )
