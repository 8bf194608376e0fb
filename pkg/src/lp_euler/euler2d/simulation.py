"""Time loop of the 2D Euler solver and its temporal order check."""

import logging
import warnings

import numpy as np

from ..core import modulus
from ..errors import BlowUpError
from .solver import EulerState, integrate, step_rk4
from .trajectory import EulerTrajectory, measure


__all__ = ["simulate", "cfl_number", "richardson_order"]

logger = logging.getLogger(__name__)

# Largest accepted dt ||u_0||_inf / dx.
CFL_LIMIT = 0.5

# CFL numbers above this fraction of the limit are warned about.
CFL_WARN_FRACTION = 0.8

# Growth of ||omega||_inf that stops a run.
BLOWUP_FACTOR = 1e6


def cfl_number(u, dt):
    """``dt ||u||_inf / dx`` for a velocity ``u``."""
    return dt * float(np.max(modulus(u))) / u.grid.dx


def _linf(field):
    return float(np.max(np.abs(field.samples())))


def simulate(config):
    """
    Run the Euler solver described by ``config``.

    Diagnostics are recorded at ``t = 0``, every ``monitor_period`` steps
    and at the final step. The run stops early when a stage produces
    non-finite values or ``||omega||_inf`` exceeds ``10^6`` times its
    initial value; the trajectory is then marked stopped and keeps every
    sample recorded before the stop.

    Parameters
    ----------
    config: :class:`.SimConfig`

    Returns
    -------
    trajectory: :class:`.EulerTrajectory`
        ``final_state`` holds the last computed state.

    Raises
    ------
    ValueError
        If ``dt ||u_0||_inf / dx > 0.5``.
    """
    omega0 = config.initial_vorticity()
    state = EulerState(0.0, omega0)
    cfl = cfl_number(state.u, config.dt)
    if cfl > CFL_LIMIT:
        raise ValueError(
            f"CFL number {cfl:.3g} exceeds {CFL_LIMIT}; reduce dt."
        )
    if cfl > CFL_WARN_FRACTION * CFL_LIMIT:
        warnings.warn(f"CFL number {cfl:.3g} is close to {CFL_LIMIT}.")

    trajectory = EulerTrajectory(s=config.s, C0=config.C0)
    trajectory.append(measure(state, config.s))
    limit = BLOWUP_FACTOR * _linf(omega0)
    n_steps = config.n_steps
    logger.info(
        "Simulating %r for %d steps (CFL %.3g)", config, n_steps, cfl
    )
    for step in range(1, n_steps + 1):
        t = config.time_at(step)
        try:
            state = step_rk4(state, t - state.t, dealias=config.dealias)
        except BlowUpError as err:
            trajectory.stop(str(err))
            break
        state = EulerState(t, state.omega)
        if _linf(state.omega) > limit:
            trajectory.stop(
                f"vorticity grew beyond {BLOWUP_FACTOR:g} times its initial "
                "maximum"
            )
            break
        if step % config.monitor_period == 0 or step == n_steps:
            trajectory.append(measure(state, config.s))
    trajectory.final_state = state
    logger.info(
        "Finished at t=%s with %d samples", state.t, len(trajectory)
    )
    return trajectory


def richardson_order(omega0, t_end, dt, dealias=True):
    """
    Observed temporal order of the RK4 stepping.

    Runs to ``t_end`` with steps ``dt`` and ``dt/2`` and compares both with
    a ``dt/4`` reference.

    Returns
    -------
    order: float
        ``log2(e(dt) / e(dt/2))`` for the sup-norm errors ``e``.

    Raises
    ------
    ValueError
        If an error vanishes, i.e. ``dt`` is too small to resolve the
        temporal error above rounding.
    """
    finals = [
        integrate(omega0, t_end, h, dealias=dealias)
        for h in (dt, dt / 2.0, dt / 4.0)
    ]
    reference = finals[-1]
    errors = [_linf(f - reference) for f in finals[:2]]
    if min(errors) == 0.0:
        raise ValueError(
            "The temporal error is below rounding; increase dt or t_end."
        )
    order = float(np.log2(errors[0] / errors[1]))
    logger.info("Richardson errors %s, order %.3f", errors, order)
    return order
