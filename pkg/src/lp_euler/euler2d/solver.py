"""
Pseudo-spectral 2D Euler equations in vorticity form.

``d omega / dt + u . grad omega = 0`` with ``u = (d_2 psi, -d_1 psi)`` and
``-Delta psi = omega``. The velocity is divergence free by construction,
so the pressure never enters the stepping.
"""

from functools import cached_property

import numpy as np

from ..core import SpectralField, VectorField, derivative, dot_gradient
from ..errors import BlowUpError
from ..ops.multipliers import _inverse_norm_sq


__all__ = ["EulerState", "biot_savart", "rhs", "step_rk4", "integrate"]


def biot_savart(omega):
    """
    Velocity of a 2D vorticity, ``u = grad^perp (-Delta)^{-1} omega``.

    Parameters
    ----------
    omega: :class:`.SpectralField`

    Returns
    -------
    u: :class:`.VectorField`
        Divergence free; the mean of ``omega`` does not contribute.
    """
    grid = omega.grid
    if grid.d != 2:
        raise ValueError(f"Biot-Savart needs a 2D grid, got {grid!r}.")
    psi = omega.multiply(_inverse_norm_sq(grid.xi_norm_sq))
    return VectorField([derivative(psi, 1), -derivative(psi, 0)])


class EulerState:
    """
    Vorticity at one instant. The velocity is derived on first access.

    Parameters
    ----------
    t: float
    omega: :class:`.SpectralField`
    """

    def __init__(self, t, omega):
        self.t = float(t)
        self.omega = omega

    @cached_property
    def u(self):
        return biot_savart(self.omega)

    @property
    def grid(self):
        return self.omega.grid

    def __repr__(self):
        return f"EulerState(t={self.t}, omega={self.omega!r})"


def rhs(omega, dealias=True):
    """
    Time derivative ``-u . grad omega`` of the vorticity.

    The mean of the result is set to zero, which it is analytically, so
    the mean vorticity is conserved exactly.

    Parameters
    ----------
    omega: :class:`.SpectralField`
    dealias: bool, optional
        Form the transport term with the 2/3 rule.

    Returns
    -------
    domega: :class:`.SpectralField`
    """
    u = biot_savart(omega)
    return (-dot_gradient(u, omega, dealias=dealias)).without_mean()


def _checked(coeffs, grid):
    if not np.all(np.isfinite(coeffs)):
        raise BlowUpError()
    return SpectralField(grid, coeffs)


def step_rk4(state, dt, dealias=True):
    """
    One classical fourth order Runge-Kutta step.

    Parameters
    ----------
    state: :class:`.EulerState`
    dt: float
        Step size; 0 returns ``state`` unchanged.
    dealias: bool, optional

    Returns
    -------
    state: :class:`.EulerState`

    Raises
    ------
    BlowUpError
        If a stage produces non-finite coefficients.
    """
    if dt == 0.0:
        return state
    grid = state.grid
    w = state.omega.coeffs

    def stage(coeffs):
        return rhs(_checked(coeffs, grid), dealias=dealias).coeffs

    k1 = stage(w)
    k2 = stage(w + 0.5 * dt * k1)
    k3 = stage(w + 0.5 * dt * k2)
    k4 = stage(w + dt * k3)
    new = w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return EulerState(state.t + dt, _checked(new, grid))


def integrate(omega, t_end, dt, dealias=True):
    """
    Advance ``omega`` from 0 to ``t_end`` with steps of ``dt`` (the last
    one shortened to land on ``t_end``) and return the final vorticity.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}.")
    state = EulerState(0.0, omega)
    n_steps = int(np.ceil(t_end / dt - 1e-9))
    for step in range(n_steps):
        h = min(dt, t_end - step * dt)
        state = step_rk4(state, h, dealias=dealias)
    return state.omega
