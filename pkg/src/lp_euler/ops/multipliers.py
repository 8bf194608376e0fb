"""
Homogeneous Fourier multipliers: Riesz-type ``d_k Delta^{-1}``, fractional
derivatives, the Leray projection and the Euler pressure gradient.

Symbol conventions: ``d/dx_k`` is ``i xi_k`` and ``Delta^{-1}`` is
``-1/|xi|^2``. The zero frequency of a homogeneous multiplier is 0 unless
stated otherwise. Odd symbols use frequencies with the unpaired Nyquist
index set to zero so that real fields stay real.
"""

import numpy as np

from ..core import SpectralField, VectorField, dot_gradient
from ..errors import DivergenceError, HomogeneousMultiplierError


__all__ = [
    "riesz_multiplier",
    "frac_deriv",
    "leray",
    "convective_term",
    "pressure_gradient",
]

# Relative size of the mean mode tolerated by homogeneous multipliers.
MEAN_TOL = 1e-12

# Relative divergence tolerated by ``pressure_gradient``.
DIVERGENCE_TOL = 1e-10


def _inverse_norm_sq(xi_sq):
    safe = np.where(xi_sq > 0.0, xi_sq, 1.0)
    return np.where(xi_sq > 0.0, 1.0 / safe, 0.0)


def _odd_norm_sq(grid):
    sq = np.zeros(grid.shape)
    for xi in grid.odd_xi:
        sq = sq + xi**2
    return sq


def riesz_multiplier(f, k):
    """
    Apply ``d_k Delta^{-1}``, the multiplier ``-i xi_k / |xi|^2``.

    Parameters
    ----------
    f: :class:`.SpectralField`
        Mean-free field.
    k: int
        Direction, 0-based.

    Returns
    -------
    g: :class:`.SpectralField`
        ``sum_k d_k riesz_multiplier(f, k) = f`` for mean-free ``f``
        without Nyquist content.

    Raises
    ------
    HomogeneousMultiplierError
        If the mean of ``f`` is not zero.
    """
    grid = f.grid
    if not 0 <= k < grid.d:
        raise ValueError(f"Direction {k} out of range for d={grid.d}.")
    if abs(f.mean) > MEAN_TOL * max(f.max_amplitude(), 1e-300):
        raise HomogeneousMultiplierError()
    symbol = -1j * grid.odd_xi[k] * _inverse_norm_sq(grid.xi_norm_sq)
    return f.multiply(symbol)


def frac_deriv(f, s):
    """
    Fractional derivative ``D^s = F^{-1} |xi|^s F``.

    ``s = 0`` is the identity. For ``s != 0`` the mean mode is dropped.
    Vector fields are handled componentwise.
    """
    if isinstance(f, VectorField):
        return f.map(lambda c: frac_deriv(c, s))
    s = float(s)
    if s == 0.0:
        return f
    norm = f.grid.xi_norm
    safe = np.where(norm > 0.0, norm, 1.0)
    symbol = np.where(norm > 0.0, safe**s, 0.0)
    return f.multiply(symbol)


def _gradient_part(coeffs, grid):
    """``xi (xi . c) / |xi|^2`` per component, built from odd frequencies."""
    inv = _inverse_norm_sq(_odd_norm_sq(grid))
    div = np.zeros(grid.shape, dtype=np.complex128)
    for xi, c in zip(grid.odd_xi, coeffs):
        div = div + xi * c
    return [xi * div * inv for xi in grid.odd_xi]


def leray(u):
    """
    Leray projection ``P u = u - grad Delta^{-1} div u``.

    The output is divergence free, and the mean of each component passes
    through unchanged.

    Parameters
    ----------
    u: :class:`.VectorField`

    Returns
    -------
    pu: :class:`.VectorField`
    """
    coeffs = [c.coeffs for c in u]
    correction = _gradient_part(coeffs, u.grid)
    return VectorField(
        [c.with_coeffs(c.coeffs - g) for c, g in zip(u, correction)]
    )


def convective_term(u):
    """``(u . grad) u`` with dealiased products."""
    return VectorField([dot_gradient(u, comp) for comp in u])


def pressure_gradient(u):
    """
    Pressure gradient of the incompressible Euler equations,
    ``grad p = grad (-Delta)^{-1} div((u . grad) u)``.

    With ``N = (u . grad) u`` the symbol is ``-xi (xi . N_hat) / |xi|^2``,
    so ``N + grad p = P N`` is divergence free.

    Parameters
    ----------
    u: :class:`.VectorField`
        Divergence free velocity.

    Returns
    -------
    grad_p: :class:`.VectorField`

    Raises
    ------
    DivergenceError
        If ``u`` is not divergence free to ``1e-10`` relative.
    """
    residual = u.divergence_residual()
    if residual > DIVERGENCE_TOL:
        raise DivergenceError(
            f"pressure_gradient needs a divergence-free velocity, "
            f"relative divergence is {residual:.3e}."
        )
    nonlinear = convective_term(u)
    parts = _gradient_part([c.coeffs for c in nonlinear], u.grid)
    return VectorField(
        [SpectralField(u.grid, -g, kind="component") for g in parts]
    )
