"""
Spectral differentiation and dealiased pointwise products.

Symbol convention: ``d/dx_k`` acts as multiplication by ``i xi_k``.
Quadratic terms follow the 2/3 rule: both factors are truncated to
``|k_i| < n/3`` before the product is formed in physical space, and the
product is truncated again. The result equals the exact product restricted
to the kept modes.
"""

from functools import lru_cache

import numpy as np
import scipy.fft

from .field import SpectralField, VectorField


__all__ = [
    "dealias_mask",
    "dealias",
    "derivative",
    "gradient",
    "divergence",
    "product",
    "dot_gradient",
    "modulus",
    "jacobian_modulus",
    "parseval_integral",
]


@lru_cache(maxsize=32)
def _dealias_mask(grid):
    mask = np.ones(grid.shape, dtype=bool)
    for k in grid.indices:
        mask = mask & (3 * np.abs(k) < grid.n)
    mask.flags.writeable = False
    return mask


def dealias_mask(grid):
    """Boolean lattice array of the modes kept by the 2/3 rule."""
    return _dealias_mask(grid)


def dealias(field):
    """Zero the upper third of the spectrum of a scalar or vector field."""
    if isinstance(field, VectorField):
        return field.map(dealias)
    return field.multiply(dealias_mask(field.grid))


def derivative(field, axis):
    """Partial derivative along ``axis`` (0-based)."""
    return field.multiply(1j * field.grid.odd_xi[axis])


def gradient(field):
    """Gradient of a scalar field as a :class:`.VectorField`."""
    return VectorField([derivative(field, a) for a in range(field.grid.d)])


def divergence(u):
    """Divergence of a vector field as a scalar field."""
    total = derivative(u[0], 0)
    for a in range(1, u.d):
        total = total + derivative(u[a], a)
    return total.as_kind("scalar")


def _dealiased_samples(field, dealias=True):
    coeffs = field.coeffs
    if dealias:
        coeffs = coeffs * dealias_mask(field.grid)
    return scipy.fft.ifftn(coeffs, norm="forward").real


def product(f, g, kind="scalar"):
    """
    Dealiased pointwise product of two real scalar fields.

    Parameters
    ----------
    f, g: :class:`.SpectralField`
        Factors on a shared grid.
    kind: str, optional
        Kind tag of the result.

    Returns
    -------
    fg: :class:`.SpectralField`
    """
    if f.grid != g.grid:
        raise ValueError("Factors live on different grids.")
    grid = f.grid
    coeffs = scipy.fft.fftn(
        _dealiased_samples(f) * _dealiased_samples(g), norm="forward"
    )
    return SpectralField(grid, coeffs * dealias_mask(grid), kind=kind)


def dot_gradient(u, f, dealias=True):
    """
    The transport term ``(u . grad) f`` for a vector field ``u`` and a
    scalar ``f``. Products follow the 2/3 rule unless ``dealias`` is off.
    """
    grid = u.grid
    total = np.zeros(grid.shape)
    for a, comp in enumerate(u):
        velocity = _dealiased_samples(comp, dealias)
        slope = _dealiased_samples(derivative(f, a), dealias)
        total = total + velocity * slope
    coeffs = scipy.fft.fftn(total, norm="forward")
    if dealias:
        coeffs = coeffs * dealias_mask(grid)
    return SpectralField(grid, coeffs)


def modulus(field):
    """
    Pointwise modulus on the lattice: ``|f|`` for a scalar field and the
    Euclidean norm of the components for a vector field.
    """
    if isinstance(field, VectorField):
        return np.sqrt(np.sum(field.samples() ** 2, axis=0))
    return np.abs(field.samples())


def jacobian_modulus(field):
    """
    Pointwise Frobenius norm of the Jacobian of a vector field (or of the
    gradient of a scalar field).
    """
    components = field if isinstance(field, VectorField) else [field]
    sq = np.zeros(field.grid.shape)
    for comp in components:
        for a in range(field.grid.d):
            sq = sq + derivative(comp, a).samples() ** 2
    return np.sqrt(sq)


def parseval_integral(field):
    """
    ``integral |f|^2 dx`` evaluated in coefficient space; summed over the
    components of a vector field.
    """
    components = field if isinstance(field, VectorField) else [field]
    total = sum(float(np.sum(np.abs(c.coeffs) ** 2)) for c in components)
    return field.grid.volume * total
