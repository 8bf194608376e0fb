"""
Initial vorticities for the 2D Euler solver.

All presets are mean free and truncated to the modes kept by the 2/3 rule,
so the dealiased dynamics never sees content it cannot evolve.
"""

import numpy as np

from ..core import SpectralField, dealias, parseval_integral
from ..verify import FieldGenSpec, generate, top_band


__all__ = ["PRESETS", "preset"]

PRESETS = ("taylor-green", "shear", "random-smooth", "vortex-pair")

# Width and peak of the two Gaussian vortices of ``vortex-pair``.
VORTEX_WIDTH = 0.5
VORTEX_PEAK = 2.0
VORTEX_SEPARATION = 1.2


def _taylor_green(grid):
    x1, x2 = grid.coordinates
    samples = 2.0 * np.sin(x1 / grid.L) * np.sin(x2 / grid.L)
    return SpectralField.from_samples(samples, grid)


def _shear(grid):
    _, x2 = grid.coordinates
    return SpectralField.from_samples(-np.cos(x2 / grid.L), grid)


def _random_smooth(grid, seed, slope):
    spec = FieldGenSpec(
        seed=seed,
        band_range=(0, min(3, top_band(grid))),
        spectrum_slope=3.5 if slope is None else slope,
        mean_free=True,
    )
    omega = dealias(generate(spec, grid))
    rms = np.sqrt(parseval_integral(omega) / grid.volume)
    if rms == 0.0:
        return omega
    return omega / rms


def _vortex_pair(grid):
    sigma = VORTEX_WIDTH * grid.L
    weight = (
        VORTEX_PEAK
        * 2.0 * np.pi * sigma**2
        / grid.volume
        * np.exp(-0.5 * sigma**2 * grid.xi_norm_sq)
    )
    xi1, xi2 = grid.xi
    centre = np.pi * grid.L
    offset = 0.5 * VORTEX_SEPARATION * grid.L
    coeffs = weight * (
        np.exp(-1j * (xi1 * (centre - offset) + xi2 * centre))
        - np.exp(-1j * (xi1 * (centre + offset) + xi2 * centre))
    )
    return SpectralField(grid, coeffs)


def preset(name, grid, seed=0, slope=None):
    """
    Named initial vorticity on a 2D grid.

    Parameters
    ----------
    name: str
        ``"taylor-green"`` (``2 sin x_1 sin x_2``), ``"shear"``
        (``-cos x_2``), ``"random-smooth"`` (bands 0 to 3, unit RMS) or
        ``"vortex-pair"`` (two opposite Gaussian vortices).
    grid: :class:`.Grid`
        Two dimensional grid.
    seed: int, optional
        Seed of ``random-smooth``.
    slope: float, optional
        Spectral slope of ``random-smooth``, 3.5 by default.

    Returns
    -------
    omega: :class:`.SpectralField`
    """
    if grid.d != 2:
        raise ValueError(f"Presets live on 2D grids, got {grid!r}.")
    if name == "taylor-green":
        omega = _taylor_green(grid)
    elif name == "shear":
        omega = _shear(grid)
    elif name == "random-smooth":
        omega = _random_smooth(grid, seed, slope)
    elif name == "vortex-pair":
        omega = _vortex_pair(grid)
    else:
        raise ValueError(
            f"Unknown preset {name!r}, expected one of {PRESETS}."
        )
    return dealias(omega).without_mean()
