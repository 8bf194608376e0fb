"""
Discrete Hardy-Littlewood maximal function on the periodic lattice.
"""

from functools import lru_cache

import numpy as np
import scipy.fft


__all__ = ["MaximalConfig", "maximal", "ball_indicator"]


class MaximalConfig:
    """
    Ball radii used by :func:`maximal`.

    Parameters
    ----------
    radii: list of float, optional
        Increasing positive radii in grid units. The default is the dyadic
        set ``1, 2, 4, ..., n/2`` and needs ``n``.
    n: int, optional
        Points per axis, used for the default radii.

    Notes
    -----
    A ball is open, ``|x - y| < rho`` in the periodic distance, so the radius
    ``1`` ball is the single cell and ``Mf >= |f|`` holds exactly.
    """

    def __init__(self, radii=None, n=None):
        if radii is None:
            if n is None:
                raise ValueError("Either radii or n is needed.")
            radii = [2.0**m for m in range(int(np.log2(n)))]
        radii = [float(r) for r in radii]
        if not radii:
            raise ValueError("At least one radius is needed.")
        if any(not np.isfinite(r) or r <= 0 for r in radii):
            raise ValueError("Radii must be positive and finite.")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("Radii must be strictly increasing.")
        if radii[0] > 1.0:
            raise ValueError(
                "The smallest radius must not exceed one grid spacing."
            )
        self.radii = tuple(radii)

    @classmethod
    def for_grid(cls, grid):
        return cls(n=grid.n)

    def __repr__(self):
        return f"MaximalConfig(radii={list(self.radii)})"


def _index_distance_sq(grid):
    sq = np.zeros(grid.shape)
    for k in grid.indices:
        sq = sq + k.astype(float) ** 2
    return sq


def ball_indicator(grid, radius):
    """Indicator of the open periodic ball ``|z| < radius`` (grid units)."""
    return _index_distance_sq(grid) < float(radius) ** 2


@lru_cache(maxsize=64)
def _ball_kernel(grid, radius):
    ball = ball_indicator(grid, radius)
    kernel = scipy.fft.fftn(ball.astype(float)) / np.count_nonzero(ball)
    kernel.flags.writeable = False
    return kernel


def maximal(samples, grid, cfg=None):
    """
    Maximal function ``Mf(x) = max_rho avg_{B(x, rho)} |f|``.

    Averages are circular convolutions with normalized ball indicators,
    evaluated by FFT. Balls of radius at most one grid spacing reduce to the
    centre cell.

    Parameters
    ----------
    samples: array_like
        Real lattice values.
    grid: :class:`.Grid`
    cfg: :class:`.MaximalConfig`, optional
        Defaults to the dyadic radii of ``grid``.

    Returns
    -------
    mf: numpy.ndarray
        Satisfies ``|f| <= Mf <= max |f|`` pointwise.
    """
    samples = np.asarray(samples)
    if np.iscomplexobj(samples):
        raise TypeError("maximal expects real samples.")
    if samples.shape != grid.shape:
        raise ValueError(
            f"Samples of shape {samples.shape} do not match {grid!r}."
        )
    cfg = MaximalConfig.for_grid(grid) if cfg is None else cfg
    absf = np.abs(samples.astype(float))
    top = float(np.max(absf)) if absf.size else 0.0
    result = absf.copy()
    spectrum = None
    for radius in cfg.radii:
        if radius <= 1.0:
            continue
        if spectrum is None:
            spectrum = scipy.fft.fftn(absf)
        average = scipy.fft.ifftn(spectrum * _ball_kernel(grid, radius)).real
        # FFT rounding can leave the admissible range by a few ulps
        average = np.clip(average, 0.0, top)
        result = np.maximum(result, average)
    return result

