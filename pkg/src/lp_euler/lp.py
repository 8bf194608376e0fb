"""
Littlewood-Paley blocks on the periodic lattice.

The radial cutoff ``chi`` equals 1 on ``|xi| <= 3/4`` and 0 on ``|xi| >= 1``
with a smooth ``exp(-1/t)`` transition. The band symbols are
``h_j(xi) = chi(2^{-j-1} xi) - chi(2^{-j} xi)``, and

* ``Delta_j`` multiplies by ``h_j`` for ``j >= 0``, by ``chi`` for ``j = -1``
  and is zero for ``j <= -2`` (inhomogeneous calculus);
* the homogeneous ``dot Delta_j`` multiplies by ``h_j`` for every ``j``;
* ``S_k`` multiplies by ``chi(2^{-k-1} xi)``, the telescoped sum of the
  blocks up to ``k``.

All blocks act by exact symbol multiplication, so the partition of unity and
the annulus supports hold on the lattice up to rounding.
"""

import math
from functools import lru_cache

import numpy as np

from .core import SpectralField, VectorField


__all__ = [
    "BumpProfile",
    "DyadicDecomposition",
    "make_profile",
    "band_symbol",
    "low_symbol",
    "band_range",
    "block_symbol",
    "delta_j",
    "partial_sum",
    "decompose",
]


def _theta(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def _gluing(t):
    """Smooth step, 0 for ``t <= 0`` and 1 for ``t >= 1``."""
    a = _theta(t)
    b = _theta(1.0 - t)
    return a / (a + b)


class BumpProfile:
    """
    Smooth nonnegative radial cutoff ``chi`` with a transition on
    ``[inner, outer]``.

    Parameters
    ----------
    inner: float, optional
        ``chi = 1`` for ``r <= inner``. Default 3/4.
    outer: float, optional
        ``chi = 0`` for ``r >= outer``. Default 1.

    Notes
    -----
    ``outer / 2 < inner`` is required, otherwise blocks two indices apart
    would overlap.
    """

    witness = "chi(r) = g((outer - r) / (outer - inner)), " \
        "g(t) = theta(t) / (theta(t) + theta(1 - t)), theta(t) = exp(-1/t)"

    def __init__(self, inner=0.75, outer=1.0):
        inner = float(inner)
        outer = float(outer)
        if not 0.0 < outer <= 1.0:
            raise ValueError("outer must lie in (0, 1].")
        if not outer / 2.0 < inner < outer:
            raise ValueError("Expected outer / 2 < inner < outer.")
        self._inner = inner
        self._outer = outer

    @property
    def transition(self):
        return (self._inner, self._outer)

    def chi(self, r):
        """Evaluate ``chi`` at radii ``r`` (scalar or array)."""
        r = np.abs(np.asarray(r, dtype=float))
        t = (self._outer - r) / (self._outer - self._inner)
        out = np.where(
            r <= self._inner,
            1.0,
            np.where(r >= self._outer, 0.0, _gluing(np.clip(t, 0.0, 1.0))),
        )
        return out if out.ndim else float(out)

    def band_symbol(self, j, xi):
        """``h_j(xi)``, supported in ``inner 2^j <= |xi| <= outer 2^{j+1}``."""
        scaled = np.abs(np.asarray(xi, dtype=float)) * 2.0 ** (-j)
        out = np.asarray(self.chi(0.5 * scaled)) - np.asarray(
            self.chi(scaled)
        )
        return out if out.ndim else float(out)

    def low_symbol(self, k, xi):
        """``chi(2^{-k-1} xi)``, the symbol of the partial sum ``S_k``."""
        scaled = np.abs(np.asarray(xi, dtype=float)) * 2.0 ** (-k - 1)
        return self.chi(scaled)

    def band_support(self, j):
        """Radii ``(low, high)`` outside of which ``h_j`` vanishes."""
        return (self._inner * 2.0**j, self._outer * 2.0 ** (j + 1))

    def __eq__(self, other):
        if not isinstance(other, BumpProfile):
            return NotImplemented
        return self.transition == other.transition

    def __hash__(self):
        return hash(self.transition)

    def __repr__(self):
        return f"BumpProfile(inner={self._inner}, outer={self._outer})"


_CANONICAL = BumpProfile()


def make_profile():
    """The canonical profile with transition on ``[3/4, 1]``."""
    return _CANONICAL


def band_symbol(profile, j, xi):
    """Value of ``h_j`` at physical frequency ``xi`` (radius or array)."""
    return profile.band_symbol(j, xi)


def low_symbol(profile, k, xi):
    """Value of ``chi(2^{-k-1} xi)`` at physical frequency ``xi``."""
    return profile.low_symbol(k, xi)


def band_range(grid, homogeneous=False):
    """
    Band indices resolved on ``grid``.

    ``j_max = ceil(log2(n / (2L))) + 1``. The lowest band is ``-1`` in the
    inhomogeneous calculus and ``floor(log2(1/L)) - 1`` in the homogeneous
    one, the first band reaching the smallest nonzero lattice frequency.
    Every block outside the range is identically zero on the lattice.

    Returns
    -------
    (j_min, j_max): tuple of int
    """
    j_max = int(math.ceil(math.log2(grid.nyquist))) + 1
    if homogeneous:
        j_min = int(math.floor(math.log2(1.0 / grid.L))) - 1
    else:
        j_min = -1
    return j_min, j_max


def _readonly(array):
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@lru_cache(maxsize=256)
def _block_symbol(grid, profile, j, homogeneous):
    if not homogeneous and j == -1:
        return _readonly(profile.low_symbol(-1, grid.xi_norm))
    return _readonly(profile.band_symbol(j, grid.xi_norm))


@lru_cache(maxsize=256)
def _partial_symbol(grid, profile, k, homogeneous):
    if not homogeneous and k <= -2:
        return _readonly(np.zeros(grid.shape))
    return _readonly(profile.low_symbol(k, grid.xi_norm))


def block_symbol(grid, j, homogeneous=False, profile=None):
    """Lattice array of the multiplier of ``Delta_j`` (or ``dot Delta_j``)."""
    profile = make_profile() if profile is None else profile
    j_min, j_max = band_range(grid, homogeneous)
    if (not homogeneous and j <= -2) or j < j_min or j > j_max:
        return _readonly(np.zeros(grid.shape))
    return _block_symbol(grid, profile, int(j), bool(homogeneous))


def _apply(field, symbol):
    if isinstance(field, VectorField):
        return field.map(lambda c: c.multiply(symbol))
    return field.multiply(symbol)


def delta_j(f, j, homogeneous=False, profile=None, full_output=False):
    """
    Littlewood-Paley block ``Delta_j f`` (or ``dot Delta_j f``).

    Parameters
    ----------
    f: :class:`.SpectralField` or :class:`.VectorField`
        Input field; vector fields are handled componentwise.
    j: int
        Band index.
    homogeneous: bool, optional
        Use the homogeneous blocks.
    profile: :class:`.BumpProfile`, optional
        Defaults to the canonical profile.
    full_output: bool, optional
        Also return whether ``j`` fell outside the resolved range.

    Returns
    -------
    block: :class:`.SpectralField` or :class:`.VectorField`
    truncated: bool
        Only if ``full_output``. ``True`` when ``j`` is outside the band
        range of the grid and the zero field was returned. ``j <= -2`` in the
        inhomogeneous calculus is zero by definition, not by truncation.
    """
    j = int(j)
    j_min, j_max = band_range(f.grid, homogeneous)
    truncated = j > j_max or (homogeneous and j < j_min)
    block = _apply(f, block_symbol(f.grid, j, homogeneous, profile))
    if full_output:
        return block, truncated
    return block


def partial_sum(f, k, homogeneous=False, profile=None):
    """
    Low-pass ``S_k f``, the sum of the blocks with index at most ``k``.

    Evaluated through the telescoped symbol ``chi(2^{-k-1} xi)``. In the
    homogeneous calculus the mean mode passes through (``chi(0) = 1``),
    which is the lattice counterpart of working modulo polynomials. In the
    inhomogeneous calculus ``S_k = 0`` for ``k <= -2``.
    """
    profile = make_profile() if profile is None else profile
    symbol = _partial_symbol(f.grid, profile, int(k), bool(homogeneous))
    return _apply(f, symbol)


def _zero_like(f):
    if isinstance(f, VectorField):
        return VectorField.zeros(f.grid)
    return SpectralField.zeros(f.grid, kind=f.kind)


def _max_abs(field):
    if isinstance(field, VectorField):
        return max(float(np.max(np.abs(c.samples()))) for c in field)
    return float(np.max(np.abs(field.samples())))


class DyadicDecomposition:
    """
    The family ``j -> Delta_j f`` over the resolved band range.

    Parameters
    ----------
    profile: :class:`.BumpProfile`
    homogeneous: bool
    bands: dict
        Band index to block.
    j_min, j_max: int
        Resolved band range.
    target: :class:`.SpectralField` or :class:`.VectorField`
        The field the bands sum to: ``f`` itself, or ``f`` without its mean
        in the homogeneous calculus.

    Attributes
    ----------
    reconstruction_error: float
        ``max |sum_j Delta_j f - target| / max |target|`` over the lattice
        samples (0 for the zero field).
    """

    def __init__(self, profile, homogeneous, bands, j_min, j_max, target):
        self.profile = profile
        self.homogeneous = bool(homogeneous)
        self.bands = dict(bands)
        self.j_min = int(j_min)
        self.j_max = int(j_max)
        self.target = target
        scale = _max_abs(target)
        if scale == 0.0:
            self.reconstruction_error = 0.0
        else:
            residual = self.reconstruct() - target
            self.reconstruction_error = _max_abs(residual) / scale

    @property
    def grid(self):
        return self.target.grid

    @property
    def indices(self):
        return list(range(self.j_min, self.j_max + 1))

    def __getitem__(self, j):
        if j in self.bands:
            return self.bands[j]
        return _zero_like(self.target)

    def __iter__(self):
        return iter(self.bands.items())

    def __len__(self):
        return len(self.bands)

    def reconstruct(self):
        """Sum of all bands."""
        total = _zero_like(self.target)
        for _, band in self:
            total = total + band
        return total

    def nonzero_bands(self, rtol=1e-12):
        """Band indices whose largest amplitude exceeds ``rtol`` times the
        largest amplitude of the target."""
        scale = self.target.max_amplitude()
        if scale == 0.0:
            return []
        return [
            j
            for j, band in self
            if band.max_amplitude() > rtol * scale
        ]


def decompose(f, homogeneous=False, profile=None):
    """
    Littlewood-Paley decomposition of ``f`` over the resolved bands.

    Parameters
    ----------
    f: :class:`.SpectralField` or :class:`.VectorField`
    homogeneous: bool, optional
        Homogeneous blocks; the bands then sum to ``f`` minus its mean.
    profile: :class:`.BumpProfile`, optional

    Returns
    -------
    decomposition: :class:`.DyadicDecomposition`

    Raises
    ------
    RuntimeError
        If the bands fail to reconstruct the target to ``1e-10``.
    """
    profile = make_profile() if profile is None else profile
    j_min, j_max = band_range(f.grid, homogeneous)
    bands = {
        j: delta_j(f, j, homogeneous=homogeneous, profile=profile)
        for j in range(j_min, j_max + 1)
    }
    if homogeneous:
        if isinstance(f, VectorField):
            target = f.map(lambda c: c.without_mean())
        else:
            target = f.without_mean()
    else:
        target = f
    decomposition = DyadicDecomposition(
        profile, homogeneous, bands, j_min, j_max, target
    )
    if decomposition.reconstruction_error > 1e-10:
        raise RuntimeError(
            "Partition of unity violated: reconstruction error "
            f"{decomposition.reconstruction_error:.3e}."
        )
    return decomposition
