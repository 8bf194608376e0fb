"""Periodic lattices standing in for the whole space."""

from functools import cached_property

import numpy as np


__all__ = ["Grid"]


def _readonly(array):
    array.flags.writeable = False
    return array


class Grid:
    """
    Uniform periodic lattice on the box ``[0, 2*pi*L)^d``.

    Physical frequencies are ``xi = k / L`` for integer multi-indices ``k``
    in FFT order. Enlarging ``L`` resolves lower frequencies, which is how
    negative dyadic bands are reached.

    Parameters
    ----------
    d: int
        Spatial dimension, 1, 2 or 3.
    n: int
        Points per axis. A power of two, at least 8.
    L: float
        Box scale. The side length is ``2*pi*L``.

    Attributes
    ----------
    dx: float
        Grid spacing ``2*pi*L/n``.
    shape: tuple of int
        Lattice shape ``(n,) * d``.
    volume: float
        Box volume ``(2*pi*L)^d``.
    nyquist: float
        Largest frequency per axis, ``n / (2 L)``.

    Examples
    --------
    >>> grid = Grid(d=2, n=64, L=1.0)
    >>> grid.shape
    (64, 64)
    """

    def __init__(self, d=2, n=64, L=1.0):
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
            raise TypeError("The dimension d must be an integer.")
        if d not in (1, 2, 3):
            raise ValueError(f"unsupported dimension d={d}, expected 1-3.")
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError("The number of points n must be an integer.")
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(
                f"n={n} is not a power of two greater than or equal to 8."
            )
        L = float(L)
        if not np.isfinite(L) or L <= 0.0:
            raise ValueError(f"The box scale L must be positive, got {L}.")
        self._d = int(d)
        self._n = int(n)
        self._L = L

    @property
    def d(self):
        return self._d

    @property
    def n(self):
        return self._n

    @property
    def L(self):
        return self._L

    @property
    def dx(self):
        return 2.0 * np.pi * self._L / self._n

    @property
    def shape(self):
        return (self._n,) * self._d

    @property
    def size(self):
        return self._n**self._d

    @property
    def volume(self):
        return (2.0 * np.pi * self._L) ** self._d

    @property
    def nyquist(self):
        return self._n / (2.0 * self._L)

    def _axis_view(self, values, axis):
        shape = [1] * self._d
        shape[axis] = self._n
        return _readonly(np.reshape(values, shape))

    @cached_property
    def indices(self):
        """
        Integer lattice indices ``k`` per axis in FFT order, each shaped to
        broadcast against a full lattice array.
        """
        k = np.fft.fftfreq(self._n, d=1.0 / self._n).round().astype(int)
        return tuple(self._axis_view(k.copy(), a) for a in range(self._d))

    @cached_property
    def xi(self):
        """Physical frequencies ``k / L`` per axis, broadcastable."""
        return tuple(
            _readonly(k.astype(float) / self._L) for k in self.indices
        )

    @cached_property
    def odd_xi(self):
        """
        Frequencies per axis with the unpaired Nyquist index set to zero.
        Odd symbols such as ``i xi_k`` use these so real fields stay real.
        """
        out = []
        for k, xi in zip(self.indices, self.xi):
            out.append(_readonly(np.where(2 * k == -self._n, 0.0, xi)))
        return tuple(out)

    @cached_property
    def xi_norm(self):
        """Full lattice array of ``|xi|``."""
        sq = np.zeros(self.shape)
        for xi in self.xi:
            sq = sq + xi**2
        return _readonly(np.sqrt(sq))

    @cached_property
    def xi_norm_sq(self):
        """Full lattice array of ``|xi|^2``."""
        return _readonly(self.xi_norm**2)

    @cached_property
    def coordinates(self):
        """Physical sample positions per axis as full lattice arrays."""
        x = np.arange(self._n) * self.dx
        return tuple(
            _readonly(a)
            for a in np.meshgrid(*([x] * self._d), indexing="ij")
        )

    @cached_property
    def periodic_distance(self):
        """
        Periodic distance between the lattice point with offset index ``m``
        and the origin, as a full lattice array.
        """
        m = np.arange(self._n)
        m = np.minimum(m, self._n - m) * self.dx
        sq = np.zeros(self.shape)
        for a in range(self._d):
            sq = sq + self._axis_view(m, a) ** 2
        return _readonly(np.sqrt(sq))

    def to_dict(self):
        return {"d": self._d, "n": self._n, "L": self._L}

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self._d, self._n, self._L) == (other._d, other._n, other._L)

    def __hash__(self):
        return hash((self._d, self._n, self._L))

    def __repr__(self):
        return f"Grid(d={self._d}, n={self._n}, L={self._L!r})"
