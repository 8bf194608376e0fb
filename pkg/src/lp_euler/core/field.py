"""Spectral representation of scalar and vector fields."""

import numbers

import numpy as np
import scipy.fft

from .grid import Grid
from ..errors import ShapeError, NonRealFieldError


__all__ = [
    "SpectralField",
    "VectorField",
    "forward_transform",
    "inverse_transform",
    "lattice_integral",
    "reflect",
]

_KINDS = ("scalar", "component")

# Relative conjugate-symmetry defect tolerated by ``inverse_transform``.
NON_REAL_TOL = 1e-9


def _check_lattice_shape(array, grid):
    if array.ndim != grid.d:
        raise ShapeError(
            f"expected {grid.d} axes for {grid!r}, got {array.ndim}",
            axis=None,
        )
    for axis, length in enumerate(array.shape):
        if length != grid.n:
            raise ShapeError(
                f"axis {axis} has length {length}, expected {grid.n}",
                axis=axis,
            )


def reflect(coeffs):
    """
    Return the array ``c(-k)`` for coefficients ``c(k)`` stored in FFT
    order.
    """
    axes = tuple(range(coeffs.ndim))
    return np.roll(np.flip(coeffs, axis=axes), 1, axis=axes)


def forward_transform(samples, grid, kind="scalar"):
    """
    Fourier coefficients of real lattice samples.

    The normalization makes the pure mode ``exp(i k.x / L)`` have
    coefficient 1 at lattice index ``k``.

    Parameters
    ----------
    samples: array_like
        Real values on ``grid``, row-major.
    grid: :class:`.Grid`
        The lattice the samples live on.
    kind: str, optional
        ``"scalar"`` or ``"component"``.

    Returns
    -------
    field: :class:`.SpectralField`
    """
    samples = np.asarray(samples)
    if np.iscomplexobj(samples):
        raise TypeError("forward_transform expects real samples.")
    _check_lattice_shape(samples, grid)
    coeffs = scipy.fft.fftn(samples.astype(float), norm="forward")
    return SpectralField(grid, coeffs, kind=kind)


def inverse_transform(field):
    """
    Real lattice samples of a spectral field.

    Parameters
    ----------
    field: :class:`.SpectralField`

    Returns
    -------
    samples: numpy.ndarray
        Real array of shape ``field.grid.shape``.

    Raises
    ------
    NonRealFieldError
        If the coefficients violate conjugate symmetry by more than
        ``1e-9`` relative to the largest amplitude.
    """
    if field.symmetry_defect() > NON_REAL_TOL:
        raise NonRealFieldError()
    return scipy.fft.ifftn(field.coeffs, norm="forward").real


def lattice_integral(samples, grid):
    """
    Box quadrature ``dx^d * sum(samples)``, exact for band-limited
    integrands.
    """
    samples = np.asarray(samples)
    _check_lattice_shape(samples, grid)
    return float(grid.dx**grid.d * np.sum(samples))


class SpectralField:
    """
    A field given by its Fourier amplitudes on a periodic lattice.

    Instances are immutable. Every operation returns a new field.

    Parameters
    ----------
    grid: :class:`.Grid`
        Lattice of the field.
    coeffs: array_like
        Complex amplitudes in FFT order, shape ``grid.shape``.
    kind: str, optional
        ``"scalar"`` (default) or ``"component"`` for a component of a
        :class:`.VectorField`.
    """

    __array_priority__ = 1000

    def __init__(self, grid, coeffs, kind="scalar"):
        if not isinstance(grid, Grid):
            raise TypeError("grid must be a Grid instance.")
        if kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
        coeffs = np.array(coeffs, dtype=np.complex128)
        _check_lattice_shape(coeffs, grid)
        coeffs.flags.writeable = False
        self._grid = grid
        self._coeffs = coeffs
        self._kind = kind

    @classmethod
    def zeros(cls, grid, kind="scalar"):
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), kind)

    @classmethod
    def from_samples(cls, samples, grid, kind="scalar"):
        return forward_transform(samples, grid, kind=kind)

    @property
    def grid(self):
        return self._grid

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def kind(self):
        return self._kind

    @property
    def mean(self):
        """Amplitude of the zero frequency (the average value)."""
        return self._coeffs[(0,) * self._grid.d]

    def samples(self):
        """Real lattice samples, see :func:`inverse_transform`."""
        return inverse_transform(self)

    def max_amplitude(self):
        return float(np.max(np.abs(self._coeffs)))

    def symmetry_defect(self):
        """
        ``max |c(k) - conj(c(-k))|`` relative to the largest amplitude.
        Zero for the zero field.
        """
        scale = self.max_amplitude()
        if scale == 0.0:
            return 0.0
        diff = self._coeffs - np.conj(reflect(self._coeffs))
        return float(np.max(np.abs(diff)) / scale)

    def is_real(self, tol=1e-12):
        return self.symmetry_defect() <= tol

    def with_coeffs(self, coeffs):
        return SpectralField(self._grid, coeffs, kind=self._kind)

    def multiply(self, symbol):
        """Coefficient-wise multiplication by a Fourier symbol."""
        return self.with_coeffs(self._coeffs * symbol)

    def without_mean(self):
        coeffs = self._coeffs.copy()
        coeffs[(0,) * self._grid.d] = 0.0
        return self.with_coeffs(coeffs)

    def as_kind(self, kind):
        return SpectralField(self._grid, self._coeffs, kind=kind)

    def is_zero(self):
        return not np.any(self._coeffs)

    def _check_compatible(self, other):
        if self._grid != other.grid:
            raise ValueError(
                f"Fields live on different grids: {self._grid!r} "
                f"and {other.grid!r}."
            )

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check_compatible(other)
            return self.with_coeffs(self._coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            self._check_compatible(other)
            return self.with_coeffs(self._coeffs - other.coeffs)
        return NotImplemented

    def __neg__(self):
        return self.with_coeffs(-self._coeffs)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return self.with_coeffs(self._coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self.with_coeffs(self._coeffs / other)
        return NotImplemented

    def __repr__(self):
        return (
            f"SpectralField(grid={self._grid!r}, kind={self._kind!r}, "
            f"max_amplitude={self.max_amplitude():.3g})"
        )


class VectorField:
    """
    A vector field with one :class:`.SpectralField` per spatial direction.

    Parameters
    ----------
    components: list of :class:`.SpectralField`
        ``grid.d`` fields sharing one grid.
    """

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("A vector field needs at least one component.")
        for comp in components:
            if not isinstance(comp, SpectralField):
                raise TypeError("Vector components must be SpectralField.")
        grid = components[0].grid
        for comp in components[1:]:
            if comp.grid != grid:
                raise ValueError("All components must share one grid.")
        if len(components) != grid.d:
            raise ValueError(
                f"Expected {grid.d} components on {grid!r}, "
                f"got {len(components)}."
            )
        self._components = tuple(c.as_kind("component") for c in components)
        self._grid = grid

    @classmethod
    def zeros(cls, grid):
        return cls([SpectralField.zeros(grid)] * grid.d)

    @classmethod
    def from_samples(cls, samples, grid):
        """Build from an iterable of ``grid.d`` real lattice arrays."""
        return cls(
            [forward_transform(s, grid, kind="component") for s in samples]
        )

    @property
    def grid(self):
        return self._grid

    @property
    def components(self):
        return self._components

    @property
    def d(self):
        return self._grid.d

    def __len__(self):
        return len(self._components)

    def __iter__(self):
        return iter(self._components)

    def __getitem__(self, index):
        return self._components[index]

    @property
    def mean(self):
        return np.array([c.mean for c in self._components])

    def samples(self):
        """Real samples of shape ``(d,) + grid.shape``."""
        return np.stack([c.samples() for c in self._components])

    def max_amplitude(self):
        return max(c.max_amplitude() for c in self._components)

    def symmetry_defect(self):
        return max(c.symmetry_defect() for c in self._components)

    def is_zero(self):
        return all(c.is_zero() for c in self._components)

    def divergence_coeffs(self):
        """
        Coefficients of ``xi . u_hat(xi)`` (the divergence up to ``i``), with
        the unpaired Nyquist frequencies treated as zero.
        """
        total = np.zeros(self._grid.shape, dtype=np.complex128)
        for xi, comp in zip(self._grid.odd_xi, self._components):
            total = total + xi * comp.coeffs
        return total

    def divergence_residual(self):
        """
        ``max |xi . u_hat(xi)|`` relative to ``max |u_hat(xi)|``; zero for
        the zero field.
        """
        scale = self.max_amplitude()
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.divergence_coeffs())) / scale)

    def is_divergence_free(self, tol=1e-10):
        return self.divergence_residual() <= tol

    def map(self, func):
        """Apply ``func`` to every component and collect the results."""
        return VectorField([func(c) for c in self._components])

    def __add__(self, other):
        if isinstance(other, VectorField):
            return VectorField(
                [a + b for a, b in zip(self._components, other.components)]
            )
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, VectorField):
            return VectorField(
                [a - b for a, b in zip(self._components, other.components)]
            )
        return NotImplemented

    def __neg__(self):
        return self.map(lambda c: -c)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return self.map(lambda c: c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"VectorField(grid={self._grid!r}, d={self.d})"
