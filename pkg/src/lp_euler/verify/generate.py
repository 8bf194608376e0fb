"""
Random band-limited test fields.

Amplitudes are complex normal draws on the fixed integer box
``|k_i| <= K`` with ``K = min(floor(2^{j_hi+1} L), cutoff, n/2 - 1)``,
symmetrized to be conjugate symmetric and weighted by
``sum_{j=j_lo}^{j_hi} 2^{-alpha j} h_j(xi)``. The draw order only depends on
``K``, so a seed describes the same function on every grid that resolves
the box.
"""

from dataclasses import dataclass, replace
import math
import numbers

import numpy as np

from ..core import SpectralField, VectorField
from ..errors import SupportError
from ..lp import make_profile
from ..ops import leray


__all__ = ["FieldGenSpec", "generate", "top_band", "trial_rng"]

_KINDS = ("scalar", "vector", "divergence_free")


@dataclass(frozen=True)
class FieldGenSpec:
    """
    Description of a random field ensemble.

    Parameters
    ----------
    seed: int
        Master seed, 0 <= seed < 2**64.
    band_range: tuple of int
        ``(j_lo, j_hi)`` with ``-1 <= j_lo <= j_hi``.
    spectrum_slope: float
        Decay exponent ``alpha``; band ``j`` carries weight ``2^{-alpha j}``.
    kind: str
        ``"scalar"``, ``"vector"`` or ``"divergence_free"``.
    amplitude: float
        Overall factor; 0 gives the zero ensemble.
    cutoff: int, optional
        Cap on the integer box half-width ``K``.
    mean_free: bool
        Drop the mean mode (only relevant when ``j_lo = -1``).
    """

    seed: int = 0
    band_range: tuple = (0, 3)
    spectrum_slope: float = 3.5
    kind: str = "scalar"
    amplitude: float = 1.0
    cutoff: int = None
    mean_free: bool = False

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(
            self.seed, (int, np.integer)
        ):
            raise TypeError("seed must be an integer.")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer.")
        if len(self.band_range) != 2:
            raise ValueError("band_range must be a pair (j_lo, j_hi).")
        j_lo, j_hi = (int(j) for j in self.band_range)
        if j_lo < -1 or j_hi < j_lo:
            raise ValueError(
                f"Invalid band range {self.band_range}, "
                "expected -1 <= j_lo <= j_hi."
            )
        object.__setattr__(self, "band_range", (j_lo, j_hi))
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}.")
        if not isinstance(self.amplitude, numbers.Real):
            raise TypeError("amplitude must be a real number.")
        if not np.isfinite(self.spectrum_slope):
            raise ValueError("spectrum_slope must be finite.")
        if self.cutoff is not None and self.cutoff < 1:
            raise ValueError("cutoff must be a positive integer.")

    @classmethod
    def default(cls, grid, s=None, seed=0, kind="scalar"):
        """
        Ensemble with bands ``[0, top_band(grid)]`` and slope ``s + 1/2``,
        where ``s`` defaults to ``d + 1``.
        """
        s = grid.d + 1 if s is None else s
        return cls(
            seed=seed,
            band_range=(0, top_band(grid)),
            spectrum_slope=s + 0.5,
            kind=kind,
        )

    def with_kind(self, kind):
        return replace(self, kind=kind)

    def box_width(self, grid):
        """Half-width ``K`` of the integer box the amplitudes live on."""
        _, j_hi = self.band_range
        width = min(
            int(math.floor(2.0 ** (j_hi + 1) * grid.L)), grid.n // 2 - 1
        )
        if self.cutoff is not None:
            width = min(width, int(self.cutoff))
        return width

    def to_dict(self):
        return {
            "seed": int(self.seed),
            "band_range": list(self.band_range),
            "spectrum_slope": float(self.spectrum_slope),
            "kind": self.kind,
            "amplitude": float(self.amplitude),
            "cutoff": self.cutoff,
            "mean_free": self.mean_free,
        }


def top_band(grid):
    """
    Highest band ``j`` whose outer annulus edge ``2^{j+1}`` does not exceed
    the Nyquist frequency of ``grid``.
    """
    return int(math.floor(math.log2(grid.nyquist))) - 1


def trial_rng(seed, trial=None, stream=0):
    """
    Generator for one field of one trial. Seeds follow
    ``SeedSequence(seed).spawn``, so they only depend on the master seed and
    the indices, never on the order trials run in.
    """
    if trial is None:
        sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    else:
        sequence = np.random.SeedSequence(seed, spawn_key=(trial, stream))
    return np.random.default_rng(sequence)


def _band_weight(spec, xi_norm):
    profile = make_profile()
    j_lo, j_hi = spec.band_range
    weight = np.zeros_like(xi_norm)
    for j in range(j_lo, j_hi + 1):
        if j == -1:
            symbol = profile.low_symbol(-1, xi_norm)
        else:
            symbol = profile.band_symbol(j, xi_norm)
        weight = weight + 2.0 ** (-spec.spectrum_slope * j) * symbol
    return weight


def _draw_scalar(rng, spec, grid, width):
    shape = (2 * width + 1,) * grid.d
    draw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    axes = tuple(range(grid.d))
    draw = 0.5 * (draw + np.conj(np.flip(draw, axis=axes)))
    m = np.arange(-width, width + 1)
    mesh = np.meshgrid(*([m] * grid.d), indexing="ij")
    xi_norm = np.sqrt(sum(a.astype(float) ** 2 for a in mesh)) / grid.L
    values = spec.amplitude * draw * _band_weight(spec, xi_norm)
    if spec.mean_free:
        values[(width,) * grid.d] = 0.0
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[np.ix_(*([m % grid.n] * grid.d))] = values
    return coeffs


def generate(spec, grid, trial=None, stream=0):
    """
    Draw a field of the ensemble ``spec`` on ``grid``.

    Parameters
    ----------
    spec: :class:`.FieldGenSpec`
    grid: :class:`.Grid`
    trial: int, optional
        Trial index; fields of different trials are independent.
    stream: int, optional
        Index of the field within a trial, for estimates with several
        inputs.

    Returns
    -------
    field: :class:`.SpectralField` or :class:`.VectorField`
        Real, band-limited to ``spec.band_range``. Divergence free fields
        are projected by :func:`.leray`.

    Raises
    ------
    SupportError
        If the top band reaches beyond the Nyquist frequency of ``grid``.
    """
    _, j_hi = spec.band_range
    if j_hi > top_band(grid):
        raise SupportError(
            f"Band {j_hi} reaches |xi| = {2.0 ** (j_hi + 1):g}, beyond the "
            f"Nyquist frequency of {grid!r}."
        )
    width = spec.box_width(grid)
    rng = trial_rng(spec.seed, trial, stream)
    if spec.kind == "scalar":
        return SpectralField(grid, _draw_scalar(rng, spec, grid, width))
    u = VectorField(
        [
            SpectralField(grid, _draw_scalar(rng, spec, grid, width))
            for _ in range(grid.d)
        ]
    )
    if spec.kind == "divergence_free":
        u = leray(u)
    return u
