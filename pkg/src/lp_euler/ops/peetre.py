"""
Peetre-type maximal functions of band-limited fields.

For ``u`` with frequencies in ``|xi| <= c t`` the Peetre maximal function

    u*(x) = sup_z |u(x - z)| / (1 + t |z|)^{d/r}

is controlled pointwise by ``M(|u|^r)(x)^{1/r}``, and its gradient analogue
``sup_z t^{-1} |grad u(x - z)| / (1 + t |z|)^{d/r}`` by ``u*`` itself.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import logging

import numpy as np

from ..core import modulus, jacobian_modulus, VectorField
from ..errors import SupportError
from .maximal import maximal


__all__ = ["PeetreReport", "peetre_maximal", "peetre_ratio", "support_radius"]

logger = logging.getLogger(__name__)

# Coefficients below this fraction of the largest one count as absent.
SUPPORT_RTOL = 1e-12

_CHECK_EVERY = 8


@lru_cache(maxsize=8)
def _sorted_offsets(grid):
    """Lattice offsets and their periodic lengths, by increasing length."""
    mesh = np.meshgrid(
        *[np.ravel(k) for k in grid.indices], indexing="ij"
    )
    offsets = np.stack([np.ravel(m) for m in mesh], axis=1)
    lengths = np.sqrt(np.sum(offsets.astype(float) ** 2, axis=1)) * grid.dx
    order = np.argsort(lengths, kind="stable")
    offsets = offsets[order]
    lengths = lengths[order]
    offsets.flags.writeable = False
    lengths.flags.writeable = False
    return offsets, lengths


def peetre_maximal(values, grid, t, r):
    """
    Exact lattice value of ``sup_z values(x - z) / (1 + t |z|)^{d/r}``.

    Offsets are scanned by increasing ``|z|``. The scan stops once the
    weight times ``max(values)`` cannot raise the smallest running value
    anywhere.

    Parameters
    ----------
    values: numpy.ndarray
        Nonnegative lattice array, typically ``|u|``.
    grid: :class:`.Grid`
    t: float
        Frequency scale, positive.
    r: float
        Exponent in ``(0, inf)``; the weight decays like ``|z|^{-d/r}``.

    Returns
    -------
    sup: numpy.ndarray
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}.")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}.")
    values = np.asarray(values, dtype=float)
    if np.any(values < 0):
        raise ValueError("peetre_maximal expects nonnegative values.")
    exponent = grid.d / r
    top = float(np.max(values))
    result = values.copy()
    axes = tuple(range(grid.d))
    offsets, lengths = _sorted_offsets(grid)
    scanned = 0
    for count, (offset, length) in enumerate(zip(offsets, lengths)):
        if length == 0.0:
            continue
        weight = (1.0 + t * length) ** (-exponent)
        if count % _CHECK_EVERY == 0 and weight * top <= result.min():
            break
        shifted = np.roll(values, tuple(int(o) for o in offset), axis=axes)
        np.maximum(result, weight * shifted, out=result)
        scanned += 1
    logger.debug("Peetre scan used %d of %d offsets", scanned, len(offsets))
    return result


def support_radius(f, rtol=SUPPORT_RTOL):
    """
    Largest ``|xi|`` carrying a coefficient above ``rtol`` times the largest
    amplitude; 0 for the zero field.
    """
    components = f if isinstance(f, VectorField) else [f]
    radius = 0.0
    for comp in components:
        scale = comp.max_amplitude()
        if scale == 0.0:
            continue
        present = np.abs(comp.coeffs) > rtol * scale
        radius = max(radius, float(np.max(comp.grid.xi_norm[present])))
    return radius


@dataclass(frozen=True)
class PeetreReport:
    """
    Pointwise comparison of a Peetre maximal function with the
    Hardy-Littlewood bound.

    Attributes
    ----------
    t, r: float
        Parameters of the comparison.
    ratio: float or None
        ``max_x u*(x) / M(|u|^r)(x)^{1/r}``. ``None`` for the zero field.
    gradient_ratio: float or None
        ``max_x`` of the gradient Peetre function over ``u*``.
    lhs, rhs: float or None
        Both sides at the point realising ``ratio``.
    peetre: numpy.ndarray
        The Peetre maximal function of ``|u|`` on the lattice.
    quotient: numpy.ndarray
        Its pointwise ratio to ``M(|u|^r)^{1/r}``, 0 where that vanishes.
        The value at a maximiser of ``|u|`` is 1, since both sides reduce
        to ``max |u|`` there.
    """

    t: float
    r: float
    ratio: float = None
    gradient_ratio: float = None
    lhs: float = None
    rhs: float = None
    peetre: np.ndarray = field(default=None, repr=False, compare=False)
    quotient: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def empty(self):
        return self.ratio is None


def _pointwise_max_ratio(num, den):
    quotient = np.zeros_like(num)
    mask = den > 0.0
    quotient[mask] = num[mask] / den[mask]
    if not np.any(mask):
        return None, None, None, quotient
    index = np.unravel_index(np.argmax(quotient), quotient.shape)
    return (
        float(quotient[index]), float(num[index]), float(den[index]),
        quotient,
    )


def peetre_ratio(u, t, r=0.5, c=1.0, cfg=None):
    """
    Compare ``sup_z |u(x-z)| / (1 + t|z|)^{d/r}`` with
    ``M(|u|^r)(x)^{1/r}`` on the lattice, together with the gradient variant.

    Parameters
    ----------
    u: :class:`.SpectralField` or :class:`.VectorField`
        Field with frequencies in ``|xi| <= c t``.
    t: float
        Bandwidth.
    r: float, optional
        Exponent, default 1/2.
    c: float, optional
        Support constant, default 1.
    cfg: :class:`.MaximalConfig`, optional

    Returns
    -------
    report: :class:`.PeetreReport`

    Raises
    ------
    SupportError
        If ``u`` has frequencies beyond ``c t``.
    """
    if u.is_zero():
        return PeetreReport(float(t), float(r))
    radius = support_radius(u)
    if radius > c * t * (1.0 + 1e-12):
        raise SupportError(
            f"Frequency support reaches |xi| = {radius:.6g}, beyond "
            f"c t = {c * t:.6g}."
        )
    grid = u.grid
    absu = modulus(u)
    lhs = peetre_maximal(absu, grid, t, r)
    rhs = maximal(absu**r, grid, cfg) ** (1.0 / r)
    ratio, lhs_at, rhs_at, quotient = _pointwise_max_ratio(lhs, rhs)
    grad = peetre_maximal(jacobian_modulus(u) / t, grid, t, r)
    gradient_ratio = _pointwise_max_ratio(grad, lhs)[0]
    return PeetreReport(
        float(t), float(r), ratio, gradient_ratio, lhs_at, rhs_at, lhs,
        quotient,
    )
