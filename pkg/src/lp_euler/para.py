"""
Bony paraproduct calculus on the lattice.

With ``S_k`` and ``Delta_j`` from :mod:`lp_euler.lp`,

* ``T_f g = sum_j S_{j-4} f Delta_j g``,
* ``R(f, g) = sum_{|i-j| <= 3} Delta_i f Delta_j g``,

and ``fg = T_f g + T_g f + R(f, g)``. Every product is the dealiased
pseudo-spectral product, which is bilinear, so the decomposition is exact up
to rounding. In the homogeneous calculus ``dot S_k`` keeps the mean mode,
which makes ``dot T_c g = c g`` for constants; the homogeneous remainder then
carries the product of the two means.
"""

import logging

import numpy as np

from .core import SpectralField, product, derivative
from .errors import DivergenceError
from .lp import band_range, delta_j, partial_sum, block_symbol


__all__ = [
    "BonyDecomposition",
    "CommutatorSplit",
    "SupportDefect",
    "paraproduct",
    "remainder",
    "bony",
    "commutator",
    "commutator_split",
    "paraproduct_support_defect",
    "remainder_support_defect",
]

logger = logging.getLogger(__name__)

# Band offset between the low-pass factor and the block in ``T_f g``.
PARA_OFFSET = 4

# Largest index gap of the remainder pairs.
REMAINDER_WIDTH = 3

# Relative divergence tolerated by the commutator.
DIVERGENCE_TOL = 1e-10


def _check_pair(f, g):
    if f.grid != g.grid:
        raise ValueError(
            f"Factors live on different grids: {f.grid!r} and {g.grid!r}."
        )


def _bands(grid, homogeneous):
    j_min, j_max = band_range(grid, homogeneous)
    return range(j_min, j_max + 1)


def paraproduct(f, g, homogeneous=False):
    """
    Paraproduct ``T_f g = sum_j S_{j-4} f Delta_j g`` over the resolved
    bands.

    Parameters
    ----------
    f, g: :class:`.SpectralField`
        Real scalar fields on one grid.
    homogeneous: bool, optional
        Use ``dot S`` and ``dot Delta``.

    Returns
    -------
    tfg: :class:`.SpectralField`
    """
    _check_pair(f, g)
    total = SpectralField.zeros(f.grid)
    if f.is_zero() or g.is_zero():
        return total
    for j in _bands(f.grid, homogeneous):
        block = delta_j(g, j, homogeneous=homogeneous)
        if block.is_zero():
            continue
        low = partial_sum(f, j - PARA_OFFSET, homogeneous=homogeneous)
        if low.is_zero():
            continue
        total = total + product(low, block)
    return total


def _neighbourhood(g, i, homogeneous):
    """``sum_{|j - i| <= 3} Delta_j g`` through the summed symbol."""
    symbol = np.zeros(g.grid.shape)
    for j in range(i - REMAINDER_WIDTH, i + REMAINDER_WIDTH + 1):
        symbol = symbol + block_symbol(g.grid, j, homogeneous)
    return g.multiply(symbol)


def remainder(f, g, homogeneous=False):
    """
    Remainder ``R(f, g) = sum_{|i-j| <= 3} Delta_i f Delta_j g``.

    In the homogeneous calculus the product of the means is added, so that
    :func:`bony` reconstructs ``fg`` for fields with nonzero means.
    """
    _check_pair(f, g)
    total = SpectralField.zeros(f.grid)
    if f.is_zero() or g.is_zero():
        return total
    for i in _bands(f.grid, homogeneous):
        block = delta_j(f, i, homogeneous=homogeneous)
        if block.is_zero():
            continue
        total = total + product(block, _neighbourhood(g, i, homogeneous))
    if homogeneous:
        coeffs = np.zeros(f.grid.shape, dtype=np.complex128)
        coeffs[(0,) * f.grid.d] = f.mean * g.mean
        total = total + SpectralField(f.grid, coeffs)
    return total


class BonyDecomposition:
    """
    ``fg = T_f g + T_g f + R(f, g)``.

    Attributes
    ----------
    para_fg, para_gf, remainder: :class:`.SpectralField`
        The three parts.
    residual: float
        ``||T_f g + T_g f + R - fg||_1`` over ``||f||_inf ||g||_inf``
        times the box volume; 0 when either factor vanishes.
    """

    def __init__(self, para_fg, para_gf, remainder, fg, scale):
        self.para_fg = para_fg
        self.para_gf = para_gf
        self.remainder = remainder
        self.product = fg
        diff = (para_fg + para_gf + remainder - fg).samples()
        if scale == 0.0:
            self.residual = 0.0
        else:
            l1 = float(np.sum(np.abs(diff))) * fg.grid.dx**fg.grid.d
            self.residual = l1 / scale

    @property
    def total(self):
        return self.para_fg + self.para_gf + self.remainder


def bony(f, g, homogeneous=False):
    """
    Bony decomposition of the dealiased product ``fg``.

    Returns
    -------
    decomposition: :class:`.BonyDecomposition`
    """
    _check_pair(f, g)
    fg = product(f, g)
    scale = (
        float(np.max(np.abs(f.samples())))
        * float(np.max(np.abs(g.samples())))
        * f.grid.volume
    )
    return BonyDecomposition(
        paraproduct(f, g, homogeneous),
        paraproduct(g, f, homogeneous),
        remainder(f, g, homogeneous),
        fg,
        scale,
    )


def _check_divergence_free(u):
    residual = u.divergence_residual()
    if residual > DIVERGENCE_TOL:
        raise DivergenceError(
            f"The commutator needs a divergence-free u, relative divergence "
            f"is {residual:.3e}."
        )


def commutator(u, f, j):
    """
    Commutator ``([u, dot Delta_j] . grad) f``, computed directly as
    ``u . grad(dot Delta_j f) - dot Delta_j (u . grad f)``.

    Parameters
    ----------
    u: :class:`.VectorField`
        Divergence free.
    f: :class:`.SpectralField`
    j: int
        Band index of the homogeneous block.

    Returns
    -------
    c: :class:`.SpectralField`
    """
    _check_pair(u, f)
    _check_divergence_free(u)
    block = delta_j(f, j, homogeneous=True)
    total = SpectralField.zeros(f.grid)
    for axis, comp in enumerate(u):
        total = total + product(comp, derivative(block, axis))
        total = total - delta_j(
            product(comp, derivative(f, axis)), j, homogeneous=True
        )
    return total


class CommutatorSplit:
    """
    The five-term split of the commutator by the homogeneous Bony
    decomposition.

    With ``f_l = d_l f`` and sums over ``l``:

    * ``I = T_{Delta_j f_l} u^l``
    * ``II = R(u^l, Delta_j f_l)``
    * ``III = T_{u^l} Delta_j f_l - Delta_j T_{u^l} f_l``
    * ``IV = -Delta_j T_{f_l} u^l``
    * ``V = -Delta_j R(u^l, f_l)``

    Attributes
    ----------
    terms: dict
        ``"I"`` to ``"V"``.
    total: :class:`.SpectralField`
        Sum of the terms.
    direct: :class:`.SpectralField`
        :func:`commutator` evaluated directly.
    residual: float
        ``max |total - direct|`` over the coefficients, relative to the
        largest coefficient of ``direct`` (absolute when that vanishes).
    """

    names = ("I", "II", "III", "IV", "V")

    def __init__(self, terms, direct):
        self.terms = dict(terms)
        total = SpectralField.zeros(direct.grid)
        for name in self.names:
            total = total + self.terms[name]
        self.total = total
        self.direct = direct
        diff = float(np.max(np.abs(total.coeffs - direct.coeffs)))
        scale = direct.max_amplitude()
        self.residual = diff / scale if scale > 0.0 else diff

    def __getitem__(self, name):
        return self.terms[name]


def commutator_split(u, f, j):
    """
    Split ``([u, dot Delta_j] . grad) f`` into the five Bony terms.

    Returns
    -------
    split: :class:`.CommutatorSplit`
    """
    _check_pair(u, f)
    _check_divergence_free(u)
    grid = f.grid
    terms = {name: SpectralField.zeros(grid) for name in CommutatorSplit.names}
    for axis, comp in enumerate(u):
        f_l = derivative(f, axis)
        block = delta_j(f_l, j, homogeneous=True)
        terms["I"] = terms["I"] + paraproduct(block, comp, True)
        terms["II"] = terms["II"] + remainder(comp, block, True)
        terms["III"] = (
            terms["III"]
            + paraproduct(comp, block, True)
            - delta_j(paraproduct(comp, f_l, True), j, homogeneous=True)
        )
        terms["IV"] = terms["IV"] - delta_j(
            paraproduct(f_l, comp, True), j, homogeneous=True
        )
        terms["V"] = terms["V"] - delta_j(
            remainder(comp, f_l, True), j, homogeneous=True
        )
    split = CommutatorSplit(terms, commutator(u, f, j))
    logger.debug("Commutator split at j=%d, residual %.3e", j, split.residual)
    return split


class SupportDefect:
    """
    Worst leakage found by a band scan.

    Attributes
    ----------
    value: float
        Largest ``max |coeffs of Delta_k(piece)|`` relative to the largest
        coefficient of the piece.
    where: tuple or None
        Band indices realising ``value``.
    pairs: int
        Number of checked combinations.
    """

    def __init__(self, homogeneous=False):
        self.homogeneous = homogeneous
        self.value = 0.0
        self.where = None
        self.pairs = 0

    def update(self, piece, k, where):
        self.pairs += 1
        scale = piece.max_amplitude()
        if scale == 0.0:
            return
        leak = delta_j(piece, k, homogeneous=self.homogeneous)
        value = leak.max_amplitude() / scale
        if value > self.value:
            self.value = value
            self.where = where

    def __repr__(self):
        return (
            f"SupportDefect(value={self.value:.3e}, where={self.where}, "
            f"pairs={self.pairs})"
        )


def paraproduct_support_defect(f, g, homogeneous=False):
    """
    Scan every ``(j, k)`` with ``|j - k| >= 3`` and measure
    ``Delta_k(S_{j-4} f Delta_j g)``, which vanishes identically.

    Returns
    -------
    defect: :class:`.SupportDefect`
        ``where`` is ``(j, k)``.
    """
    _check_pair(f, g)
    defect = SupportDefect(homogeneous)
    bands = list(_bands(f.grid, homogeneous))
    for j in bands:
        piece = product(
            partial_sum(f, j - PARA_OFFSET, homogeneous=homogeneous),
            delta_j(g, j, homogeneous=homogeneous),
        )
        for k in bands:
            if abs(j - k) >= 3:
                defect.update(piece, k, (j, k))
    return defect


def remainder_support_defect(f, g, homogeneous=False):
    """
    Scan every ``(j, l, k)`` with ``|l| <= 3`` and ``j <= k - 6`` and measure
    ``Delta_k(Delta_j f Delta_{j+l} g)``, which vanishes identically.

    Returns
    -------
    defect: :class:`.SupportDefect`
        ``where`` is ``(j, l, k)``.
    """
    _check_pair(f, g)
    defect = SupportDefect(homogeneous)
    bands = list(_bands(f.grid, homogeneous))
    for j in bands:
        low = delta_j(f, j, homogeneous=homogeneous)
        for offset in range(-REMAINDER_WIDTH, REMAINDER_WIDTH + 1):
            piece = product(
                low, delta_j(g, j + offset, homogeneous=homogeneous)
            )
            for k in bands:
                if j <= k - 6:
                    defect.update(piece, k, (j, offset, k))
    return defect
