"""
Norms of lattice fields: Lebesgue, Lipschitz-type, Triebel-Lizorkin
``F^s_{1,inf}`` and Besov ``B^s_{p,q}``.

Vector fields enter every norm through the pointwise Euclidean modulus of
their components; ``|grad u|`` is the Frobenius norm of the Jacobian.
"""

from dataclasses import dataclass, field
import numbers

import numpy as np

from .core import lattice_integral, modulus, jacobian_modulus
from .lp import decompose


__all__ = [
    "NormSpec",
    "NormValue",
    "EquivalenceReport",
    "lp_norm",
    "linf_norm",
    "w1inf_norm",
    "tl_norm",
    "besov_norm",
    "norm_equivalence_check",
    "ensemble_equivalence",
]

_SPACES = ("Lp", "Linf", "W1inf", "TL_inhom", "TL_hom", "Besov")


def _check_exponent(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number.")
    if not value >= 1:
        raise ValueError(f"{name} must lie in [1, inf], got {value}.")


@dataclass(frozen=True)
class NormSpec:
    """
    Which norm was computed.

    Parameters
    ----------
    space: str
        One of ``"Lp"``, ``"Linf"``, ``"W1inf"``, ``"TL_inhom"``,
        ``"TL_hom"`` or ``"Besov"``.
    s: float, optional
        Smoothness index for the Triebel-Lizorkin and Besov spaces.
    p, q: float, optional
        Integrability and summability exponents, ``inf`` allowed. Fixed to
        ``p = 1`` and ``q = inf`` for the Triebel-Lizorkin spaces.
    """

    space: str
    s: float = 0.0
    p: float = 1.0
    q: float = np.inf

    def __post_init__(self):
        if self.space not in _SPACES:
            raise ValueError(
                f"Unknown space {self.space!r}, expected one of {_SPACES}."
            )
        _check_exponent("p", self.p)
        _check_exponent("q", self.q)
        if self.space.startswith("TL") and (
            self.p != 1 or self.q != np.inf
        ):
            raise ValueError("Triebel-Lizorkin norms use p = 1, q = inf.")
        if not np.isfinite(self.s):
            raise ValueError("s must be finite.")

    def to_dict(self):
        return {
            "space": self.space,
            "s": float(self.s),
            "p": _json_exponent(self.p),
            "q": _json_exponent(self.q),
        }


def _json_exponent(value):
    return "inf" if value == np.inf else float(value)


@dataclass(frozen=True)
class NormValue:
    """
    A computed norm.

    Attributes
    ----------
    value: float
        Nonnegative and finite.
    spec: :class:`.NormSpec`
    truncation: tuple of int or None
        Band range ``(j_min, j_max)`` the supremum or sum ran over, ``None``
        for norms that do not use the dyadic decomposition.
    """

    value: float
    spec: NormSpec
    truncation: tuple = None

    def __post_init__(self):
        if not (np.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"Invalid norm value {self.value}.")

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        out = {"value": float(self.value), "spec": self.spec.to_dict()}
        out["truncation"] = (
            None if self.truncation is None else list(self.truncation)
        )
        return out


def lp_norm(f, p):
    """
    ``L^p`` norm by lattice quadrature (``p = inf`` gives the maximum).

    Parameters
    ----------
    f: :class:`.SpectralField` or :class:`.VectorField`
    p: float
        Exponent in ``[1, inf]``.

    Returns
    -------
    norm: :class:`.NormValue`
    """
    _check_exponent("p", p)
    mod = modulus(f)
    if p == np.inf:
        value = float(np.max(mod))
        return NormValue(value, NormSpec("Linf", p=np.inf))
    value = lattice_integral(mod**p, f.grid) ** (1.0 / p)
    return NormValue(value, NormSpec("Lp", p=p))


def linf_norm(f):
    """Maximum of the pointwise modulus over the lattice."""
    return lp_norm(f, np.inf)


def w1inf_norm(u):
    """
    ``||u||_inf + ||grad u||_inf`` with spectral derivatives.

    For a scalar field the gradient modulus is ``|grad f|``; for a vector
    field it is the Frobenius norm of the Jacobian.
    """
    value = float(np.max(modulus(u))) + float(np.max(jacobian_modulus(u)))
    return NormValue(value, NormSpec("W1inf", p=np.inf))


def _weighted_band_moduli(f, s, homogeneous):
    decomposition = decompose(f, homogeneous=homogeneous)
    truncation = (decomposition.j_min, decomposition.j_max)
    for j, band in decomposition:
        yield j, 2.0 ** (j * s) * band, truncation


def tl_norm(f, s, homogeneous=False):
    """
    Triebel-Lizorkin norm ``integral sup_j 2^{js} |Delta_j f|(x) dx``.

    The supremum runs over the band range resolved on the grid. The
    homogeneous variant drops the mean mode, since the bands sum to ``f``
    minus its mean.

    Parameters
    ----------
    f: :class:`.SpectralField` or :class:`.VectorField`
    s: float
        Smoothness index.
    homogeneous: bool, optional
        Use the homogeneous blocks ``dot Delta_j``.

    Returns
    -------
    norm: :class:`.NormValue`
        ``truncation`` holds the band range used.
    """
    spec = NormSpec("TL_hom" if homogeneous else "TL_inhom", s=s)
    envelope = np.zeros(f.grid.shape)
    truncation = None
    for _, band, truncation in _weighted_band_moduli(f, s, homogeneous):
        if band.is_zero():
            continue
        envelope = np.maximum(envelope, modulus(band))
    value = lattice_integral(envelope, f.grid)
    return NormValue(value, spec, truncation)


def besov_norm(f, s, p, q, homogeneous=False):
    """
    Besov norm, the ``l^q`` norm over ``j`` of ``2^{js} ||Delta_j f||_p``.

    Parameters
    ----------
    f: :class:`.SpectralField` or :class:`.VectorField`
    s: float
        Smoothness index.
    p, q: float
        Exponents in ``[1, inf]``.
    homogeneous: bool, optional
        Use the homogeneous blocks.

    Returns
    -------
    norm: :class:`.NormValue`
    """
    spec = NormSpec("Besov", s=s, p=p, q=q)
    terms = []
    truncation = None
    for _, band, truncation in _weighted_band_moduli(f, s, homogeneous):
        terms.append(0.0 if band.is_zero() else lp_norm(band, p).value)
    terms = np.array(terms)
    if q == np.inf:
        value = float(np.max(terms)) if terms.size else 0.0
    else:
        value = float(np.sum(terms**q) ** (1.0 / q))
    return NormValue(value, spec, truncation)


@dataclass(frozen=True)
class EquivalenceReport:
    """
    Both sides of ``||f||_1 + ||f||_{dot F^s} ~ ||f||_{F^s}``.

    ``ratio`` is ``(l1 + homogeneous) / inhomogeneous``, defined as 1 when
    both sides vanish.
    """

    s: float
    l1: float
    homogeneous: float
    inhomogeneous: float
    ratio: float

    def to_dict(self):
        return {
            "s": self.s,
            "l1": self.l1,
            "homogeneous": self.homogeneous,
            "inhomogeneous": self.inhomogeneous,
            "ratio": self.ratio,
        }


def norm_equivalence_check(f, s):
    """
    Evaluate both sides of the equivalence between the inhomogeneous
    Triebel-Lizorkin norm and ``L^1`` plus the homogeneous norm.

    Parameters
    ----------
    f: :class:`.SpectralField` or :class:`.VectorField`
    s: float
        Positive smoothness index.

    Returns
    -------
    report: :class:`.EquivalenceReport`
    """
    if not s > 0:
        raise ValueError(f"The norm equivalence needs s > 0, got s={s}.")
    l1 = lp_norm(f, 1).value
    hom = tl_norm(f, s, homogeneous=True).value
    inhom = tl_norm(f, s, homogeneous=False).value
    lhs = l1 + hom
    if lhs == 0.0 and inhom == 0.0:
        ratio = 1.0
    elif inhom == 0.0:
        ratio = np.inf
    else:
        ratio = lhs / inhom
    return EquivalenceReport(float(s), l1, hom, inhom, float(ratio))


@dataclass(frozen=True)
class EnsembleEquivalence:
    s: float
    ratios: tuple = field(repr=False)

    @property
    def min_ratio(self):
        return float(min(self.ratios))

    @property
    def max_ratio(self):
        return float(max(self.ratios))

    def to_dict(self):
        return {
            "s": self.s,
            "trials": len(self.ratios),
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
        }


def ensemble_equivalence(fields, s):
    """
    Bracket ``[min, max]`` of the equivalence ratio across ``fields``.

    Returns
    -------
    summary: EnsembleEquivalence
        With ``ratios``, ``min_ratio`` and ``max_ratio``.
    """
    ratios = tuple(norm_equivalence_check(f, s).ratio for f in fields)
    if not ratios:
        raise ValueError("ensemble_equivalence needs at least one field.")
    return EnsembleEquivalence(float(s), ratios)
