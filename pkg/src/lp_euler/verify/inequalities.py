"""
Trial runners for the harmonic-analysis estimates and their ensemble
statistics.

Each runner draws its inputs from a :class:`.FieldGenSpec` ensemble and
returns the two sides ``(lhs, rhs)`` of one estimate ``lhs <~ rhs``. Both
sides are homogeneous of equal degree in the inputs, so the ratio does not
depend on the ensemble amplitude.

Free parameters: ``r = 1/2``; ``gamma = delta = 1/2`` and
``r_1 = r_2 = 1/2``, so that ``M(|f|^{r_1})^{gamma/r_1}
M(|f|^{r_2})^{delta/r_2} = M(|f|^{1/2})^2``; the kernel ``psi`` is the band
kernel of ``h_0`` with ``l = 0`` and ``q = inf``; ``s = d + 1`` unless given.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import json
import logging

import numpy as np

from ..core import Grid, VectorField, lattice_integral, modulus, product
from ..core import jacobian_modulus
from ..lp import band_range, delta_j
from ..norms import lp_norm, linf_norm, w1inf_norm, tl_norm, besov_norm
from ..ops import (
    frac_deriv,
    leray,
    maximal,
    peetre_maximal,
    peetre_ratio,
    pressure_gradient,
    riesz_multiplier,
)
from ..para import commutator
from .generate import generate


__all__ = [
    "InequalityReport",
    "StabilityReport",
    "INEQUALITIES",
    "inequality_ids",
    "run_trial",
    "run_inequality",
    "stability_sweep",
]

logger = logging.getLogger(__name__)

R = 0.5

# Fraction of zero-RHS trials above which an ensemble is degenerate.
DEGENERATE_FRACTION = 0.1

# Largest tolerated growth of max_ratio across resolutions.
STABILITY_FACTOR = 2.0


def _pointwise_max(lhs, rhs):
    """``max_x lhs/rhs`` with both sides at the maximiser."""
    mask = rhs > 0.0
    if not np.any(mask):
        return float(np.max(lhs)), 0.0
    quotient = np.where(mask, lhs / np.where(mask, rhs, 1.0), 0.0)
    index = np.unravel_index(np.argmax(quotient), quotient.shape)
    return float(lhs[index]), float(rhs[index])


def _default_s(grid, s):
    return grid.d + 1 if s is None else s


def _bernstein(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial)
    lhs = tl_norm(frac_deriv(f, 1), s, homogeneous=True).value
    rhs = tl_norm(f, s + 1, homogeneous=True).value
    return lhs, rhs


def _bernstein_lower(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial)
    lhs = tl_norm(f, s + 1, homogeneous=True).value
    rhs = tl_norm(frac_deriv(f, 1), s, homogeneous=True).value
    return lhs, rhs


def _bandwidth(spec):
    return 2.0 ** (spec.band_range[1] + 1)


def _peetre(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial)
    report = peetre_ratio(f, _bandwidth(spec), r=R)
    if report.empty:
        return 0.0, 0.0
    return report.lhs, report.rhs


def _peetre_grad(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial)
    if f.is_zero():
        return 0.0, 0.0
    t = _bandwidth(spec)
    lhs = peetre_maximal(jacobian_modulus(f) / t, grid, t, R)
    rhs = peetre_maximal(modulus(f), grid, t, R)
    return _pointwise_max(lhs, rhs)


def _maximal_bound(g, f, grid):
    """``M(g) M(|f|^{1/2})^2``, the Hardy-Littlewood side of the
    convolution bounds."""
    mg = maximal(modulus(g), grid)
    mf = maximal(np.sqrt(modulus(f)), grid)
    return mg * mf**2


def _conv_bound(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial, stream=0)
    g = generate(spec.with_kind("scalar"), grid, trial, stream=1)
    if f.is_zero() or g.is_zero():
        return 0.0, 0.0
    j = spec.band_range[1]
    t = _bandwidth(spec)
    dilation = 2.0**j
    lhs = modulus(delta_j(product(g, f), j))
    rhs = (t / dilation) ** (grid.d / R) * _maximal_bound(g, f, grid)
    return _pointwise_max(lhs, rhs)


def _coro1(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial, stream=0)
    g = generate(spec.with_kind("scalar"), grid, trial, stream=1)
    if f.is_zero() or g.is_zero():
        return 0.0, 0.0
    j = spec.band_range[1] + 1
    fg = product(g, f)
    bound = _maximal_bound(g, f, grid)
    best = (0.0, 0.0, -1.0)
    j_min, j_max = band_range(grid)
    for k in range(j_min, min(j, j_max) + 1):
        lhs = modulus(delta_j(fg, k))
        rhs = 2.0 ** ((j - k) * grid.d / R) * bound
        a, b = _pointwise_max(lhs, rhs)
        ratio = a / b if b > 0 else 0.0
        if ratio > best[2]:
            best = (a, b, ratio)
    return best[0], best[1]


def _coro2(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial)
    j_min, j_max = band_range(grid, homogeneous=True)
    lhs = np.zeros(grid.shape)
    rhs = np.zeros(grid.shape)
    for k in range(j_min, j_max + 1):
        block = 2.0 ** (k * s) * delta_j(f, k, homogeneous=True)
        if block.is_zero():
            continue
        rhs = np.maximum(rhs, modulus(block))
        smoothed = delta_j(block, k, homogeneous=True)
        lhs = np.maximum(lhs, modulus(smoothed))
    return lattice_integral(lhs, grid), lattice_integral(rhs, grid)


def _moser(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial, stream=0)
    g = generate(spec.with_kind("scalar"), grid, trial, stream=1)
    lhs = tl_norm(product(f, g), s).value
    rhs = (
        linf_norm(f).value * tl_norm(g, s).value
        + linf_norm(g).value * tl_norm(f, s).value
    )
    return lhs, rhs


def _commutator(spec, grid, trial, s):
    u = generate(spec.with_kind("divergence_free"), grid, trial, stream=0)
    f = generate(spec.with_kind("scalar"), grid, trial, stream=1)
    j_min, j_max = band_range(grid, homogeneous=True)
    envelope = np.zeros(grid.shape)
    if not (u.is_zero() or f.is_zero()):
        for j in range(j_min, j_max + 1):
            term = commutator(u, f, j)
            if term.is_zero():
                continue
            envelope = np.maximum(envelope, 2.0 ** (j * s) * modulus(term))
    lhs = lattice_integral(envelope, grid)
    rhs = float(np.max(jacobian_modulus(u))) * tl_norm(
        f, s, homogeneous=True
    ).value + tl_norm(u, s, homogeneous=True).value * float(
        np.max(jacobian_modulus(f))
    )
    return lhs, rhs


def _riesz(spec, grid, trial, s):
    f = generate(replace(spec, kind="scalar", mean_free=True), grid, trial)
    gradient = VectorField(
        [riesz_multiplier(f, k) for k in range(grid.d)]
    )
    lhs = tl_norm(gradient, s, homogeneous=True).value
    rhs = tl_norm(f, s - 1, homogeneous=True).value
    return lhs, rhs


def _leray(spec, grid, trial, s):
    u = generate(spec.with_kind("vector"), grid, trial)
    lhs = tl_norm(leray(u), s, homogeneous=True).value
    rhs = tl_norm(u, s, homogeneous=True).value
    return lhs, rhs


def _pressure(spec, grid, trial, s):
    u = generate(spec.with_kind("divergence_free"), grid, trial)
    lhs = lp_norm(pressure_gradient(u), 1).value
    rhs = w1inf_norm(u).value * tl_norm(u, s, homogeneous=True).value
    return lhs, rhs


def _pressure_split(spec, grid, trial, s):
    u = generate(spec.with_kind("divergence_free"), grid, trial)
    grad_p = pressure_gradient(u)
    lhs = lp_norm(grad_p, 1).value
    rhs = (
        lp_norm(delta_j(grad_p, -1), 1).value
        + tl_norm(grad_p, s, homogeneous=True).value
    )
    return lhs, rhs


def _embedding(spec, grid, trial, s):
    u = generate(spec.with_kind("divergence_free"), grid, trial)
    lhs = besov_norm(u, 1, np.inf, 1).value
    rhs = tl_norm(u, s).value
    return lhs, rhs


def _w1inf_besov(spec, grid, trial, s):
    u = generate(spec.with_kind("divergence_free"), grid, trial)
    lhs = w1inf_norm(u).value
    rhs = besov_norm(u, 1, np.inf, 1).value
    return lhs, rhs


def _equivalence(spec, grid, trial, s):
    f = generate(spec.with_kind("scalar"), grid, trial)
    lhs = lp_norm(f, 1).value + tl_norm(f, s, homogeneous=True).value
    rhs = tl_norm(f, s).value
    return lhs, rhs


INEQUALITIES = {
    "bernstein": _bernstein,
    "bernstein_lower": _bernstein_lower,
    "peetre": _peetre,
    "peetre_grad": _peetre_grad,
    "conv_bound": _conv_bound,
    "coro1": _coro1,
    "coro2": _coro2,
    "moser": _moser,
    "commutator": _commutator,
    "riesz": _riesz,
    "leray": _leray,
    "pressure": _pressure,
    "pressure_split": _pressure_split,
    "embedding": _embedding,
    "w1inf_besov": _w1inf_besov,
    "equivalence": _equivalence,
}


def inequality_ids():
    return sorted(INEQUALITIES)


def run_trial(inequality_id, spec, grid, trial, s=None):
    """
    Both sides of one estimate for trial ``trial`` of the ensemble.

    Returns
    -------
    (lhs, rhs): tuple of float
    """
    try:
        runner = INEQUALITIES[inequality_id]
    except KeyError:
        raise ValueError(
            f"Unknown inequality {inequality_id!r}, expected one of "
            f"{inequality_ids()}."
        ) from None
    lhs, rhs = runner(spec, grid, trial, _default_s(grid, s))
    return float(lhs), float(rhs)


@dataclass(frozen=True)
class InequalityReport:
    """
    Ensemble statistics of one estimate.

    Attributes
    ----------
    inequality_id: str
    grid: :class:`.Grid`
    seed: int
    trials: int
        Number of trials run, excluded ones included.
    excluded: int
        Trials with a vanishing right-hand side.
    per_trial: tuple
        ``(lhs, rhs, ratio)`` of every counted trial, in trial order.
    max_ratio, mean_ratio, p95_ratio, min_ratio: float or None
        Statistics over the counted trials; ``None`` if there are none.
    degenerate: bool
        More than 10% of the trials were excluded.
    """

    inequality_id: str
    grid: Grid
    seed: int
    trials: int
    excluded: int
    per_trial: tuple = field(repr=False)
    max_ratio: float = None
    mean_ratio: float = None
    p95_ratio: float = None
    min_ratio: float = None
    degenerate: bool = False

    @classmethod
    def from_trials(cls, inequality_id, grid, seed, results):
        counted = []
        excluded = 0
        for lhs, rhs in results:
            if not rhs > 0.0 or not np.isfinite(rhs):
                excluded += 1
                continue
            counted.append((lhs, rhs, lhs / rhs))
        stats = {}
        if counted:
            ratios = np.array([c[2] for c in counted])
            stats = {
                "max_ratio": float(np.max(ratios)),
                "mean_ratio": float(np.mean(ratios)),
                "p95_ratio": float(np.percentile(ratios, 95)),
                "min_ratio": float(np.min(ratios)),
            }
        trials = len(results)
        degenerate = not counted or excluded > DEGENERATE_FRACTION * trials
        return cls(
            inequality_id,
            grid,
            int(seed),
            trials,
            excluded,
            tuple(counted),
            degenerate=degenerate,
            **stats,
        )

    def to_dict(self):
        return {
            "id": self.inequality_id,
            "grid": self.grid.to_dict(),
            "seed": self.seed,
            "trials": self.trials,
            "excluded": self.excluded,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "p95_ratio": self.p95_ratio,
            "min_ratio": self.min_ratio,
            "degenerate": self.degenerate,
            "per_trial": [
                {"lhs": lhs, "rhs": rhs, "ratio": ratio}
                for lhs, rhs, ratio in self.per_trial
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def run_inequality(
    inequality_id, ensemble, n_trials, grid, s=None, workers=1
):
    """
    Run ``n_trials`` independent trials of one estimate.

    Parameters
    ----------
    inequality_id: str
        One of :func:`inequality_ids`.
    ensemble: :class:`.FieldGenSpec`
        Input model; each runner picks the field kind it needs.
    n_trials: int
        Number of trials.
    grid: :class:`.Grid`
    s: float, optional
        Smoothness index, default ``d + 1``.
    workers: int, optional
        Threads running trials concurrently. Results do not depend on it.

    Returns
    -------
    report: :class:`.InequalityReport`
    """
    if inequality_id not in INEQUALITIES:
        raise ValueError(
            f"Unknown inequality {inequality_id!r}, expected one of "
            f"{inequality_ids()}."
        )
    if n_trials < 1:
        raise ValueError("n_trials must be positive.")

    def one(trial):
        return run_trial(inequality_id, ensemble, grid, trial, s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(n_trials)))
    else:
        results = [one(trial) for trial in range(n_trials)]
    report = InequalityReport.from_trials(
        inequality_id, grid, ensemble.seed, results
    )
    logger.info(
        "%s on %r: %d trials, %d excluded, max ratio %s",
        inequality_id,
        grid,
        report.trials,
        report.excluded,
        report.max_ratio,
    )
    return report


@dataclass(frozen=True)
class StabilityReport:
    """
    ``max_ratio`` of one estimate across resolutions.

    ``growth`` is the largest-resolution ``max_ratio`` over the smallest
    one. ``passed`` is false when it exceeds 2 or an ensemble is
    degenerate.
    """

    inequality_id: str
    resolutions: tuple
    max_ratios: tuple
    growth: float
    passed: bool
    reports: tuple = field(repr=False)

    def to_dict(self):
        return {
            "id": self.inequality_id,
            "resolutions": list(self.resolutions),
            "max_ratios": list(self.max_ratios),
            "growth": self.growth,
            "passed": self.passed,
        }


def stability_sweep(
    inequality_id, ensemble, resolutions, n_trials=100, d=2, L=1.0,
    s=None, workers=1,
):
    """
    Run one estimate at several resolutions on identical inputs.

    The ensemble cutoff is pinned to the smallest grid so every resolution
    sees the same functions.

    Parameters
    ----------
    inequality_id: str
    ensemble: :class:`.FieldGenSpec`
    resolutions: list of int
        At least two grid sizes.
    n_trials: int, optional
    d: int, optional
    L: float, optional
    s: float, optional
    workers: int, optional

    Returns
    -------
    report: :class:`.StabilityReport`
    """
    resolutions = sorted(int(n) for n in resolutions)
    if len(set(resolutions)) < 2:
        raise ValueError("stability_sweep needs at least two resolutions.")
    cutoff = resolutions[0] // 2 - 1
    if ensemble.cutoff is not None:
        cutoff = min(cutoff, ensemble.cutoff)
    ensemble = replace(ensemble, cutoff=cutoff)
    reports = tuple(
        run_inequality(
            inequality_id, ensemble, n_trials, Grid(d=d, n=n, L=L), s,
            workers,
        )
        for n in resolutions
    )
    max_ratios = tuple(r.max_ratio for r in reports)
    if any(r.degenerate for r in reports) or not max_ratios[0]:
        growth = None
        passed = False
    else:
        growth = max_ratios[-1] / max_ratios[0]
        passed = bool(growth <= STABILITY_FACTOR)
    if not passed:
        logger.warning(
            "%s is not resolution stable over %s (growth %s)",
            inequality_id,
            resolutions,
            growth,
        )
    return StabilityReport(
        inequality_id, tuple(resolutions), max_ratios, growth, passed,
        reports,
    )
