"""
Gronwall envelopes and fitted constants along an Euler trajectory.

The persistence estimate ``y' <= C0^2 y^2`` with ``y(0) = C0 ||u_0||``
integrates to

    y(t) = C0 ||u_0|| / (1 - t C0^2 ||u_0||),   0 <= t < T0,

with horizon ``T0 = 1 / (C0^2 ||u_0||)``. The constants of the estimates
are not known, so every check below reports the smallest constant
``C >= 1`` for which the measured curve stays under the bound.
"""

from dataclasses import dataclass
import logging
import warnings

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..errors import EnvelopeHorizonError


__all__ = [
    "ConstantFit",
    "gronwall_envelope",
    "blowup_time",
    "fit_C0",
    "two_d_global_check",
    "apriori_check",
    "l1_transport_check",
]

logger = logging.getLogger(__name__)

# Absolute resolution of every fitted constant.
FIT_TOL = 1e-6

# Relative slack for rounding in the measured curves.
ROUND_TOL = 1e-12

# Doublings tried before a bound is declared unsatisfiable.
MAX_DOUBLINGS = 64


def blowup_time(u0_norm, C0):
    """Horizon ``T0 = 1 / (C0^2 ||u_0||)``; infinite for zero data."""
    if u0_norm < 0.0 or not C0 > 0.0:
        raise ValueError("Need u0_norm >= 0 and C0 > 0.")
    if u0_norm == 0.0:
        return np.inf
    return 1.0 / (C0**2 * u0_norm)


def gronwall_envelope(u0_norm, C0, t):
    """
    Value of the Gronwall envelope at time ``t``.

    Parameters
    ----------
    u0_norm: float
        ``||u_0||_{F^s_{1,inf}}``.
    C0: float
        Envelope constant.
    t: float
        Time in ``[0, T0)``.

    Returns
    -------
    y: float

    Raises
    ------
    EnvelopeHorizonError
        If ``t >= T0``.

    Examples
    --------
    >>> gronwall_envelope(1.0, 1.0, 0.5)
    2.0
    """
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}.")
    if t >= blowup_time(u0_norm, C0):
        raise EnvelopeHorizonError()
    return C0 * u0_norm / (1.0 - t * C0**2 * u0_norm)


def _smallest_constant(predicate, floor=1.0):
    """
    Smallest ``C >= floor`` with ``predicate(C)``, for a predicate that is
    monotone in ``C``. ``None`` if no bracket is found.
    """
    if predicate(floor):
        return floor
    lo, hi = floor, 2.0 * floor
    for _ in range(MAX_DOUBLINGS):
        if predicate(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        return None
    while hi - lo > FIT_TOL:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _samples(trajectory):
    if len(trajectory) < 2:
        raise ValueError("A fit needs a trajectory with at least 2 samples.")
    return trajectory.column("t"), trajectory.column("f_norm")


def fit_C0(trajectory):
    """
    Smallest ``C0 >= 1`` whose envelope dominates the running supremum of
    ``||u(t)||_{F^s_{1,inf}}`` at every recorded ``t < T0(C0)``.

    Parameters
    ----------
    trajectory: :class:`.EulerTrajectory`
        At least two samples. A trajectory stopped by the blow-up guard is
        fitted over its recorded samples, with a warning.

    Returns
    -------
    C0: float
        Bisected to ``1e-6``; 1 for the zero trajectory.
    """
    t, f_norm = _samples(trajectory)
    if getattr(trajectory, "stopped", False):
        warnings.warn(
            "The trajectory was stopped by the blow-up guard; C0 is fitted "
            "over the samples before the stop."
        )
    u0 = f_norm[0]
    running = np.maximum.accumulate(f_norm)

    def dominated(C):
        horizon = blowup_time(u0, C)
        inside = t < horizon
        if u0 == 0.0:
            return bool(np.all(running[inside] == 0.0))
        envelope = C * u0 / (1.0 - t[inside] * C**2 * u0)
        return bool(np.all(running[inside] <= envelope))

    C0 = _smallest_constant(dominated)
    logger.debug("Fitted C0=%s over %d samples", C0, len(t))
    return C0


@dataclass(frozen=True)
class ConstantFit:
    """
    Result of fitting the constant of a bound along a trajectory.

    Attributes
    ----------
    name: str
        The bound checked.
    constant: float or None
        Smallest ``C >= 1`` satisfying the bound, ``None`` if none does.
    passed: bool
        A finite constant was found and the inputs stayed finite.
    integral: float
        The time integral entering the bound, at the final sample.
    """

    name: str
    constant: float
    passed: bool
    integral: float

    def to_dict(self):
        return {
            "name": self.name,
            "constant": self.constant,
            "passed": self.passed,
            "integral": self.integral,
        }


def _integral(t, values):
    return cumulative_trapezoid(values, t, initial=0.0)


def _finite(*columns):
    return all(bool(np.all(np.isfinite(c))) for c in columns)


def two_d_global_check(trajectory):
    """
    Check ``||u(t)||_F <= C ||u_0||_F exp(C int_0^t ||u||_{W^{1,inf}})``
    along the run.

    Returns
    -------
    fit: :class:`.ConstantFit`
        ``integral`` is ``int_0^T ||u||_{W^{1,inf}} dt``. ``passed``
        also requires ``||grad u||_inf`` to stay finite and the run to
        finish without a blow-up stop.
    """
    t, f_norm = _samples(trajectory)
    grad = trajectory.column("linf_grad_u")
    w1inf = trajectory.column("linf_u") + grad
    exponent = _integral(t, w1inf)
    u0 = f_norm[0]

    def bounded(C):
        with np.errstate(over="ignore", invalid="ignore"):
            bound = C * u0 * np.exp(C * exponent)
        return bool(np.all(f_norm <= bound * (1.0 + ROUND_TOL)))

    constant = _smallest_constant(bounded)
    passed = (
        constant is not None
        and _finite(grad, f_norm)
        and not getattr(trajectory, "stopped", False)
    )
    return ConstantFit("two_d_global", constant, passed, float(exponent[-1]))


def apriori_check(trajectory):
    """
    Check ``||u(t)||_F <= C (||u_0||_F + int_0^t ||u||_{W^{1,inf}}
    ||u||_F)`` along the run, with trapezoid quadrature in time.

    Returns
    -------
    fit: :class:`.ConstantFit`
    """
    t, f_norm = _samples(trajectory)
    w1inf = trajectory.column("linf_u") + trajectory.column("linf_grad_u")
    integral = _integral(t, w1inf * f_norm)
    rhs = f_norm[0] + integral

    def bounded(C):
        return bool(np.all(f_norm <= C * rhs * (1.0 + ROUND_TOL)))

    constant = _smallest_constant(bounded)
    passed = constant is not None and _finite(f_norm, w1inf)
    return ConstantFit("apriori", constant, passed, float(integral[-1]))


def l1_transport_check(trajectory):
    """
    Check ``||u(t)||_{L^1} <= ||u_0||_{L^1} + C int_0^t ||grad p||_{L^1}``
    along the run.

    Returns
    -------
    fit: :class:`.ConstantFit`
    """
    t = trajectory.column("t")
    if len(t) < 2:
        raise ValueError("A fit needs a trajectory with at least 2 samples.")
    l1_u = trajectory.column("l1_u")
    integral = _integral(t, trajectory.column("grad_p_l1"))

    def bounded(C):
        bound = (l1_u[0] + C * integral) * (1.0 + ROUND_TOL)
        return bool(np.all(l1_u <= bound))

    constant = _smallest_constant(bounded)
    passed = constant is not None and _finite(l1_u, integral)
    return ConstantFit("l1_transport", constant, passed, float(integral[-1]))
