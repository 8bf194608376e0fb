"""Diagnostics recorded along an Euler run."""

from dataclasses import dataclass
import io
import logging

import numpy as np

from ..core import jacobian_modulus, modulus, parseval_integral
from ..norms import besov_norm, lp_norm, tl_norm
from ..ops import pressure_gradient
from .gronwall import (
    apriori_check,
    blowup_time,
    fit_C0,
    gronwall_envelope,
    l1_transport_check,
    two_d_global_check,
)


__all__ = ["DiagnosticRecord", "EulerTrajectory", "measure", "CSV_COLUMNS"]

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "t",
    "energy",
    "enstrophy",
    "linf_u",
    "linf_grad_u",
    "f_norm",
    "besov_1_inf_1",
    "envelope",
)


@dataclass(frozen=True)
class DiagnosticRecord:
    """
    Monitors of one sample.

    Attributes
    ----------
    t: float
    energy, enstrophy: float
        ``1/2 int |u|^2`` and ``1/2 int omega^2``.
    linf_u, linf_grad_u: float
        ``||u||_inf`` and ``||grad u||_inf``.
    f_norm: float
        ``||u||_{F^s_{1,inf}}``, inhomogeneous.
    besov_1_inf_1: float
        ``||u||_{B^1_{inf,1}}``.
    l1_u, grad_p_l1: float
        ``||u||_{L^1}`` and ``||grad p||_{L^1}``.
    divergence: float
        Relative divergence of ``u``.
    mean_vorticity: float
        ``|mean omega|``.
    """

    t: float
    energy: float
    enstrophy: float
    linf_u: float
    linf_grad_u: float
    f_norm: float
    besov_1_inf_1: float
    l1_u: float
    grad_p_l1: float
    divergence: float
    mean_vorticity: float


def measure(state, s=3.0):
    """Evaluate every monitor on an :class:`.EulerState`."""
    u = state.u
    omega = state.omega
    return DiagnosticRecord(
        t=state.t,
        energy=0.5 * parseval_integral(u),
        enstrophy=0.5 * parseval_integral(omega),
        linf_u=float(np.max(modulus(u))),
        linf_grad_u=float(np.max(jacobian_modulus(u))),
        f_norm=tl_norm(u, s).value,
        besov_1_inf_1=besov_norm(u, 1.0, np.inf, 1.0).value,
        l1_u=lp_norm(u, 1.0).value,
        grad_p_l1=lp_norm(pressure_gradient(u), 1.0).value,
        divergence=u.divergence_residual(),
        mean_vorticity=float(abs(omega.mean)),
    )


class EulerTrajectory:
    """
    Time series of :class:`.DiagnosticRecord` with the envelope and the
    fitted constants derived from it.

    Parameters
    ----------
    s: float, optional
        Smoothness index of ``f_norm``.
    C0: float, optional
        Envelope constant; the fitted one is used when not given.

    Attributes
    ----------
    records: list of :class:`.DiagnosticRecord`
        Strictly increasing in ``t``.
    stopped: bool
        The blow-up guard ended the run early.
    stop_reason: str or None
    final_state: :class:`.EulerState` or None
    """

    def __init__(self, s=3.0, C0=None):
        self.s = s
        self.supplied_C0 = C0
        self.records = []
        self.stopped = False
        self.stop_reason = None
        self.final_state = None

    def append(self, record):
        if self.records and not record.t > self.records[-1].t:
            raise ValueError(
                f"Sample times must increase, got {record.t} after "
                f"{self.records[-1].t}."
            )
        self.records.append(record)
        logger.debug("t=%.6g f_norm=%.6g", record.t, record.f_norm)

    def stop(self, reason):
        self.stopped = True
        self.stop_reason = reason
        logger.warning("Run stopped at t=%s: %s", self.times[-1], reason)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def column(self, name):
        """Values of one record field as a float array."""
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def times(self):
        return self.column("t")

    @property
    def u0_f_norm(self):
        return self.records[0].f_norm

    def fitted_C0(self):
        """:func:`.fit_C0`, or its floor 1 when there is a single sample."""
        if len(self) < 2:
            return 1.0
        return fit_C0(self)

    def envelope(self, C0=None):
        """
        Envelope at every sample, ``inf`` at and past the horizon.
        ``C0`` defaults to the supplied constant, then the fitted one.
        """
        if C0 is None:
            C0 = self.supplied_C0 or self.fitted_C0()
        u0 = self.u0_f_norm
        horizon = blowup_time(u0, C0)
        return np.array(
            [
                gronwall_envelope(u0, C0, t) if t < horizon else np.inf
                for t in self.times
            ]
        )

    def sup_f_norm(self):
        """Running supremum of ``f_norm``."""
        return np.maximum.accumulate(self.column("f_norm"))

    def drift(self, name):
        """
        ``max |x(t) - x(0)| / |x(0)|`` of one monitor; absolute when
        ``x(0) = 0``.
        """
        values = self.column(name)
        if values[0] == 0.0:
            return float(np.max(np.abs(values)))
        return float(np.max(np.abs(values - values[0])) / abs(values[0]))

    def table(self, C0=None):
        """Array of the :data:`CSV_COLUMNS`, one row per sample."""
        columns = [self.column(name) for name in CSV_COLUMNS[:-1]]
        columns.append(self.envelope(C0))
        return np.column_stack(columns)

    def csv_text(self, C0=None):
        buffer = io.StringIO()
        np.savetxt(
            buffer,
            self.table(C0),
            fmt="%.17g",
            delimiter=",",
            header=",".join(CSV_COLUMNS),
            comments="",
        )
        return buffer.getvalue()

    def to_csv(self, path, C0=None):
        with open(path, "w", newline="") as file:
            file.write(self.csv_text(C0))

    def summary(self):
        """
        Summary of the run as a JSON-ready dict.

        The keys ``u0_f_norm``, ``fitted_C0``, ``T0_estimate`` (``None``
        when infinite), ``blowup_stop`` and ``global_check`` (``"pass"`` or
        ``"fail"``) are always present, together with the drifts, the
        constants of the other checks and the ``l1_u`` and ``grad_p_l1``
        series. ``envelope_samples`` counts the samples before ``T0``;
        the fit of ``C0`` only constrains those past ``t = 0``.
        """
        fitted = self.fitted_C0()
        C0 = self.supplied_C0 or fitted
        horizon = blowup_time(self.u0_f_norm, C0)
        inside = int(np.count_nonzero(self.times < horizon))
        if len(self) > 1 and inside < 2:
            logger.warning(
                "Only the initial sample lies before T0=%.3g; C0=%s is not "
                "constrained by the trajectory",
                horizon,
                C0,
            )
        out = {
            "u0_f_norm": self.u0_f_norm,
            "fitted_C0": fitted,
            "C0": C0,
            "T0_estimate": None if np.isinf(horizon) else horizon,
            "envelope_samples": inside,
            "blowup_stop": self.stopped,
            "stop_reason": self.stop_reason,
            "samples": len(self),
            "t_final": self.records[-1].t,
            "s": self.s,
            "energy_drift": self.drift("energy"),
            "enstrophy_drift": self.drift("enstrophy"),
            "max_divergence": float(np.max(self.column("divergence"))),
            "l1_u": self.column("l1_u").tolist(),
            "grad_p_l1": self.column("grad_p_l1").tolist(),
        }
        if len(self) < 2:
            out.update(
                global_check="fail" if self.stopped else "pass",
                global_C=1.0,
                exponent_integral=0.0,
                apriori_C=1.0,
                l1_transport_C=1.0,
            )
            return out
        global_fit = two_d_global_check(self)
        out.update(
            global_check="pass" if global_fit.passed else "fail",
            global_C=global_fit.constant,
            exponent_integral=global_fit.integral,
            apriori_C=apriori_check(self).constant,
            l1_transport_C=l1_transport_check(self).constant,
        )
        return out
