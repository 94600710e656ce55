"""Transverse-field control design for the two-level Ising passage.

The hardware protocol drives H(t) = -1/2 [Omega(t) sx + x sz] from a large
transverse field Omega(0) = omega0 down to omegaf, dragging the ground
state from |+> to the sigmoid superposition.  This module builds the two
ramp families studied here (linear and constant-adiabaticity "faquad"),
their perturbed variants, the instantaneous eigensystem, and the
adiabatic-parameter diagnostics used to compare them.

Units: omegaf is the frequency unit (set it to 1), times are in 1/omegaf,
fields in omegaf.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "ControlSchedule",
    "EigenSystem",
    "AdiabaticDiagnostics",
    "linear_schedule",
    "faquad_schedule",
    "perturbed_schedule",
    "tabulated_schedule",
    "eigensystem",
    "adiabatic_mu",
    "adiabatic_diagnostics",
    "faquad_constant_mu",
    "optimal_design_field",
    "schedule_to_csv",
    "schedule_from_csv",
]


def _w_of_omega(omega, x_ref):
    # w = 1 - Omega/hypot(Omega, x) written without cancellation at
    # Omega >> |x|:  w = x^2 / (h (h + Omega))
    h = np.hypot(omega, x_ref)
    return x_ref * x_ref / (h * (h + omega))


@dataclass(frozen=True)
class ControlSchedule:
    """A transverse-field waveform Omega(t) on [0, tf].

    ``kind`` is one of ``linear``, ``faquad``, ``perturbed``, ``tabulated``.
    ``omega0``/``omegaf`` are the design endpoints; for the perturbed kind
    they keep the *base* schedule's values and evaluation intentionally
    overshoots them by the degradation term.  ``samples`` holds the (t,
    Omega) table for the tabulated kind and is None otherwise.
    """

    kind: str
    omega0: float
    omegaf: float
    tf: float
    x_ref: float = 0.0
    epsilon_ctrl: float = 0.0
    samples: tuple = None
    base: "ControlSchedule" = field(default=None, repr=False)

    def omega(self, t):
        """Field value(s) at time t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "linear":
            out = self.omega0 + (self.omegaf - self.omega0) * (t / self.tf)
        elif self.kind == "faquad":
            w0 = _w_of_omega(self.omega0, self.x_ref)
            wf = _w_of_omega(self.omegaf, self.x_ref)
            w = w0 + (t / self.tf) * (wf - w0)
            out = abs(self.x_ref) * (1.0 - w) / np.sqrt(w * (2.0 - w))
        elif self.kind == "perturbed":
            ramp = self.base.omega0 + (self.base.omegaf - self.base.omega0) * (t / self.tf)
            out = self.base.omega(t) + self.epsilon_ctrl * ramp
        else:
            ts, oms = self.samples
            out = np.interp(t, ts, oms)
        return out if out.ndim else float(out)

    def domega(self, t):
        """Time derivative of the field, analytic where the kind allows."""
        t = np.asarray(t, dtype=float)
        if self.kind == "linear":
            out = np.full(t.shape, (self.omegaf - self.omega0) / self.tf)
        elif self.kind == "faquad":
            w0 = _w_of_omega(self.omega0, self.x_ref)
            wf = _w_of_omega(self.omegaf, self.x_ref)
            w = w0 + (t / self.tf) * (wf - w0)
            # dOmega/dw = -|x|/(w(2-w))^{3/2}; dw/dt = (wf-w0)/tf
            out = abs(self.x_ref) * (w * (2.0 - w)) ** -1.5 * (w0 - wf) / self.tf
        elif self.kind == "perturbed":
            out = self.base.domega(t) + self.epsilon_ctrl * (
                (self.base.omegaf - self.base.omega0) / self.tf
            )
        else:
            ts, oms = self.samples
            # central differences on the stored grid
            grad = np.gradient(oms, ts)
            out = np.interp(t, ts, grad)
        return out if out.ndim else float(out)


def linear_schedule(omega0: float, omegaf: float, tf: float) -> ControlSchedule:
    """Affine ramp Omega(t) = omega0 (1 - t/tf) + omegaf t/tf.

    omega0 == omegaf is allowed and gives a constant drive (used for Rabi
    and free-evolution checks); increasing ramps are rejected.
    """
    if tf <= 0:
        raise ValueError("tf must be positive")
    if omega0 < omegaf or omegaf < 0:
        raise ValueError("need omega0 >= omegaf >= 0")
    return ControlSchedule("linear", float(omega0), float(omegaf), float(tf))


def faquad_schedule(omega0: float, omegaf: float, tf: float, x_ref: float) -> ControlSchedule:
    """Constant-adiabaticity ramp designed at reference field x_ref.

    With v(Omega) = Omega / sqrt(Omega^2 + x_ref^2), the constant-mu
    trajectory is v linear in t between v(omega0) and v(omegaf); the
    waveform is evaluated through the complement w = 1 - v for numerical
    stability at omega0 >> |x_ref|.  The resulting adiabatic parameter is
    mu = |v(omega0) - v(omegaf)| / (2 |x_ref| tf) at x = x_ref for all t.
    """
    if tf <= 0:
        raise ValueError("tf must be positive")
    if not omega0 > omegaf > 0:
        raise ValueError("need omega0 > omegaf > 0")
    if x_ref == 0:
        raise ValueError("x_ref = 0 has no avoided crossing; mu is undefined")
    return ControlSchedule("faquad", float(omega0), float(omegaf), float(tf), float(x_ref))


def perturbed_schedule(base: ControlSchedule, epsilon_ctrl: float) -> ControlSchedule:
    """Degraded control: the base faquad waveform plus epsilon times a
    linear ramp between the base endpoints.

    Evaluation gives Omega'(0) = (1 + eps) omega0 and Omega'(tf) =
    (1 + eps) omegaf, deliberately missing the stored design endpoints.
    """
    if base.kind != "faquad":
        raise ValueError("perturbation is defined relative to a faquad base")
    if epsilon_ctrl < 0:
        raise ValueError("epsilon_ctrl must be >= 0")
    return ControlSchedule(
        "perturbed",
        base.omega0,
        base.omegaf,
        base.tf,
        base.x_ref,
        float(epsilon_ctrl),
        base=base,
    )


def tabulated_schedule(ts, omegas) -> ControlSchedule:
    """Schedule defined by an ordered (t, Omega) table; linear interpolation."""
    ts = np.asarray(ts, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    if ts.ndim != 1 or ts.shape != omegas.shape or ts.size < 2:
        raise ValueError("need matching 1-d arrays with at least two samples")
    if not np.all(np.diff(ts) > 0) or ts[0] != 0:
        raise ValueError("sample times must start at 0 and increase strictly")
    return ControlSchedule(
        "tabulated",
        float(omegas[0]),
        float(omegas[-1]),
        float(ts[-1]),
        samples=(ts.copy(), omegas.copy()),
    )


@dataclass(frozen=True)
class EigenSystem:
    """Instantaneous eigensystem of H = -1/2 (Omega sx + x sz).

    ``phi0``/``phi1`` are real two-component vectors in the {|1>, |0>}
    ordering (coefficient of the active state first).  theta_bloch =
    arccos(-x / E) so the ground state tends to |1> as x -> +inf.
    """

    theta_bloch: float
    e0: float
    e1: float
    phi0: np.ndarray
    phi1: np.ndarray

    @property
    def gap(self) -> float:
        return self.e1 - self.e0


def eigensystem(omega: float, x: float) -> EigenSystem:
    """Diagonalize the two-level Hamiltonian at fixed (Omega, x)."""
    E = float(np.hypot(omega, x))
    if E == 0:
        raise ValueError("omega = x = 0 is degenerate; the gap closes")
    theta = float(np.arccos(np.clip(-x / E, -1.0, 1.0)))
    half = theta / 2.0
    phi0 = np.array([np.sin(half), np.cos(half)])
    phi1 = np.array([np.cos(half), -np.sin(half)])
    return EigenSystem(theta, -E / 2.0, E / 2.0, phi0, phi1)


def adiabatic_mu(schedule: ControlSchedule, x: float, t) -> float:
    """Adiabatic parameter mu(t) = |x dOmega/dt| / (2 (Omega^2 + x^2)^(3/2)).

    The ratio of the eigenstate rotation rate to the gap; small mu means
    adiabatic.  Vectorized over t.
    """
    om = schedule.omega(t)
    dom = schedule.domega(t)
    E = np.hypot(om, x)
    out = np.abs(x * dom) / (2.0 * E**3)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class AdiabaticDiagnostics:
    """Sampled adiabaticity trace and its rescaled constant c~ = c tf."""

    mu_trace: np.ndarray  # shape (n, 2): columns (t, mu)
    c_tilde: float


def adiabatic_diagnostics(schedule: ControlSchedule, x: float, n: int = 1000) -> AdiabaticDiagnostics:
    """Sample mu(t) on a uniform n-point grid.

    c_tilde is the trace mean times tf; for a faquad schedule evaluated at
    its design field the trace is constant and c_tilde is exact.
    """
    ts = np.linspace(0.0, schedule.tf, n)
    mus = adiabatic_mu(schedule, x, ts)
    return AdiabaticDiagnostics(np.column_stack([ts, mus]), float(np.mean(mus) * schedule.tf))


def faquad_constant_mu(omega0: float, omegaf: float, tf: float, x_ref: float) -> float:
    """Closed-form constant mu of the faquad ramp at its design field."""
    v0 = 1.0 / np.hypot(1.0, x_ref / omega0)
    vf = 1.0 / np.hypot(1.0, x_ref / omegaf)
    return float(abs(v0 - vf) / (2.0 * abs(x_ref) * tf))


def optimal_design_field(omegaf: float, omega0_ratio: float = 1e4) -> float:
    """Design field maximizing the faquad adiabaticity constant.

    Maximizes mu(x) = |v(omega0) - v(omegaf)| / (2 |x|) over x > 0 at fixed
    endpoints omega0 = omega0_ratio * omegaf, by bounded scalar search.  In
    the omega0 -> inf limit the maximum sits at sqrt((1 + sqrt 5)/2) times
    omegaf, about 1.272 omegaf: the input field the passage handles worst,
    hence the reference a single shared control is designed for.
    """
    if omegaf <= 0:
        raise ValueError("omegaf must be positive")
    if omega0_ratio <= 1:
        raise ValueError("omega0_ratio must exceed 1")
    om0 = omega0_ratio * omegaf

    def neg_mu(x):
        return -faquad_constant_mu(om0, omegaf, 1.0, x)

    res = minimize_scalar(
        neg_mu,
        bounds=(1e-3 * omegaf, 10.0 * omegaf),
        method="bounded",
        options={"xatol": 1e-12 * omegaf},
    )
    return float(res.x)


def schedule_to_csv(schedule: ControlSchedule, path_or_buf, n_samples: int = 1001) -> None:
    """Write the waveform as CSV with header ``t,omega``, increasing t."""
    if schedule.kind == "tabulated":
        ts, oms = schedule.samples
    else:
        ts = np.linspace(0.0, schedule.tf, n_samples)
        oms = schedule.omega(ts)
    own = isinstance(path_or_buf, (str, bytes, os.PathLike))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        wr = csv.writer(fh)
        wr.writerow(["t", "omega"])
        for t, om in zip(ts, oms):
            wr.writerow([repr(float(t)), repr(float(om))])
    finally:
        if own:
            fh.close()


def schedule_from_csv(path_or_buf) -> ControlSchedule:
    """Read a waveform written by schedule_to_csv as a tabulated schedule."""
    own = isinstance(path_or_buf, (str, bytes, os.PathLike))
    fh = open(path_or_buf, newline="") if own else path_or_buf
    try:
        rd = csv.reader(fh)
        header = next(rd)
        if [h.strip() for h in header] != ["t", "omega"]:
            raise ValueError(f"expected header 't,omega', got {header!r}")
        rows = [(float(a), float(b)) for a, b in rd]
    finally:
        if own:
            fh.close()
    ts = np.array([r[0] for r in rows])
    oms = np.array([r[1] for r in rows])
    return tabulated_schedule(ts, oms)
