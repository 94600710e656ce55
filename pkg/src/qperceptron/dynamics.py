"""Time-dependent dynamics of the driven two-level perceptron.

Integrates i d(psi)/dt = -1/2 [Omega(t) sx + x sz] psi (hbar = 1, basis
(amp0, amp1), sz = diag(-1, +1)) by composing exact 2x2 step propagators
with the Hamiltonian sampled at step midpoints.  Each step propagator is an
SU(2) element stored as a real quaternion (a, bx, by, bz) representing
a + i (bx sx + by sy + bz sz); step products are quaternion products taken
in a fixed pairwise tree, which regroups but never reorders the time-ordered
product.  Unitarity is exact up to roundoff, so the norm is conserved to
~1e-13 even over 1e7 steps.

Step-size policy: the base grid obeys dt <= min(0.01 / sqrt(Omega^2 +
x_max^2), tf / 1000) plus a relative-slope cap dt <= 0.002 |Omega / dOmega|
that resolves the near-vertical start of constant-adiabaticity ramps; the
grid is then midpoint-halved until the requested quantity converges.
Single-state evolutions converge the final amplitudes to 1e-9; grid sweeps
(response curves, fidelity averages) converge every reported probability
to 1e-8.

Evolutions for distinct x values are an independent vectorized map over one
shared time grid; reductions over the x grid (the fidelity trapezoid) are
fixed-order and bitwise reproducible.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .control import eigensystem, faquad_schedule, linear_schedule, optimal_design_field

__all__ = [
    "TwoLevelState",
    "FidelityReport",
    "evolve_two_level",
    "schedule_propagators",
    "perceptron_protocol",
    "response_curve",
    "average_fidelity",
    "benchmark_ramps",
    "fit_infidelity_decay",
    "reversed_negated",
    "response_to_csv",
    "report_to_csv",
    "fit_constants_json",
]

_MAX_HALVINGS = 16


@dataclass(frozen=True)
class TwoLevelState:
    """Amplitudes on the resting state |0> and the active state |1>."""

    amp0: complex
    amp1: complex

    @staticmethod
    def ground() -> "TwoLevelState":
        return TwoLevelState(1.0 + 0j, 0.0 + 0j)

    @staticmethod
    def plus() -> "TwoLevelState":
        r = 1.0 / math.sqrt(2.0)
        return TwoLevelState(complex(r), complex(r))

    @property
    def p_excite(self) -> float:
        return abs(self.amp1) ** 2

    def norm(self) -> float:
        return math.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2)


class _ReversedNegated:
    """Adapter evaluating Omega'(t) = -Omega(tf - t) of a base schedule."""

    def __init__(self, base):
        self.base = base
        self.tf = base.tf
        self.kind = "reversed"

    def omega(self, t):
        return -self.base.omega(self.tf - np.asarray(t, dtype=float))

    def domega(self, t):
        return self.base.domega(self.tf - np.asarray(t, dtype=float))


def reversed_negated(schedule) -> _ReversedNegated:
    """Time-reversed, sign-flipped drive.

    Evolving with this schedule and the longitudinal field negated undoes
    the original evolution exactly: both fields must flip so that H'(t) =
    -H(tf - t), which turns the time-ordered product into its inverse.
    """
    return _ReversedNegated(schedule)


def _validate_schedule(schedule):
    tf = getattr(schedule, "tf", None)
    if tf is None or not (tf > 0) or not callable(getattr(schedule, "omega", None)):
        raise ValueError("invalid schedule: needs tf > 0 and omega(t)")


class _GridSpec:
    """Step-edge generator for one schedule: edges are never all in memory.

    The base grid is equidistributed (edges at uniform quantiles of the
    integrated step-rate); halving level L subdivides every base interval
    into 2**L equal steps, which is what repeated midpoint insertion
    produces. ``edge_block`` regenerates any contiguous run of edges from
    the (small) probe-grid quantile table, so a ramp needing 1e8 steps
    costs chunk-sized arrays instead of the full grid.
    """

    __slots__ = ("tf", "probe", "cum", "n")

    def __init__(self, tf, probe, cum, n):
        self.tf = tf
        self.probe = probe
        self.cum = cum
        self.n = n

    def steps(self, level: int) -> int:
        return self.n << level

    def edge_block(self, level: int, lo: int, hi: int) -> np.ndarray:
        """Edges for global step-edge indices lo..hi (inclusive) at a level."""
        n, tf = self.n, self.tf
        idx = np.arange(lo, hi + 1, dtype=np.int64)
        j = np.minimum(idx >> level, n - 1)
        frac = (idx - (j << level)).astype(float) * (0.5 ** level)
        jlo = int(j[0])
        jhi = int(j[-1]) + 1
        step = self.cum[-1] / n
        q = np.arange(jlo, jhi + 1, dtype=float) * step
        base = np.interp(q, self.cum, self.probe)
        if jlo == 0:
            base[0] = 0.0
        if jhi == n:
            base[-1] = tf
        left = base[j - jlo]
        out = left + (base[j - jlo + 1] - left) * frac
        if lo == 0:
            out[0] = 0.0
        if hi == (n << level):
            out[-1] = tf
        return out


def _grid_spec(schedule, x_absmax: float) -> _GridSpec:
    """Base grid honoring the step-size policy.

    The local step-rate r(t) = max of the three dt-rule reciprocals is
    accumulated on a dense probe grid, edges go at uniform quantiles of its
    integral, and the result is verified (in bounded blocks) against the dt
    rules evaluated conservatively at step endpoints.
    """
    tf = schedule.tf
    # probe grid: uniform body plus geometric head to resolve steep starts
    probe = np.unique(np.concatenate([
        np.linspace(0.0, tf, 4097),
        tf * np.geomspace(1e-9, 1.0, 2049),
        [0.0],
    ]))
    for _ in range(8):
        om = np.asarray(schedule.omega(probe), dtype=float)
        try:
            dom = np.asarray(schedule.domega(probe), dtype=float)
        except Exception:
            dom = np.gradient(om, probe)
        rate = np.hypot(om, x_absmax) / 0.01
        rate = np.maximum(rate, 1000.0 / tf)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(np.abs(om) > 0, np.abs(dom) / np.abs(om) / 0.002, 0.0)
        rate = np.maximum(rate, slope)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(probe) * (rate[1:] + rate[:-1]) / 2.0)])
        n = int(math.ceil(cum[-1] * 1.05)) + 1
        spec = _GridSpec(tf, probe, cum, n)
        # conservative check: dt against the rule at the worse endpoint
        cap = tf / 1000.0
        ok = True
        for lo in range(0, n, 1 << 20):
            hi = min(lo + (1 << 20), n)
            edges = spec.edge_block(0, lo, hi)
            e_end = np.hypot(np.asarray(schedule.omega(edges), dtype=float), x_absmax)
            bound = 0.01 / np.maximum(e_end[1:], e_end[:-1])
            if not np.all(np.diff(edges) <= np.minimum(bound, cap) * (1 + 1e-9)):
                ok = False
                break
        if ok:
            return spec
        probe = np.unique(np.concatenate([probe, (probe[1:] + probe[:-1]) / 2.0]))
    raise RuntimeError("step-grid construction did not satisfy the dt rule")


def _qmul(a1, x1, y1, z1, a2, x2, y2, z2):
    # (a1 + i b1.s)(a2 + i b2.s) = a1 a2 - b1.b2 + i (a1 b2 + a2 b1 - b1 x b2).s
    a = a1 * a2 - x1 * x2 - y1 * y2 - z1 * z2
    x = a1 * x2 + a2 * x1 - (y1 * z2 - z1 * y2)
    y = a1 * y2 + a2 * y1 - (z1 * x2 - x1 * z2)
    z = a1 * z2 + a2 * z1 - (x1 * y2 - y1 * x2)
    return a, x, y, z

_CHUNK = 1 << 14


def _propagate(schedule, xs: np.ndarray, spec: _GridSpec, level: int):
    """Total propagator quaternion over the level-`level` grid for each x."""
    n = spec.steps(level)
    cols = xs.shape[0]
    A = np.ones(cols)
    BX = np.zeros(cols)
    BY = np.zeros(cols)
    BZ = np.zeros(cols)
    for start in range(0, n, _CHUNK):
        ts = spec.edge_block(level, start, min(start + _CHUNK, n))
        dts = np.diff(ts)
        tmid = (ts[1:] + ts[:-1]) / 2.0
        om = np.broadcast_to(
            np.asarray(schedule.omega(tmid), dtype=float), tmid.shape
        )[:, None]
        dt = dts[:, None]
        E = np.hypot(om, xs[None, :])
        # gap bound: sqrt(Omega^2 + x^2) >= |Omega| along the whole run
        assert np.all(E >= np.abs(om))
        phi = E * (dt / 2.0)
        s = np.sin(phi) / E
        a = np.cos(phi)
        bx = s * om
        bz = s * xs[None, :]
        m = a.shape[0]
        if m & (m - 1):  # pad to a power of two with identity steps
            pad = 1 << (m - 1).bit_length()
            ap = np.ones((pad, cols))
            bxp = np.zeros((pad, cols))
            bzp = np.zeros((pad, cols))
            ap[:m], bxp[:m], bzp[:m] = a, bx, bz
            a, bx, bz = ap, bxp, bzp
        by = np.zeros_like(a)
        while a.shape[0] > 1:
            # later step on the left: pair (2j, 2j+1) -> q[2j+1] * q[2j]
            a, bx, by, bz = _qmul(
                a[1::2], bx[1::2], by[1::2], bz[1::2],
                a[0::2], bx[0::2], by[0::2], bz[0::2],
            )
        A, BX, BY, BZ = _qmul(a[0], bx[0], by[0], bz[0], A, BX, BY, BZ)
    return A, BX, BY, BZ


def _apply(q, psi0: TwoLevelState) -> np.ndarray:
    """Amplitude pairs U psi0; U = a + i(bx sx + by sy + bz sz) with
    sz = diag(-1, +1), sy = [[0, -i], [i, 0]] in the (|0>, |1>) ordering."""
    a, bx, by, bz = q
    p0, p1 = complex(psi0.amp0), complex(psi0.amp1)
    out0 = (a - 1j * bz) * p0 + (1j * bx - by) * p1
    out1 = (1j * bx + by) * p0 + (a + 1j * bz) * p1
    return np.stack([out0, out1], axis=-1)


def _converged_sweep(schedule, xs, psi0, reduce_fn, tol):
    """Halve the grid until reduce_fn's output moves less than tol.

    reduce_fn maps the (n_x, 2) final-amplitude array to a float array;
    convergence is max-abs change between consecutive halvings.
    """
    spec = _grid_spec(schedule, float(np.max(np.abs(xs))) if xs.size else 0.0)
    fin = _apply(_propagate(schedule, xs, spec, 0), psi0)
    cur = reduce_fn(fin)
    for level in range(1, _MAX_HALVINGS + 1):
        fin = _apply(_propagate(schedule, xs, spec, level), psi0)
        nxt = reduce_fn(fin)
        delta = float(np.max(np.abs(nxt - cur))) if np.size(nxt) else 0.0
        cur = nxt
        if delta < tol:
            return fin, cur
    raise RuntimeError(f"integration did not converge to {tol} in {_MAX_HALVINGS} halvings")


def schedule_propagators(schedule, x_values, tol: float = 1e-9) -> np.ndarray:
    """Full 2x2 propagators of the ramp for each longitudinal field.

    Returns an (n, 2, 2) complex array of unitaries U(x) sharing one time
    grid sized for max |x|, halved until every matrix entry changes by less
    than ``tol``.  This is the sector workhorse for register gates, where
    each source configuration pins its own x.
    """
    _validate_schedule(schedule)
    xs = np.asarray(x_values, dtype=float)
    if xs.size == 0:
        return np.empty((0, 2, 2), dtype=complex)
    if not np.all(np.isfinite(xs)):
        raise ValueError("x values must be finite")
    spec = _grid_spec(schedule, float(np.max(np.abs(xs))))
    q = _propagate(schedule, xs, spec, 0)
    for level in range(1, _MAX_HALVINGS + 1):
        q2 = _propagate(schedule, xs, spec, level)
        delta = max(float(np.max(np.abs(b - a))) for a, b in zip(q, q2))
        q = q2
        if delta < tol:
            a, bx, by, bz = q
            U = np.empty((xs.size, 2, 2), dtype=complex)
            U[:, 0, 0] = a - 1j * bz
            U[:, 0, 1] = 1j * bx - by
            U[:, 1, 0] = 1j * bx + by
            U[:, 1, 1] = a + 1j * bz
            return U
    raise RuntimeError(f"integration did not converge to {tol} in {_MAX_HALVINGS} halvings")


def evolve_two_level(schedule, x: float, psi0: TwoLevelState, tol: float = 1e-9) -> TwoLevelState:
    """Integrate the driven qubit from t = 0 to tf.

    The step grid is halved until the final amplitudes change by less than
    ``tol`` (default 1e-9).  Norm is conserved to ~1e-13.
    """
    _validate_schedule(schedule)
    if abs(psi0.norm() - 1.0) > 1e-10:
        raise ValueError("psi0 must be normalized")
    xs = np.array([float(x)])
    fin, _ = _converged_sweep(
        schedule, xs, psi0, lambda f: np.concatenate([f.real, f.imag], axis=None), tol
    )
    return TwoLevelState(complex(fin[0, 0]), complex(fin[0, 1]))


def perceptron_protocol(schedule, x: float) -> TwoLevelState:
    """Full gate protocol: Hadamard from |0> to |+>, then the driven ramp.

    The final state approximates the instantaneous ground state at
    (omegaf, x), whose excitation probability is the algebraic sigmoid.
    """
    return evolve_two_level(schedule, x, TwoLevelState.plus())


def response_curve(schedule, x_grid, ptol: float = 1e-8):
    """Excitation probability of the protocol across a field grid.

    Returns a list of (x, P_excite) pairs.  All x values share one time
    grid sized for max |x|; the grid is halved until every probability
    moves less than ``ptol``.
    """
    _validate_schedule(schedule)
    xs = np.asarray(x_grid, dtype=float)
    if xs.size == 0:
        return []
    if not np.all(np.isfinite(xs)):
        raise ValueError("x grid must be finite")
    fin, P = _converged_sweep(
        schedule, xs, TwoLevelState.plus(), lambda f: np.abs(f[:, 1]) ** 2, ptol
    )
    return list(zip(xs.tolist(), P.tolist()))


def _ground_amplitudes(omegaf: float, xs: np.ndarray):
    """Target ground-state amplitude pairs (amp0, amp1) at the final field."""
    g0 = np.empty(xs.size)
    g1 = np.empty(xs.size)
    for i, x in enumerate(xs):
        es = eigensystem(omegaf, float(x))
        g1[i], g0[i] = es.phi0  # phi0 is ordered {|1>, |0>}
    return g0, g1


def average_fidelity(schedule, x_max: float = 10.0, n_points: int = 201, ptol: float = 1e-8) -> float:
    """Mean squared overlap with the target ground state over the field range.

    F = (1 / 2 x_max) * integral of |<target(x) | psi(tf, x)>|^2 dx,
    trapezoid on a uniform n-point grid, so F is in [0, 1].  The target at
    each x is the ground state at the schedule's design omegaf.
    """
    _validate_schedule(schedule)
    if not (x_max > 0) or n_points < 2:
        raise ValueError("need x_max > 0 and n_points >= 2")
    xs = np.linspace(-x_max, x_max, n_points)
    g0, g1 = _ground_amplitudes(schedule.omegaf, xs)

    def overlaps(fin):
        return np.abs(g0 * fin[:, 0] + g1 * fin[:, 1]) ** 2

    _, ov = _converged_sweep(schedule, xs, TwoLevelState.plus(), overlaps, ptol)
    # fixed-order trapezoid; uniform grid
    dx = xs[1] - xs[0]
    integral = (float(np.sum(ov)) - 0.5 * (ov[0] + ov[-1])) * dx
    return float(integral / (2.0 * x_max))


@dataclass(frozen=True)
class FidelityReport:
    """Benchmark curves for the two ramp families plus the decay fit."""

    tf_grid: np.ndarray
    infidelity_linear: np.ndarray
    infidelity_faquad: np.ndarray
    fit_c0: float
    fit_c1: float
    fit_c2: float


def fit_infidelity_decay(tf_grid, infidelity):
    """Least-squares fit of log infidelity to log(c0) - c1 * tf^c2.

    Points at or below the 1e-12 numerical floor are excluded; fewer than
    4 usable points is a fit failure (ValueError).  Returns (c0, c1, c2).
    """
    tf = np.asarray(tf_grid, dtype=float)
    infid = np.asarray(infidelity, dtype=float)
    use = infid > 1e-12
    if int(np.sum(use)) < 4:
        raise ValueError("fit failure: fewer than 4 usable infidelity points")
    lt = np.log(tf[use])
    li = np.log(infid[use])

    def scan_best():
        best = None
        for c2 in np.linspace(0.02, 0.8, 157):
            A = np.stack([np.ones_like(lt), -np.exp(c2 * lt)], axis=1)
            coef, *_ = np.linalg.lstsq(A, li, rcond=None)
            if coef[1] <= 0:
                continue
            r = li - A @ coef
            ss = float(r @ r)
            if best is None or ss < best[0]:
                best = (ss, coef[0], coef[1], c2)
        if best is None:
            raise ValueError("fit failure: no decreasing-exponential fit found")
        return best

    _, lc0, c1, c2 = scan_best()
    try:
        popt, _ = curve_fit(
            lambda t, a, b, c: a - b * t**c,
            np.exp(lt), li, p0=[lc0, c1, c2], maxfev=20000,
        )
        if popt[1] > 0 and popt[2] > 0:
            lc0, c1, c2 = popt
    except Exception:
        pass  # keep the scan optimum
    return float(np.exp(lc0)), float(c1), float(c2)


def benchmark_ramps(
    tf_grid,
    x_max: float = 10.0,
    n_points: int = 201,
    omega0: float = 100.0,
    omegaf: float = 1.0,
    x_ref: float = None,
    ptol: float = 1e-8,
) -> FidelityReport:
    """Average infidelity of linear vs faquad ramps across durations.

    Builds both schedules at each tf with shared endpoints, evaluates
    1 - average_fidelity, and fits the faquad curve's stretched-exponential
    decay.  tf_grid must be strictly increasing.
    """
    tf = np.asarray(tf_grid, dtype=float)
    if tf.size == 0 or np.any(np.diff(tf) <= 0) or np.any(tf <= 0):
        raise ValueError("tf_grid must be nonempty, positive, strictly increasing")
    if x_ref is None:
        x_ref = optimal_design_field(omegaf)
    inf_lin = np.empty(tf.size)
    inf_faq = np.empty(tf.size)
    for i, t in enumerate(tf):
        inf_lin[i] = 1.0 - average_fidelity(linear_schedule(omega0, omegaf, t), x_max, n_points, ptol)
        inf_faq[i] = 1.0 - average_fidelity(faquad_schedule(omega0, omegaf, t, x_ref), x_max, n_points, ptol)
    c0, c1, c2 = fit_infidelity_decay(tf, inf_faq)
    return FidelityReport(tf, inf_lin, inf_faq, c0, c1, c2)


def _write_rows(path_or_buf, header, rows):
    def emit(fh):
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")

    if isinstance(path_or_buf, (str, bytes, os.PathLike)):
        with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_buf)


def response_to_csv(pairs, path_or_buf) -> None:
    """Write a response curve as CSV with header ``x,p_excite``."""
    _write_rows(path_or_buf, "x,p_excite", pairs)


def report_to_csv(report: FidelityReport, path_or_buf) -> None:
    """Write a benchmark report as CSV, header ``tf,infid_linear,infid_faquad``."""
    rows = zip(report.tf_grid, report.infidelity_linear, report.infidelity_faquad)
    _write_rows(path_or_buf, "tf,infid_linear,infid_faquad", rows)


def fit_constants_json(report: FidelityReport) -> str:
    """The report's decay-fit constants as a JSON object {c0, c1, c2}."""
    return json.dumps(
        {"c0": report.fit_c0, "c1": report.fit_c1, "c2": report.fit_c2}
    )
