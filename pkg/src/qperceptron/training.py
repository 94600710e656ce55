"""Classical training of perceptron networks.

Training never simulates the statevector: because forward(Ideal) equals the
classical mixture over hidden configurations exactly, the cost and its
analytic gradient are computed from that sum directly, vectorized over
(samples x configurations).  The gradient differentiates each gate through
the activation derivative per configuration; entries masked out by the
topology get an exactly-zero gradient.

The optimizer is plain gradient descent with a backtracking line search
(halve the step until the cost strictly decreases), restarted from seeded
random initializations; the best restart by final cost wins.  All sums are
fixed-order, so a fixed seed gives a bit-identical report.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .activation import df_dx, eval_f
from .network import NetworkSpec, forward, network_to_json
from .register import QuantumRegister, apply_ideal_perceptron, conditional_probability

__all__ = [
    "Dataset",
    "TrainConfig",
    "TrainReport",
    "prime_dataset",
    "cross_entropy_cost",
    "cost_gradient",
    "train",
    "batch_state_forward",
    "dataset_to_csv",
    "dataset_from_csv",
    "report_to_json",
]

_CLAMP = 1e-12
_GRAD_TOL = 1e-8
_COST_TOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    """Labeled bitstrings; labels are target probabilities in [0, 1]."""

    n_bits: int
    pairs: Tuple[Tuple[str, float], ...]

    def __post_init__(self):
        pairs = tuple((str(x), float(y)) for x, y in self.pairs)
        if not pairs:
            raise ValueError("dataset must hold at least one pair")
        seen = set()
        for x, y in pairs:
            if len(x) != self.n_bits or set(x) - {"0", "1"}:
                raise ValueError(f"input {x!r} is not a {self.n_bits}-bit string")
            if x in seen:
                raise ValueError(f"duplicate input {x!r}")
            if not (0.0 <= y <= 1.0):
                raise ValueError("labels must lie in [0, 1]")
            seen.add(x)
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return len(self.pairs)


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


def prime_dataset(n_bits: int) -> Dataset:
    """Every n-bit integer labeled 1 iff prime (deliberately overfit toy)."""
    if not (2 <= n_bits <= 8):
        raise ValueError("n_bits must be in [2, 8]")
    pairs = [
        (format(m, f"0{n_bits}b"), 1.0 if _is_prime(m) else 0.0)
        for m in range(1 << n_bits)
    ]
    return Dataset(n_bits, tuple(pairs))


class _MixtureEngine:
    """Dataset-wide mixture sums for one topology.

    Precomputes the (samples, configurations, qubits) source tensor once;
    each cost/gradient evaluation is then a handful of dense array ops.
    """

    def __init__(self, net: NetworkSpec, dataset: Dataset):
        if net.activation.variant == "step":
            raise ValueError("step activation is not differentiable; cannot train")
        if dataset.n_bits != net.n_inputs:
            raise ValueError("dataset width must match the network inputs")
        self.net = net
        N, M, n = net.n_inputs, net.n_hidden, net.n_total
        S, C = dataset.size, 1 << M
        cfg = np.arange(C)
        self.Z = 2.0 * ((cfg[:, None] >> np.arange(M)[None, :]) & 1) - 1.0
        V = np.empty((S, C, n))
        for i, (x, _) in enumerate(dataset.pairs):
            V[i, :, :N] = 2.0 * np.array([int(c) for c in x]) - 1.0
        V[:, :, N : N + M] = self.Z[None, :, :]
        V[:, :, n - 1] = 0.0
        self.V = V
        self.Y = np.array([y for _, y in dataset.pairs])
        self.N, self.M, self.n, self.S, self.C = N, M, n, S, C

    def probabilities(self, J: np.ndarray, b: np.ndarray):
        net = self.net
        W = net.mask * J
        X = self.V @ W.T - b
        kind = net.activation
        N, M = self.N, self.M
        f_hid = eval_f(kind, X[:, :, N : N + M])
        bern = np.where(self.Z[None] > 0, f_hid, 1.0 - f_hid)
        P = np.prod(bern, axis=2) if M else np.ones((self.S, self.C))
        f_out = eval_f(kind, X[:, :, -1])
        p = np.einsum("sc,sc->s", P, f_out)
        return p, (X, f_hid, bern, P, f_out)

    def cost(self, J, b, want_grad=False):
        p, (X, f_hid, bern, P, f_out) = self.probabilities(J, b)
        pc = np.clip(p, _CLAMP, 1.0 - _CLAMP)
        Y = self.Y
        cost = float(-np.mean(Y * np.log(pc) + (1.0 - Y) * np.log(1.0 - pc)))
        if not want_grad:
            return cost, p, None, None
        kind = self.net.activation
        N, M, n = self.N, self.M, self.n
        wvec = (pc - Y) / (pc * (1.0 - pc)) / self.S  # dC/dp per sample
        dfo = df_dx(kind, X[:, :, -1])
        dJ = np.zeros((n, n))
        db = np.zeros(n)
        out_fac = P * dfo  # (S, C)
        dJ[n - 1] = np.einsum("s,sc,sck->k", wvec, out_fac, self.V)
        db[n - 1] = -float(np.einsum("s,sc->", wvec, out_fac))
        if M:
            dfh = df_dx(kind, X[:, :, N : N + M])
            with np.errstate(divide="ignore", invalid="ignore"):
                G = np.where(bern > 0, self.Z[None] * dfh / bern, 0.0)
            T = G * (P * f_out)[:, :, None]  # (S, C, M)
            dJ[N : N + M] = np.einsum("s,scm,sck->mk", wvec, T, self.V)
            db[N : N + M] = -np.einsum("s,scm->m", wvec, T)
        dJ *= self.net.mask
        return cost, p, dJ, db


def cross_entropy_cost(net: NetworkSpec, dataset: Dataset, schedule=None) -> float:
    """Mean binary cross entropy of the network on the dataset.

    Probabilities are clamped to [1e-12, 1 - 1e-12] inside the logs.  With
    a schedule the forward passes run in hardware mode (slow; no gradients).
    """
    if schedule is not None:
        ps = np.array([forward(net, x, schedule)[1] for x, _ in dataset.pairs])
        Y = np.array([y for _, y in dataset.pairs])
        pc = np.clip(ps, _CLAMP, 1.0 - _CLAMP)
        return float(-np.mean(Y * np.log(pc) + (1.0 - Y) * np.log(1.0 - pc)))
    eng = _MixtureEngine(net, dataset)
    return eng.cost(net.J, net.b)[0]


def cost_gradient(net: NetworkSpec, dataset: Dataset):
    """Analytic (dJ, db) of the cross entropy; masked entries are exactly 0."""
    eng = _MixtureEngine(net, dataset)
    _, _, dJ, db = eng.cost(net.J, net.b, want_grad=True)
    return dJ, db


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2.0
    max_iters: int = 2000
    seed: int = 0
    init_scale: float = 0.5
    restarts: int = 10
    target_cost: float = 0.02

    def __post_init__(self):
        if not (self.learning_rate > 0):
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 0 or self.restarts < 0:
            raise ValueError("max_iters and restarts must be nonnegative")


@dataclass(frozen=True)
class TrainReport:
    cost_trace: Tuple[float, ...]
    final_params: NetworkSpec
    accuracy: float


def _accuracy(p: np.ndarray, Y: np.ndarray) -> float:
    return float(np.mean((p >= 0.5) == (Y >= 0.5)))


def _descend(eng: _MixtureEngine, J, b, config: TrainConfig):
    cost, p, dJ, db = eng.cost(J, b, want_grad=True)
    trace = [cost]
    for _ in range(config.max_iters):
        if not np.isfinite(cost):
            break
        if cost <= _COST_TOL:
            break
        gmax = max(float(np.max(np.abs(dJ))), float(np.max(np.abs(db))))
        if gmax <= _GRAD_TOL:
            break
        step = config.learning_rate
        for _halving in range(30):
            J2 = J - step * dJ
            b2 = b - step * db
            c2 = eng.cost(J2, b2)[0]
            if np.isfinite(c2) and c2 < cost:
                break
            step *= 0.5
        else:
            break  # no descent direction at any feasible step
        J, b = J2, b2
        cost, p, dJ, db = eng.cost(J, b, want_grad=True)
        trace.append(cost)
    return J, b, trace, p


def train(net0: NetworkSpec, dataset: Dataset, config: TrainConfig) -> TrainReport:
    """Best-of-restarts gradient descent from seeded random initializations.

    Restart 0 starts from net0's own parameters; later restarts draw J and b
    uniformly from [-init_scale, init_scale] on the masked-in entries.
    Stops early once a restart classifies every sample correctly with cost
    at or below config.target_cost.
    """
    eng = _MixtureEngine(net0, dataset)
    mask = net0.mask
    n = net0.n_total
    best = None
    for r in range(config.restarts + 1):
        if r == 0:
            J0, b0 = np.array(net0.J), np.array(net0.b)
        else:
            rng = np.random.default_rng(config.seed + r)
            J0 = mask * rng.uniform(-config.init_scale, config.init_scale, (n, n))
            b0 = np.zeros(n)
            b0[net0.n_inputs :] = rng.uniform(
                -config.init_scale, config.init_scale, n - net0.n_inputs
            )
        J, b, trace, p = _descend(eng, J0, b0, config)
        if not np.isfinite(trace[-1]):
            continue
        acc = _accuracy(p, eng.Y)
        if best is None or trace[-1] < best[0]:
            best = (trace[-1], trace, J, b, acc)
        if acc == 1.0 and trace[-1] <= config.target_cost:
            break
    if best is None:
        raise RuntimeError("every restart diverged to a non-finite cost")
    _, trace, J, b, acc = best
    net = NetworkSpec(
        net0.n_inputs, net0.layer_sizes, net0.mask, J, b, net0.activation
    )
    return TrainReport(tuple(float(c) for c in trace), net, acc)


def batch_state_forward(net: NetworkSpec, dataset: Dataset) -> List[float]:
    """One pass over the equal-weight superposition of all dataset inputs.

    Builds |xi> = S^(-1/2) sum_i |X_i, 0...0>, applies the whole circuit
    once, and reads each p(X_i) back as a conditional probability on the
    input qubits.  Equals per-input forward passes because the gates never
    rotate input qubits.
    """
    if dataset.n_bits != net.n_inputs:
        raise ValueError("dataset width must match the network inputs")
    if dataset.size > (1 << net.n_inputs):
        raise ValueError("more samples than distinct input states")
    pad = net.n_total - net.n_inputs
    amps = np.zeros(1 << net.n_total, dtype=complex)
    r = 1.0 / np.sqrt(dataset.size)
    for x, _ in dataset.pairs:
        amps[int(x + "0" * pad, 2)] = r
    reg = QuantumRegister(net.n_total, amps)
    for gate in net.gates():
        reg = apply_ideal_perceptron(reg, gate)
    inputs = list(range(net.n_inputs))
    out = net.n_total - 1
    return [
        conditional_probability(reg, inputs, [int(c) for c in x], out)
        for x, _ in dataset.pairs
    ]


def dataset_to_csv(dataset: Dataset, path_or_buf) -> None:
    """CSV with header ``x_bits,y``; bitstrings kept as text."""

    def emit(fh):
        fh.write("x_bits,y\n")
        for x, y in dataset.pairs:
            fh.write(f"{x},{float(y)!r}\n")

    if isinstance(path_or_buf, (str, bytes, os.PathLike)):
        with open(path_or_buf, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_buf)


def dataset_from_csv(path_or_buf) -> Dataset:
    def parse(fh):
        header = fh.readline().strip()
        if header.replace(" ", "") != "x_bits,y":
            raise ValueError(f"expected 'x_bits,y' header, got {header!r}")
        pairs = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            x, y = line.split(",")
            pairs.append((x.strip(), float(y)))
        if not pairs:
            raise ValueError("empty dataset file")
        return Dataset(len(pairs[0][0]), tuple(pairs))

    if isinstance(path_or_buf, (str, bytes, os.PathLike)):
        with open(path_or_buf, "r", encoding="utf-8") as fh:
            return parse(fh)
    return parse(path_or_buf)


def report_to_json(report: TrainReport) -> str:
    return json.dumps(
        {
            "cost_trace": list(report.cost_trace),
            "accuracy": report.accuracy,
            "params": json.loads(network_to_json(report.final_params)),
        }
    )
