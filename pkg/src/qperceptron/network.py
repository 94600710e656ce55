"""Feed-forward networks of perceptron gates on one register.

A network is a register of N input qubits, hidden perceptron qubits and one
output perceptron, wired by a binary mask over a global qubit ordering
(inputs first, hidden layers in order, output last).  The mask is strictly
lower triangular: a perceptron may source only strictly earlier qubits, so
the circuit is feed-forward and every qubit is targeted at most once.
Effective weights are mask * J.

Because all gate controls are diagonal and no qubit is ever re-targeted,
measuring the hidden qubits is never needed: the output excitation of the
quantum circuit equals a classical mixture over hidden configurations
(classical_mixture_oracle), which is the identity the training module's
gradients are built on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .activation import ALGEBRAIC, ActivationKind, cao_arctan, df_dx, eval_f
from .register import (
    PerceptronGateSpec,
    QuantumRegister,
    apply_hardware_perceptron,
    apply_ideal_perceptron,
    excitation_probability,
    init_basis,
)

__all__ = [
    "NetworkSpec",
    "ApproximatorSpec",
    "forward",
    "classical_mixture_oracle",
    "build_universal_approximator",
    "approximator_readout",
    "layered_network",
    "layer_hamiltonian_forward",
    "protocol_duration",
    "network_to_json",
    "network_from_json",
]


@dataclass(frozen=True)
class NetworkSpec:
    """Topology, weights and activation of one feed-forward network."""

    n_inputs: int
    layer_sizes: Sequence[int]
    mask: np.ndarray
    J: np.ndarray
    b: np.ndarray
    activation: ActivationKind = ALGEBRAIC

    def __post_init__(self):
        n = self.n_total
        if self.n_inputs < 1:
            raise ValueError("need at least one input")
        sizes = list(self.layer_sizes)
        if not sizes or any(int(m) < 1 for m in sizes) or int(sizes[-1]) != 1:
            raise ValueError("layer_sizes must be nonempty, positive, ending in 1 output")
        mask = np.asarray(self.mask, dtype=float)
        J = np.asarray(self.J, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if mask.shape != (n, n) or J.shape != (n, n) or b.shape != (n,):
            raise ValueError("mask/J must be (n_total, n_total) and b (n_total,)")
        if not np.all((mask == 0) | (mask == 1)):
            raise ValueError("mask must be binary")
        if np.any(np.triu(mask) != 0):
            raise ValueError("mask must be strictly lower triangular (feed-forward)")
        if np.any(mask[: self.n_inputs]) or np.any(b[: self.n_inputs] != 0):
            raise ValueError("input qubits carry no gate: their mask rows and biases must be 0")
        for arr in (mask, J, b):
            arr.flags.writeable = False
        object.__setattr__(self, "layer_sizes", tuple(int(m) for m in sizes))
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "b", b)

    @property
    def n_total(self) -> int:
        return self.n_inputs + sum(int(m) for m in self.layer_sizes)

    @property
    def n_hidden(self) -> int:
        return self.n_total - self.n_inputs - 1

    def effective_weights(self) -> np.ndarray:
        return self.mask * self.J

    def gates(self, schedule=None):
        """Perceptron gates in global qubit order."""
        W = self.effective_weights()
        out = []
        for j in range(self.n_inputs, self.n_total):
            srcs = {int(k): float(W[j, k]) for k in np.nonzero(self.mask[j])[0]}
            out.append(
                PerceptronGateSpec(
                    target=j, weights=srcs, bias=float(self.b[j]),
                    activation=self.activation, schedule=schedule,
                )
            )
        return out

    def layer_of(self, qubit: int) -> int:
        """Layer index: 0 for inputs, then 1..L."""
        if qubit < self.n_inputs:
            return 0
        edge = self.n_inputs
        for ell, m in enumerate(self.layer_sizes, start=1):
            edge += m
            if qubit < edge:
                return ell
        raise IndexError(f"qubit {qubit} out of range")


def _check_bits(net: NetworkSpec, input_bits: str):
    if len(input_bits) != net.n_inputs or set(input_bits) - {"0", "1"}:
        raise ValueError("input_bits must be a 0/1 string of length n_inputs")


def layered_network(
    n_inputs: int,
    hidden_sizes: Sequence[int],
    activation: ActivationKind = ALGEBRAIC,
) -> NetworkSpec:
    """Fully connected layer-to-layer topology with zero weights and biases.

    Each layer sources every qubit of the previous layer only; a final
    single-perceptron output layer is appended.
    """
    sizes = tuple(int(m) for m in hidden_sizes) + (1,)
    if any(m < 1 for m in sizes):
        raise ValueError("layer sizes must be positive")
    n = n_inputs + sum(sizes)
    mask = np.zeros((n, n))
    prev = list(range(n_inputs))
    q = n_inputs
    for width in sizes:
        cur = list(range(q, q + width))
        for t in cur:
            for s in prev:
                mask[t, s] = 1.0
        prev = cur
        q += width
    return NetworkSpec(n_inputs, sizes, mask, np.zeros((n, n)), np.zeros(n), activation)


def forward(net: NetworkSpec, input_bits: str, schedule=None):
    """Run the circuit on |input_bits, 0...0>.

    Ideal gates when ``schedule`` is None, hardware gates otherwise.
    Returns (final register, output excitation probability).
    """
    _check_bits(net, input_bits)
    reg = init_basis(net.n_total, input_bits + "0" * (net.n_total - net.n_inputs))
    for gate in net.gates(schedule):
        if schedule is None:
            reg = apply_ideal_perceptron(reg, gate)
        else:
            reg = apply_hardware_perceptron(reg, gate)
    return reg, excitation_probability(reg, net.n_total - 1)


def _mixture_tables(net: NetworkSpec, input_bits: str):
    """All hidden configurations at once, vectorized.

    Returns (P, f_out): branch probabilities and output activation per
    hidden configuration, each of length 2**n_hidden.  Source values enter
    as sz eigenvalues: inputs fixed at +/-1 by the bits, hidden at +/-1 by
    the configuration, output column zeroed (nothing sources the output).
    """
    _check_bits(net, input_bits)
    M = net.n_hidden
    N = net.n_inputs
    cfg = np.arange(1 << M)
    # hidden qubit h (global index N+h) -> column of +/-1 values
    Z = 2.0 * ((cfg[:, None] >> np.arange(M)[None, :]) & 1) - 1.0
    V = np.empty(((1 << M), net.n_total))
    V[:, :N] = 2.0 * np.array([int(c) for c in input_bits]) - 1.0
    V[:, N : N + M] = Z
    V[:, -1] = 0.0
    W = net.effective_weights()
    X = V @ W.T - net.b  # activation field of every perceptron, per config
    f_hid = eval_f(net.activation, X[:, N : N + M]) if M else np.ones(((1 << M), 0))
    bern = np.where(Z > 0, f_hid, 1.0 - f_hid)
    P = np.prod(bern, axis=1) if M else np.ones(1)
    f_out = eval_f(net.activation, X[:, -1])
    return P, f_out, X, V, f_hid, Z


def classical_mixture_oracle(net: NetworkSpec, input_bits: str) -> float:
    """Brute-force output probability by summing over hidden configurations.

    Exact for these circuits: diagonal controls and single-targeting make
    the hidden qubits behave as independent classical coins per branch.
    """
    P, f_out, *_ = _mixture_tables(net, input_bits)
    return float(P @ f_out)


@dataclass(frozen=True)
class ApproximatorSpec:
    """Classical one-hidden-layer sum Sum_j alpha_j f(w_j . s - theta_j).

    theta_out is pinned by the constraint 1 + theta_out + Sum alpha = 0
    (it can be passed for documentation but must then satisfy it).
    """

    alpha: np.ndarray
    w: np.ndarray
    theta: np.ndarray
    lambda_lin: float = 0.01
    theta_out: Optional[float] = None

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        w = np.atleast_2d(np.asarray(self.w, dtype=float))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if alpha.ndim != 1 or alpha.size == 0:
            raise ValueError("alpha must be a nonempty vector")
        if w.shape[0] != alpha.size or theta.shape != alpha.shape:
            raise ValueError("w must be (M, N) and theta (M,) matching alpha")
        if not (self.lambda_lin > 0):
            raise ValueError("lambda_lin must be positive")
        forced = -1.0 - float(np.sum(alpha))
        if self.theta_out is not None and abs(self.theta_out - forced) > 1e-12:
            raise ValueError("theta_out must satisfy 1 + theta_out + sum(alpha) = 0")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_out", forced)


def build_universal_approximator(classical, lambda_lin: float = None) -> NetworkSpec:
    """Three-layer network whose output reads the classical sum linearly.

    ``classical`` is an ApproximatorSpec or an (alpha, w, theta) triple.
    The output gate gets weights lambda * alpha and bias lambda * theta_out;
    for small lambda the output probability is affine in the classical sum
    G = Sum_j alpha_j <f_j>, recoverable via approximator_readout.
    """
    if not isinstance(classical, ApproximatorSpec):
        alpha, w, theta = classical
        classical = ApproximatorSpec(alpha, w, theta,
                                     lambda_lin if lambda_lin is not None else 0.01)
    lam = float(lambda_lin) if lambda_lin is not None else classical.lambda_lin
    if lam <= 0:
        raise ValueError("lambda_lin must be positive")
    M, N = classical.w.shape
    n = N + M + 1
    mask = np.zeros((n, n))
    J = np.zeros((n, n))
    b = np.zeros(n)
    mask[N : N + M, :N] = 1.0
    J[N : N + M, :N] = classical.w
    b[N : N + M] = classical.theta
    mask[-1, N : N + M] = 1.0
    J[-1, N : N + M] = lam * classical.alpha
    b[-1] = lam * classical.theta_out
    return NetworkSpec(N, (M, 1), mask, J, b, ALGEBRAIC)


def approximator_readout(p_out: float, lambda_lin: float,
                         kind: ActivationKind = ALGEBRAIC) -> float:
    """Invert the affine readout: estimate of G = Sum alpha_j <f_j>.

    With z = 2f - 1 and the theta_out constraint, the linearized output is
    p = 1/2 + f'(0) lambda (2G + 1), so G = ((p - 1/2)/(f'(0) lambda) - 1)/2.
    """
    slope = float(df_dx(kind, 0.0))
    return (((p_out - 0.5) / (slope * lambda_lin)) - 1.0) / 2.0


def _require_strictly_layered(net: NetworkSpec):
    for j in range(net.n_inputs, net.n_total):
        ell = net.layer_of(j)
        for k in np.nonzero(net.mask[j])[0]:
            if net.layer_of(int(k)) != ell - 1:
                raise ValueError(
                    "layer Hamiltonian needs a strictly layered mask: "
                    f"qubit {j} (layer {ell}) sources qubit {int(k)}"
                )


def layer_hamiltonian_forward(net: NetworkSpec, input_bits: str, schedule):
    """Evolve whole layers simultaneously under the shared control ramp.

    Same-layer perceptrons commute (disjoint targets, diagonal controls on
    the previous layer), so the simultaneous layer evolution equals applying
    the layer's hardware gates one after another; total protocol time is
    len(layer_sizes) * schedule.tf.
    """
    _require_strictly_layered(net)
    _check_bits(net, input_bits)
    reg = init_basis(net.n_total, input_bits + "0" * (net.n_total - net.n_inputs))
    for gate in net.gates(schedule):
        reg = apply_hardware_perceptron(reg, gate)
    return reg, excitation_probability(reg, net.n_total - 1)


def protocol_duration(net: NetworkSpec, schedule) -> float:
    """Physical duration of the layered protocol: one ramp per layer."""
    return len(net.layer_sizes) * schedule.tf


def _activation_tag(kind: ActivationKind) -> str:
    if kind.variant == "cao_arctan":
        return f"cao_arctan:{kind.k}"
    return kind.variant


def _activation_from_tag(tag: str) -> ActivationKind:
    if tag.startswith("cao_arctan:"):
        return cao_arctan(int(tag.split(":", 1)[1]))
    return ActivationKind(tag)


def network_to_json(net: NetworkSpec) -> str:
    n = net.n_total
    return json.dumps(
        {
            "n_inputs": net.n_inputs,
            "layer_sizes": list(net.layer_sizes),
            "mask": [int(v) for v in net.mask.reshape(n * n)],
            "J": [float(v) for v in net.J.reshape(n * n)],
            "b": [float(v) for v in net.b],
            "activation": _activation_tag(net.activation),
        }
    )


def network_from_json(doc: str) -> NetworkSpec:
    d = json.loads(doc)
    n_inputs = int(d["n_inputs"])
    sizes = [int(m) for m in d["layer_sizes"]]
    n = n_inputs + sum(sizes)
    mask = np.array(d["mask"], dtype=float).reshape(n, n)
    J = np.array(d["J"], dtype=float).reshape(n, n)
    b = np.array(d["b"], dtype=float)
    return NetworkSpec(n_inputs, sizes, mask, J, b, _activation_from_tag(d["activation"]))
