"""Train a perceptron network to recognize prime numbers.

The dataset lists every n-bit integer labeled by primality; a single
hidden layer of four perceptrons plus one output perceptron learns it by
gradient descent on the exact mixture cost (no sampling, no statevector).
"""
import pathlib

from qperceptron import (
    TrainConfig,
    batch_state_forward,
    layered_network,
    prime_dataset,
    report_to_json,
    train,
)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

for bits in (3, 4):
    ds = prime_dataset(bits)
    net0 = layered_network(bits, (4,))
    report = train(net0, ds, TrainConfig())
    trace = report.cost_trace
    print(
        f"{bits}-bit primes: accuracy {report.accuracy * ds.size:.0f}/{ds.size}, "
        f"cost {trace[0]:.3f} -> {trace[-1]:.4f} in {len(trace) - 1} steps"
    )
    path = OUT / f"primes_{bits}bit.json"
    path.write_text(report_to_json(report) + "\n", encoding="utf-8")
    print(f"  model -> {path}")

    # one coherent pass over the superposition of all inputs gives the
    # same per-input probabilities as separate passes
    batch = batch_state_forward(report.final_params, ds)
    flips = sum(
        (p >= 0.5) != (y >= 0.5) for p, (_, y) in zip(batch, ds.pairs)
    )
    print(f"  batched superposition pass: {ds.size - flips}/{ds.size} correct")
