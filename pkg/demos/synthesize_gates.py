"""Fit perceptron-cycle stacks into conditional gates.

Two cycles with opposite orientations make a window response: the target
flips exactly when the weighted count of excited controls falls inside
(M1, M2).  The N=1 window is a CNOT; wider registers give generalized
XOR gates.  A peaked window shows the same machinery shaping a
range-sensor response.
"""
import math
import pathlib

import numpy as np

from qperceptron import (
    Peak,
    Rectangle,
    apply_composition,
    composition_to_csv,
    excitation_probability,
    init_basis,
    synthesize,
)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# CNOT from a (0, 2) window on one control
grid = np.linspace(-1.0, 3.0, 41)
res = synthesize(Rectangle(0.0, 2.0), 2, grid)
composition_to_csv(res, Rectangle(0.0, 2.0), grid, OUT / "rectangle.csv")
print(f"rectangle fit: rms angle error {res.residual:.2e}, converged={res.converged}")
for c in "01":
    out = apply_composition(init_basis(2, c + "0"), res.spec, 1, {0: 1.0})
    print(f"  CNOT control={c}: p(flip) = {excitation_probability(out, 1):.6f}")

# generalized XOR on three controls: flip iff one or two are excited
res3 = synthesize(Rectangle(0.5, 2.5), 2, np.linspace(-0.5, 3.5, 33))
print(f"\n3-control window (0.5, 2.5), unit weights:")
for bits in range(8):
    s = format(bits, "03b")
    out = apply_composition(init_basis(4, s + "0"), res3.spec, 3, {0: 1.0, 1: 1.0, 2: 1.0})
    p = excitation_probability(out, 3)
    print(f"  controls {s} (count {s.count('1')}): p(flip) = {p:.4f}")

# peaked response for range sensing
pgrid = np.linspace(-2.0, 4.0, 61)
pres = synthesize(Peak(1.0, 0.5), 2, pgrid)
composition_to_csv(pres, Peak(1.0, 0.5), pgrid, OUT / "peak.csv")
print(f"\npeak fit: rms angle error {pres.residual:.2e}, converged={pres.converged}")
print(f"csv outputs in {OUT}")
