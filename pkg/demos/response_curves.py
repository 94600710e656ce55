"""Sweep the perceptron's excitation response for several controls.

Produces CSVs comparing the ideal sigmoid with what the transverse-field
ramp actually delivers: a clean FAQUAD passage, a linear ramp of the same
duration, and FAQUAD with degraded control amplitudes.
"""
import pathlib

import numpy as np

from qperceptron import (
    ALGEBRAIC,
    eval_f,
    faquad_schedule,
    linear_schedule,
    optimal_design_field,
    perturbed_schedule,
    response_curve,
)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

TF, OMEGA0 = 10.0, 100.0
x_ref = optimal_design_field(1.0)
grid = np.linspace(-10.0, 10.0, 161)

schedules = {
    "faquad": faquad_schedule(OMEGA0, 1.0, TF, x_ref),
    "linear": linear_schedule(OMEGA0, 1.0, TF),
    "faquad_eps0.5": perturbed_schedule(
        faquad_schedule(OMEGA0, 1.0, TF, x_ref), 0.5
    ),
}

for name, sched in schedules.items():
    curve = response_curve(sched, grid)
    path = OUT / f"response_{name}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,p_excite,g_ideal\n")
        for x, p in curve:
            fh.write(f"{x!r},{p!r},{float(eval_f(ALGEBRAIC, x))!r}\n")
    errs = [abs(p - eval_f(ALGEBRAIC, x)) for x, p in curve]
    print(f"{name:16s} max |p - g| = {max(errs):.4f}  -> {path}")

print(f"\nall ramps: omega 100 -> 1 over t_f = {TF}, design field x* = {x_ref:.4f}")
print("the faquad curve hugs the sigmoid; the linear ramp of equal length")
print("is visibly distorted, and degraded control flattens the slope.")
