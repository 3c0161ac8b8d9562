"""Finite-difference checks of the kernel, and calibration of its constant.

The kernel is annihilated by the sub-Laplacian away from its pole; the stencil
residual at fixed points falls at second order in the step.  Its constant is
fixed by requiring outward flux -1 through a coordinate box around the origin.

Run:  python3 demos/02_harmonicity_and_flux.py  (about half a minute)
"""

import math

import numpy as np

import htpot
from htpot import fundamental, operators
from htpot.geometry import Box

h1 = htpot.make_heisenberg(1)
params = htpot.params_for(h1)
pole = htpot.Point.of([0.2, -0.1], [0.05])


def gamma_field(x, t):
    dx, tt = fundamental.pole_shift(h1, x, t, pole.x, pole.t)
    return fundamental.gamma_from_fourth(params, fundamental.gauge_fourth(h1, dx, tt))


field = operators.ScalarField(
    eval=lambda p: float(gamma_field(p.x[None], p.t[None])[0]),
    label="gamma",
    eval_many=gamma_field,
)

rng = np.random.default_rng(0)
samples = []
while len(samples) < 12:
    cand = htpot.Point(rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 1))
    if 0.6 <= htpot.quasi_distance(params, h1, cand, pole) <= 1.4:
        samples.append(cand)

print("Stencil residual |L Gamma| and its order under step halving:")
for h in (2e-3, 1e-3, 5e-4):
    worst = max(abs(operators.apply_sublaplacian(h1, field, p, operators.StencilSpec(h))) for p in samples)
    print(f"  h = {h:.0e}: max residual {worst:.3e}")

print("\nCalibrating the constant on flat boxes (t-extent ~ x-extent^2/4):")
for spec, nodes, label in ((htpot.make_abelian(3), 24, "abelian m=3"), (h1, 24, "Heisenberg d=1")):
    box = Box(np.tile([-1.0, 1.0], (spec.m, 1)), np.tile([-0.25, 0.25], (spec.n, 1)))
    c = htpot.calibrate_c(spec, box, nodes_per_axis=nodes)
    check_box = Box(np.tile([-0.95, 0.85], (spec.m, 1)), np.tile([-0.28, 0.28], (spec.n, 1)))
    check = htpot.flux(htpot.params_for(spec, c), spec, check_box, nodes_per_axis=nodes)
    print(f"  {label}: c = {c:.12f}, flux through a second box = {check:.12f}")
print("  (reference values: 1/(4 pi) =", 1 / (4 * math.pi), ", 1/(2 pi) =", 1 / (2 * math.pi), ")")
