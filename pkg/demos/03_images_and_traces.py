"""Reflected-pole candidates and what their boundary traces actually do.

For the abelian group the reflection construction is the classical method of
images and traces vanish identically.  For a genuine H-type group the group
law's bilinear term shifts the vertical coordinate of pole differences, the
reflected term no longer matches the principal one on the hyperplane, and the
trace is nonzero away from the centre manifold {x = 0}.  This demo measures
both, instead of assuming either.

Run:  python3 demos/03_images_and_traces.py
"""

import numpy as np

import htpot
from htpot import images

h1 = htpot.make_heisenberg(1)
params = htpot.params_for(h1)

zeta = htpot.Point.of([0.7, 0.2], [0.1])
print("Half-space images of", zeta.x.tolist(), ":")
for ch in htpot.wedge_images(zeta, htpot.half_space(), h1):
    print(f"  sign {ch.sign:+d} at x = {ch.point.x.tolist()}")

print("\nQuadrant images carry subset-parity signs:")
for ch in htpot.wedge_images(htpot.Point.of([0.6, 0.9], [0.1]), htpot.quadrant(), h1):
    print(f"  sign {ch.sign:+d} at x = {ch.point.x.tolist()}")

print("\nPinned half-space configuration (pole (1,0;0), boundary point (0,1;1)):")
zeta = htpot.Point.of([1, 0], [0])
xi = htpot.Point.of([0, 1], [1])
n4_p = htpot.gauge(h1, htpot.compose(h1, htpot.inverse(h1, zeta), xi)).fourth_power
n4_r = htpot.gauge(h1, htpot.compose(h1, htpot.inverse(h1, htpot.reflect(zeta, 1)), xi)).fourth_power
print(f"  gauge^4 to the pole: {n4_p}, to the reflected pole: {n4_r}")
print(f"  trace value 40^-1/2 - 8^-1/2 = {htpot.green_eval(params, h1, htpot.half_space(), xi, zeta):.12f}")
print("  (nonzero: reflection preserves |x|-parts but not the shifted |t|-parts)")

rng = np.random.default_rng(1)
samples = [htpot.Point(np.array([0.0, v]), np.array([w])) for v, w in rng.uniform(-1.5, 1.5, (6, 2))]
samples += [htpot.Point(np.zeros(2), np.array([w])) for w in rng.uniform(-1.5, 1.5, 3)]
report = images.boundary_trace_scan(params, h1, htpot.half_space(), zeta, samples)
print("\nTrace scan on {x_1 = 0}:")
print(f"  max |G| over all samples:          {report.max_abs:.3e}")
print(f"  max |G| over x = 0 samples:        {report.zero_subset_max:.3e}   (exact cancellation)")

ab = htpot.make_abelian(3)
params_ab = htpot.params_for(ab)
pole = htpot.Point.of([0.5, 0.2, -0.1])
samples = []
for _ in range(8):
    x = rng.uniform(-1.5, 1.5, 3)
    x[0] = 0.0
    samples.append(htpot.Point(x, np.zeros(0)))
rep_ab = images.boundary_trace_scan(params_ab, ab, htpot.half_space(), pole, samples)
print(f"\nAbelian half-space trace (classical images): max |G| = {rep_ab.max_abs:.3e}")

print("\nStrip series control on the Heisenberg group:")
strip = htpot.Strip(1, 1.0)
pole = htpot.Point.of([0.45, 0.2], [0.1])
pt = htpot.Point.of([0.6, -0.3], [-0.2])
for J in (4, 8, 16, 32):
    s_j = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.fixed(J))
    s_2j = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.fixed(2 * J))
    bound = htpot.strip_tail_bound(params, h1, strip, pole, pt, J)
    print(f"  J = {J:2d}: |S_J - S_2J| = {abs(s_j - s_2j):.3e}  <=  tail bound {bound:.3e}")

print("\nCharacteristic sets of coordinate hyperplanes:")
print("  {x_1 = 0}:", htpot.characteristic_points(h1, htpot.Hyperplane("x", 1)).kind)
print("  {t_1 = 0}:", htpot.characteristic_points(h1, htpot.Hyperplane("t", 1)).kind)
