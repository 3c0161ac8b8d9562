"""Tour of the group layer: composition, dilations, and the gauge kernel.

Run:  python3 demos/01_groups_and_gauge.py
"""

import numpy as np

import htpot

h1 = htpot.make_heisenberg(1)
print("First Heisenberg group: m =", h1.m, " n =", h1.n, " Q =", htpot.homogeneous_dimension(h1))
print("matrix constraints pass:", htpot.validate_group(h1).passed)

p = htpot.Point.of([1, 0], [0])
q = htpot.Point.of([0, 1], [0])
print("\nThe group law is noncommutative in the vertical slot:")
print("  p o q ->", htpot.compose(h1, p, q).t[0], "   q o p ->", htpot.compose(h1, q, p).t[0])

print("\nDilations scale x linearly and t quadratically:")
d = htpot.dilate(h1, 2.0, htpot.Point.of([1, 0], [1]))
print("  delta_2 (1,0),(1) ->", d.x.tolist(), d.t.tolist())

params = htpot.params_for(h1)
print("\nThe kernel c*N^(2-Q) is homogeneous of degree 2-Q = ", 2 - params.Q)
pt = htpot.Point.of([0.7, -0.4], [0.3])
for lam in (0.5, 2.0, 5.0):
    lhs = htpot.gamma(params, h1, htpot.dilate(h1, lam, pt))
    rhs = lam ** (2 - params.Q) * htpot.gamma(params, h1, pt)
    print(f"  lambda={lam}: Gamma(delta p) = {lhs:.12f}  vs  lambda^(2-Q) Gamma(p) = {rhs:.12f}")

quat = htpot.make_quaternionic()
print("\nQuaternionic group (m=4, n=3): anticommutation defects:")
print(" ", htpot.validate_group(quat).anticommutation_defects)

ab = htpot.make_abelian(3)
print("\nAbelian oracle mode reduces to the Newtonian kernel:")
print("  Gamma((2,0,0)) with c=1:", htpot.gamma(htpot.params_for(ab), ab, htpot.Point.of([2, 0, 0])), "= 1/2")
