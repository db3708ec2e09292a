"""A first-order flex that cannot be extended: the bipyramid Q.

Q is a triangular bipyramid whose top apex lies in the plane of the
middle triangle, so the three top faces are coplanar. Lifting that apex
straight up keeps every edge length stationary to first order, yet the
Dehn-invariant conditions and the rigidity-matrix minors both reject it.

Run with ``python demos/bipyramid_obstruction.py``.
"""

# %%
import math

import numpy as np

from flexgate import (
    LengthBasis,
    decompose_lengths,
    edge_frames,
    evaluate_dehn,
    fd_angle_derivative,
    flex_space,
    gen_example,
    minor_stationarity_report,
    rs_vectors,
)
from flexgate.flexspace import edge_length_residuals

q = gen_example("bipyramid-q")
print("vertices:\n", np.round(q.vertices, 6))
print("edge lengths:", np.round(np.sort(q.edge_lengths()), 12))

# %% The apex lift is a first-order flex, and the only nontrivial one.
v = np.zeros((5, 3))
v[4] = [0.0, 0.0, 1.0]
print("edge-length rates:", edge_length_residuals(q, v))
print("kernel dimension:", flex_space(q).kernel_dim, "(6 would be rigid)")

# %% The flat edge between the lifted apex and vertex 1.
frame = edge_frames(q)[q.edge_id(1, 4)]
coeffs = rs_vectors(q, frame)
print("frame (x, y, z1, z2):", frame.quad)
print("r triple defined:", coeffs.r is not None)
print("s triple:\n", coeffs.s)
rate = float(np.sum(coeffs.s[0] * (v[4] - v[1])))
print(f"angle rate from s triple : {rate:.12f}")
print(f"angle rate, finite diff  : {fd_angle_derivative(q, frame, v):.12f}")
print(f"-(8 + 2 sqrt 3) / 13     : {-(8 + 2 * math.sqrt(3)) / 13:.12f}")

# %% Lengths are 8, 5 and 4 sqrt3 - 3, so {1, 4 sqrt3 - 3} spans them over Q.
basis = LengthBasis(("1", "4sqrt3-3"), (1.0, 4 * math.sqrt(3) - 3))
decomp = decompose_lengths(q, basis)
for (i, j), row in zip(q.edges, decomp.alpha):
    print(f"  edge {i}-{j}: " + " + ".join(f"{a}*{l}" for a, l in zip(row, basis.labels) if a))
rep = evaluate_dehn(q, decomp, v)
print("Dehn residuals:", rep.residuals, "passed:", rep.passed)

# %% Minors: the 8x8 minors vanish at t = 0 but are not stationary.
rep = minor_stationarity_report(q, v, k=8)
print(f"{rep.count} minors, derivative offenders: {rep.n_derivative_offenders}")
worst = rep.derivative_offenders[0]
print("first offender rows", worst.index.rows, "cols", worst.index.cols, "d/dt =", worst.derivative)
