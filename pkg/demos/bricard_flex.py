"""Following a genuine flex: a line-symmetric (type I) Bricard octahedron.

The octahedron is built from three points and their images under a
half-turn about the z-axis. It is self-intersecting and flexes. We follow
the flex numerically and watch the quantities that must stay fixed.

Run with ``python demos/bricard_flex.py``.
"""

# %%
import numpy as np

from flexgate import auto_basis, continue_flex, decompose_lengths, evaluate_dehn, flex_space, gen_example
from flexgate.dehn import unwrap_near
from flexgate.edges import dihedral_angles
from flexgate.mesh import edge_frames

p = gen_example("bricard1")
rep = flex_space(p)
print("kernel dimension:", rep.kernel_dim)
print("signed volume:", p.signed_volume())

# %% Predictor-corrector continuation along the one nontrivial direction.
res = continue_flex(p, rep.nontrivial_basis[0], step_size=1e-2, n_steps=50)
print("steps:", len(res.steps) - 1, " max edge drift:", res.max_edge_drift)
print("Newton iterations per step:", res.newton_iterations[1:11], "...")

# %% The Dehn expressions sum_e alpha_ej phi_e stay put along the path.
decomp = decompose_lengths(p, auto_basis(p))
frames = edge_frames(p)
angles = dihedral_angles(p.vertices, frames)
A = decomp.matrix()
start = A.T @ angles
drift = 0.0
for step in res.steps:
    angles = unwrap_near(dihedral_angles(step.positions, frames), angles)
    drift = max(drift, float(np.max(np.abs(A.T @ angles - start))))
print("initial values / 2pi:", np.round(start / (2 * np.pi), 12))
print("largest change along the path:", drift)

# %% Every tangent along the way satisfies the linear Dehn conditions.
worst = 0.0
for step in res.steps:
    ev = evaluate_dehn(p.with_vertices(step.positions), decomp, step.tangent, check=False)
    worst = max(worst, float(np.max(np.abs(ev.residuals) / ev.scales)))
print("worst relative tangent residual:", worst)

# %% Distances between opposite vertices do change: the motion is not rigid.
d0 = np.linalg.norm(p.vertices[:3] - p.vertices[3:], axis=1)
d1 = np.linalg.norm(res.final_positions[:3] - res.final_positions[3:], axis=1)
print("opposite-vertex distances before:", np.round(d0, 6))
print("opposite-vertex distances after :", np.round(d1, 6))
