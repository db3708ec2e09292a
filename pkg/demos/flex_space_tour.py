"""Rigidity matrices and first-order flex spaces of the bundled solids.

Run with ``python demos/flex_space_tour.py``.
"""

# %%
import numpy as np

from flexgate import Example, flex_space, gen_example, rank_profile, rigidity_matrix, topology_stats

for e in Example:
    p = gen_example(e.value)
    t = topology_stats(p)
    rep = flex_space(p)
    rank, s = rank_profile(rigidity_matrix(p))
    print(f"{e.value:14s} V={t.V} E={t.E} F={t.F} chi={t.euler_char}  rank={rank}  kernel={rep.kernel_dim}")
    # the gap in the singular values is what decides the numerical rank
    nz = s[s > 0]
    print(f"{'':14s} smallest singular values: {np.array2string(nz[-3:], precision=3)}")

# %% Rigid motions are always in the kernel; a rigid solid has nothing more.
p = gen_example("octa-regular")
rep = flex_space(p)
R = rigidity_matrix(p).matrix
print("|R T| for the six rigid motions:", np.abs(R @ rep.trivial_basis.reshape(6, -1).T).max())

# %% Generic Bricard parameters keep the extra flex.
rng = np.random.default_rng(0)
for _ in range(3):
    A, B, C = rng.uniform(-2, 2, size=(3, 3))
    print("bricard1 kernel:", flex_space(gen_example("bricard1", A=A, B=B, C=C)).kernel_dim)
