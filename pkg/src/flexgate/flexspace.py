"""Rigidity matrix, trivial motions and the space of first-order flexes.

Velocities are (V, 3) arrays; a flattened velocity uses column ``3*i + k``
for axis ``k`` of vertex ``i``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVertexSet, NotAFirstOrderFlex, SizeMismatch

RANK_TOL = 1e-9
FLEX_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RigidityMatrix:
    matrix: np.ndarray  # (E, 3V)
    edges: np.ndarray  # row -> (i, j)

    @property
    def shape(self):
        return self.matrix.shape

    def column_of(self, vertex, axis):
        return 3 * vertex + axis

    def vertex_axis(self, col):
        return divmod(col, 3)


@dataclass(frozen=True, eq=False)
class FlexSpaceReport:
    kernel_dim: int
    rank: int
    trivial_basis: np.ndarray  # (6, V, 3)
    nontrivial_basis: np.ndarray  # (kernel_dim - 6, V, 3)
    infinitesimally_flexible: bool
    singular_values: np.ndarray


def rigidity_rows(positions, edges):
    """Dense E x 3V matrix whose row for edge (i, j) holds p_i - p_j at i and
    p_j - p_i at j. Linear in ``positions``, so passing velocities gives the
    t-derivative of the matrix along p + t v."""
    pos = np.asarray(positions, dtype=float)
    edges = np.asarray(edges)
    n = len(pos)
    R = np.zeros((len(edges), 3 * n))
    d = pos[edges[:, 0]] - pos[edges[:, 1]]
    rows = np.arange(len(edges))[:, None]
    cols_i = 3 * edges[:, 0:1] + np.arange(3)
    cols_j = 3 * edges[:, 1:2] + np.arange(3)
    R[rows, cols_i] = d
    R[rows, cols_j] = -d
    return R


def rigidity_matrix(p):
    return RigidityMatrix(rigidity_rows(p.vertices, p.edges), p.edges)


def _as_flex(p, flex):
    v = np.asarray(flex, dtype=float)
    if v.shape != (p.n_vertices, 3):
        raise SizeMismatch(f"flex has shape {v.shape}, expected ({p.n_vertices}, 3)")
    if not np.all(np.isfinite(v)):
        raise ValueError("flex velocities must be finite")
    return v


def edge_length_residuals(p, flex):
    """(p_i - p_j) . (v_i - v_j) per edge; zero for a first-order flex."""
    v = _as_flex(p, flex)
    i, j = p.edges[:, 0], p.edges[:, 1]
    return np.einsum("ij,ij->i", p.vertices[i] - p.vertices[j], v[i] - v[j])


def is_first_order_flex(p, flex, tol=FLEX_TOL):
    res = edge_length_residuals(p, flex)
    return bool(np.all(np.abs(res) <= tol * p.edge_lengths()))


def check_first_order_flex(p, flex, tol=FLEX_TOL):
    res = edge_length_residuals(p, flex)
    excess = np.abs(res) / p.edge_lengths()
    if np.any(excess > tol):
        worst = int(np.argmax(excess))
        raise NotAFirstOrderFlex(
            f"edge {tuple(p.edges[worst])} changes length at rate {res[worst]:.3e}"
        )
    return res


def trivial_motions(p):
    """Orthonormal basis (6, V, 3) of infinitesimal rigid motions."""
    pos = p.vertices
    c = pos.mean(axis=0)
    fields = []
    for k in range(3):
        t = np.zeros_like(pos)
        t[:, k] = 1.0
        fields.append(t)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        fields.append(np.cross(e, pos - c))
    A = np.stack([f.ravel() for f in fields], axis=1)
    Q, Rr = np.linalg.qr(A)
    diag = np.abs(np.diag(Rr))
    if diag.min() <= 1e-12 * diag.max():
        raise DegenerateVertexSet("vertices are collinear; rotations are dependent")
    return Q.T.reshape(6, *pos.shape)


def flex_space(p, rank_tol=RANK_TOL):
    R = rigidity_rows(p.vertices, p.edges)
    _, s, vt = np.linalg.svd(R, full_matrices=True)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size else 0
    kernel = vt[rank:]  # rows span the kernel
    T = trivial_motions(p).reshape(6, -1)
    kdim = kernel.shape[0]
    nontrivial = np.zeros((0, p.n_vertices, 3))
    if kdim > 6:
        # project the kernel off the trivial motions; keep the kdim - 6 strongest directions
        proj = kernel - (kernel @ T.T) @ T
        u, sv, wt = np.linalg.svd(proj, full_matrices=False)
        nontrivial = wt[: kdim - 6].reshape(kdim - 6, p.n_vertices, 3)
    return FlexSpaceReport(
        kernel_dim=kdim,
        rank=rank,
        trivial_basis=T.reshape(6, p.n_vertices, 3),
        nontrivial_basis=nontrivial,
        infinitesimally_flexible=kdim >= 7,
        singular_values=s,
    )


def project_out_trivial(p, flex):
    v = np.asarray(flex, dtype=float).ravel()
    T = trivial_motions(p).reshape(6, -1)
    return (v - T.T @ (T @ v)).reshape(p.n_vertices, 3)


def is_nontrivial(p, flex, tol=1e-9):
    """True when some pair of vertices not joined by an edge changes distance."""
    v = _as_flex(p, flex)
    n = p.n_vertices
    i, j = np.triu_indices(n, 1)
    is_edge = np.zeros((n, n), dtype=bool)
    is_edge[p.edges[:, 0], p.edges[:, 1]] = True
    keep = ~is_edge[i, j]
    i, j = i[keep], j[keep]
    d = p.vertices[i] - p.vertices[j]
    rate = np.abs(np.einsum("ij,ij->i", d, v[i] - v[j]))
    return bool(np.any(rate > tol * np.linalg.norm(d, axis=1)))
