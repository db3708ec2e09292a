import numpy as np
import pytest

from flexgate.errors import DegenerateVertexSet, NotAFirstOrderFlex, SizeMismatch
from flexgate.flexspace import (
    check_first_order_flex,
    edge_length_residuals,
    flex_space,
    is_first_order_flex,
    is_nontrivial,
    project_out_trivial,
    rigidity_matrix,
    rigidity_rows,
    trivial_motions,
)
from flexgate.mesh import build_polyhedron


def test_rigidity_matrix_layout(q):
    R = rigidity_matrix(q)
    assert R.shape == (9, 15)
    e = q.edge_id(0, 2)
    d = q.vertices[0] - q.vertices[2]
    np.testing.assert_array_equal(R.matrix[e, 0:3], d)
    np.testing.assert_array_equal(R.matrix[e, 6:9], -d)
    assert np.count_nonzero(R.matrix[e]) == 6
    assert R.vertex_axis(R.column_of(3, 2)) == (3, 2)


def test_rigidity_rows_linear(bricard, rng):
    a, b = rng.normal(size=(2, 6, 3))
    lhs = rigidity_rows(2 * a - 3 * b, bricard.edges)
    rhs = 2 * rigidity_rows(a, bricard.edges) - 3 * rigidity_rows(b, bricard.edges)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


def test_residuals_are_matrix_product(q, rng):
    v = rng.normal(size=(5, 3))
    np.testing.assert_allclose(edge_length_residuals(q, v), rigidity_matrix(q).matrix @ v.ravel(), atol=1e-12)


def test_trivial_motions_orthonormal(bricard):
    T = trivial_motions(bricard).reshape(6, -1)
    np.testing.assert_allclose(T @ T.T, np.eye(6), atol=1e-13)


def test_collinear_vertices():
    verts = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]]
    p = build_polyhedron(verts, [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)], orientation="input")
    with pytest.raises(DegenerateVertexSet):
        trivial_motions(p)


@pytest.mark.parametrize("fixture, dim", [("tetra", 6), ("octa", 6), ("q", 7), ("bricard", 7)])
def test_kernel_dims(request, fixture, dim):
    rep = flex_space(request.getfixturevalue(fixture))
    assert rep.kernel_dim == dim
    assert rep.rank + rep.kernel_dim == 3 * request.getfixturevalue(fixture).n_vertices
    assert rep.infinitesimally_flexible == (dim >= 7)
    assert len(rep.nontrivial_basis) == dim - 6


def test_nontrivial_basis_is_flex_and_off_trivial(bricard):
    rep = flex_space(bricard)
    v = rep.nontrivial_basis[0]
    assert is_first_order_flex(bricard, v)
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    np.testing.assert_allclose(rep.trivial_basis.reshape(6, -1) @ v.ravel(), 0, atol=1e-12)
    assert is_nontrivial(bricard, v)


def test_q_flex_is_v5_up_to_rigid_motion(q, v5):
    v = project_out_trivial(q, flex_space(q).nontrivial_basis[0])
    w = project_out_trivial(q, v5)
    cos = abs(v.ravel() @ w.ravel()) / (np.linalg.norm(v) * np.linalg.norm(w))
    assert cos == pytest.approx(1.0, abs=1e-12)


def test_is_nontrivial(q, v5, rng):
    assert is_nontrivial(q, v5)
    rot = np.cross(rng.normal(size=3), q.vertices) + rng.normal(size=3)
    assert not is_nontrivial(q, rot)
    np.testing.assert_allclose(project_out_trivial(q, rot), 0, atol=1e-12)


def test_check_first_order_flex(q, v5):
    np.testing.assert_allclose(check_first_order_flex(q, v5), 0, atol=1e-12)
    bad = v5.copy()
    bad[0] = [1, 0, 0]
    with pytest.raises(NotAFirstOrderFlex):
        check_first_order_flex(q, bad)
    assert not is_first_order_flex(q, bad)
    with pytest.raises(SizeMismatch):
        edge_length_residuals(q, np.zeros((4, 3)))
    with pytest.raises(ValueError):
        edge_length_residuals(q, np.full((5, 3), np.nan))


def test_rank_tolerance_controls_kernel(q):
    assert flex_space(q, rank_tol=1e-9).kernel_dim == 7
    s = flex_space(q).singular_values
    # a tolerance above the smallest nonzero singular value swallows one more direction
    assert flex_space(q, rank_tol=1.01 * s[7] / s[0]).kernel_dim == 8
