import numpy as np
import pytest

from flexgate.errors import DanglingVertex, NonManifoldEdge, NonTriangleFace, NotOrientable
from flexgate.mesh import build_polyhedron, edge_frames, is_face_degenerate, topology_stats
from flexgate.oracle import BIPYRAMID_Q_FACES, bipyramid_q_vertices, gen_example


def test_tetrahedron_builds(tetra):
    assert tetra.n_edges == 6
    assert tetra.oriented


def test_bipyramid_counts(q):
    assert (q.n_vertices, q.n_edges, q.n_faces) == (5, 9, 6)


@pytest.mark.parametrize(
    "name, expected",
    [("tetra-regular", (4, 6, 4, 2)), ("bipyramid-q", (5, 9, 6, 2)), ("octa-regular", (6, 12, 8, 2))],
)
def test_topology_stats(name, expected):
    t = topology_stats(gen_example(name))
    assert (t.V, t.E, t.F, t.euler_char) == expected
    assert t.orientable and t.genus_or_crosscaps == 0
    assert 3 * t.F == 2 * t.E and t.E == 3 * t.V - 3 * t.euler_char


def test_torus_genus():
    # 7-vertex torus (Csaszar combinatorics) on a generic embedding of the vertex set
    faces = []
    for i in range(7):
        faces.append((i, (i + 1) % 7, (i + 3) % 7))
        faces.append((i, (i + 3) % 7, (i + 2) % 7))
    rng = np.random.default_rng(1)
    p = build_polyhedron(rng.normal(size=(7, 3)), faces)
    t = topology_stats(p)
    assert (t.V, t.E, t.F, t.euler_char, t.genus_or_crosscaps) == (7, 21, 14, 0, 1)
    assert t.E == 3 * t.V - 3 * t.euler_char


def test_projective_plane_is_not_orientable():
    # 6-vertex real projective plane
    faces = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ]
    rng = np.random.default_rng(2)
    p = build_polyhedron(rng.normal(size=(6, 3)), faces)
    assert not p.oriented
    t = topology_stats(p)
    assert t.euler_char == 1 and t.genus_or_crosscaps == 1
    with pytest.raises(NotOrientable):
        edge_frames(p)


def test_non_manifold_edge():
    verts = np.vstack([bipyramid_q_vertices(), [[1.0, 1.0, 5.0]]])
    faces = BIPYRAMID_Q_FACES + [(1, 2, 5)]
    with pytest.raises(NonManifoldEdge):
        build_polyhedron(verts, faces)


def test_triple_shared_edge():
    verts = np.eye(3).tolist() + [[0, 0, 0], [1, 1, 1]]
    faces = [(0, 1, 2), (0, 1, 3), (0, 1, 4), (2, 3, 4)]
    with pytest.raises(NonManifoldEdge):
        build_polyhedron(verts, faces)


def test_non_triangle_face():
    verts = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1]]
    faces = [(0, 1, 2, 3), (0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)]
    with pytest.raises(NonTriangleFace):
        build_polyhedron(verts, faces)


def test_dangling_vertex(tetra):
    verts = np.vstack([tetra.vertices, [[5.0, 5.0, 5.0]]])
    with pytest.raises(DanglingVertex):
        build_polyhedron(verts, tetra.faces)


def test_windings_are_repaired_and_outward():
    verts = gen_example("tetra-regular").vertices
    # every face given with the wrong winding except one
    faces = [(0, 1, 2), (0, 1, 3), (0, 3, 2), (1, 2, 3)]
    p = build_polyhedron(verts, faces)
    assert p.oriented and p.signed_volume() > 0


def test_bipyramid_flat_edge_frame(q):
    frame = edge_frames(q)[q.edge_id(1, 4)]
    # p2, p5, p4, p3 in 1-based labels
    assert frame.quad == (1, 4, 3, 2)


def test_frames_outward_on_tetra(tetra):
    centroid = tetra.vertices.mean(axis=0)
    P = tetra.vertices
    for fr in edge_frames(tetra):
        x, y, z1, z2 = (P[i] for i in fr.quad)
        n1 = np.cross(y - x, z1 - x)
        n2 = np.cross(z2 - x, y - x)
        assert np.dot(n1, (x + y + z1) / 3 - centroid) > 0
        assert np.dot(n2, (x + y + z2) / 3 - centroid) > 0


def test_swapped_frame_keeps_angle(bricard):
    from flexgate.edges import dihedral_from_points, frame_points

    for fr in edge_frames(bricard):
        a = dihedral_from_points(*frame_points(bricard.vertices, fr)).phi
        b = dihedral_from_points(*frame_points(bricard.vertices, fr.swapped())).phi
        assert abs(a - b) < 1e-12


def test_frames_deterministic(bricard):
    assert edge_frames(bricard) == edge_frames(bricard)


def test_normals_are_unit(bricard):
    from flexgate.edges import dihedral_data

    for fr in edge_frames(bricard):
        d = dihedral_data(bricard, fr)
        assert abs(np.linalg.norm(d.n1) - 1) < 1e-12
        assert abs(np.linalg.norm(d.n2) - 1) < 1e-12


def test_degenerate_faces(q):
    verts = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 0, 1]]
    p = build_polyhedron(verts, [(0, 1, 2), (0, 3, 1), (1, 3, 2), (2, 3, 0)])
    assert is_face_degenerate(p, 0)
    assert not is_face_degenerate(p, 1)
    assert not any(is_face_degenerate(q, f) for f in range(q.n_faces))
    assert not any(is_face_degenerate(gen_example("tetra-regular"), f) for f in range(4))


def test_too_small():
    with pytest.raises(ValueError):
        build_polyhedron([[0, 0, 0]] * 3, [(0, 1, 2)] * 4)
