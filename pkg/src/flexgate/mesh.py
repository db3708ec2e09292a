"""Closed triangulated surfaces, their topology and per-edge vertex frames.

A :class:`Polyhedron` is immutable once built. ``build_polyhedron`` validates
the combinatorics, propagates a consistent face winding when the surface is
orientable and, when the enclosed signed volume is clearly nonzero, flips
the winding so that face normals point outward.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DanglingVertex,
    MeshError,
    NonManifoldEdge,
    NonTriangleFace,
    NotOrientable,
)

# relative to (bounding-box diagonal)^3
VOLUME_TOL = 1e-9
# doubled face area relative to (longest face edge)^2
DEGENERACY_TOL = 1e-12


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Polyhedron:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3), windings outward when oriented
    edges: np.ndarray  # (E, 2), sorted pairs in lexicographic order
    edge_faces: np.ndarray  # (E, 2), indices of the two faces on each edge
    oriented: bool
    _edge_index: dict = field(repr=False, default_factory=dict)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.faces)

    def edge_id(self, i, j):
        """Row index of the edge joining vertices ``i`` and ``j``."""
        key = (min(i, j), max(i, j))
        try:
            return self._edge_index[key]
        except KeyError:
            raise KeyError(f"no edge between vertices {i} and {j}") from None

    def with_vertices(self, vertices):
        """Same combinatorics and windings at new vertex positions.

        No re-orientation happens here; deformations along a flex must keep
        the original labelling of faces.
        """
        vertices = np.asarray(vertices, dtype=float)
        if vertices.shape != self.vertices.shape:
            raise MeshError(
                f"expected vertex array of shape {self.vertices.shape}, got {vertices.shape}"
            )
        return Polyhedron(
            _frozen(vertices, float),
            self.faces,
            self.edges,
            self.edge_faces,
            self.oriented,
            self._edge_index,
        )

    def reoriented(self):
        """Copy with every face winding reversed (normals flip sign)."""
        return Polyhedron(
            self.vertices,
            _frozen(self.faces[:, ::-1], np.int64),
            self.edges,
            self.edge_faces,
            self.oriented,
            self._edge_index,
        )

    def edge_lengths(self):
        d = self.vertices[self.edges[:, 0]] - self.vertices[self.edges[:, 1]]
        return np.linalg.norm(d, axis=1)

    def signed_volume(self):
        a, b, c = (self.vertices[self.faces[:, k]] for k in range(3))
        return float(np.einsum("ij,ij->", a, np.cross(b, c)) / 6.0)


@dataclass(frozen=True)
class TopologyStats:
    V: int
    E: int
    F: int
    euler_char: int
    orientable: bool
    genus_or_crosscaps: int


@dataclass(frozen=True)
class EdgeFrame:
    """Vertex quadruple around one edge.

    ``x`` and ``y`` are the edge end points, ``z1`` and ``z2`` the apexes
    of the faces (x, y, z1) and (x, y, z2). The order is chosen so that
    ``(y-x) x (z1-x)`` and ``(z2-x) x (y-x)`` are outward normals.
    """

    edge_id: int
    x: int
    y: int
    z1: int
    z2: int

    @property
    def quad(self):
        return (self.x, self.y, self.z1, self.z2)

    def swapped(self):
        """The same edge with x and y exchanged (normals negate)."""
        return EdgeFrame(self.edge_id, self.y, self.x, self.z2, self.z1)


def _propagate_windings(faces, edge_faces_map):
    """Flip faces so that every edge is traversed once in each direction.

    Returns (new_faces, orientable, components) where components lists the
    face indices of each connected component.
    """
    faces = [list(f) for f in faces]
    nf = len(faces)
    neighbours = [[] for _ in range(nf)]
    for (i, j), fs in edge_faces_map.items():
        a, b = fs
        neighbours[a].append((b, i, j))
        neighbours[b].append((a, i, j))

    def direction(face, i, j):
        # +1 if the face traverses i->j, -1 if j->i
        k = face.index(i)
        return 1 if face[(k + 1) % 3] == j else -1

    visited = [False] * nf
    orientable = True
    components = []
    for root in range(nf):
        if visited[root]:
            continue
        visited[root] = True
        comp = [root]
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for g, i, j in neighbours[f]:
                if direction(faces[f], i, j) == direction(faces[g], i, j):
                    if visited[g]:
                        orientable = False
                        continue
                    faces[g].reverse()
                if not visited[g]:
                    visited[g] = True
                    comp.append(g)
                    queue.append(g)
        components.append(comp)
    return faces, orientable, components


def build_polyhedron(vertices, faces, orientation="auto"):
    """Validate a closed triangulated surface and return a :class:`Polyhedron`.

    ``orientation`` is ``"auto"`` (outward by signed volume when the volume is
    clearly nonzero, otherwise the input winding) or ``"input"`` (keep the
    propagated input winding regardless of volume).
    """
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise MeshError("vertices must be an array of 3-vectors")
    if not np.all(np.isfinite(verts)):
        raise MeshError("vertex coordinates must be finite")
    if len(verts) < 4:
        raise MeshError("a closed surface needs at least 4 vertices")
    faces = [list(f) for f in faces]
    if len(faces) < 4:
        raise MeshError("a closed surface needs at least 4 faces")
    nv = len(verts)
    for n, f in enumerate(faces):
        if len(f) != 3:
            raise NonTriangleFace(f"face {n} has {len(f)} vertices")
        if any(int(i) != i or not 0 <= i < nv for i in f):
            raise MeshError(f"face {n} has a vertex index out of range")
        if len(set(f)) != 3:
            raise MeshError(f"face {n} repeats a vertex")
    faces = [[int(i) for i in f] for f in faces]

    edge_faces_map = {}
    for n, f in enumerate(faces):
        for k in range(3):
            i, j = f[k], f[(k + 1) % 3]
            edge_faces_map.setdefault((min(i, j), max(i, j)), []).append(n)
    for e, fs in edge_faces_map.items():
        if len(fs) != 2:
            raise NonManifoldEdge(f"edge {e} belongs to {len(fs)} faces")
    used = np.zeros(nv, dtype=bool)
    used[np.array(faces).ravel()] = True
    if not used.all():
        raise DanglingVertex(f"vertices {np.flatnonzero(~used).tolist()} are in no face")

    faces, orientable, components = _propagate_windings(faces, edge_faces_map)
    faces = np.array(faces, dtype=np.int64)

    if orientable and orientation == "auto":
        diag = np.linalg.norm(verts.max(axis=0) - verts.min(axis=0))
        for comp in components:
            tri = verts[faces[comp]]
            vol = np.einsum("ij,ij->", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])) / 6.0
            if abs(vol) > VOLUME_TOL * diag**3 and vol < 0:
                faces[comp] = faces[comp][:, ::-1]
    elif orientation not in ("auto", "input"):
        raise ValueError(f"unknown orientation mode {orientation!r}")

    keys = sorted(edge_faces_map)
    edges = np.array(keys, dtype=np.int64)
    edge_faces = np.array([edge_faces_map[k] for k in keys], dtype=np.int64)
    return Polyhedron(
        _frozen(verts, float),
        _frozen(faces, np.int64),
        _frozen(edges, np.int64),
        _frozen(edge_faces, np.int64),
        bool(orientable),
        {k: n for n, k in enumerate(keys)},
    )


def topology_stats(p):
    V, E, F = p.n_vertices, p.n_edges, p.n_faces
    chi = V - E + F
    # closed triangulations: 3F = 2E, hence E = 3V - 3chi
    assert 3 * F == 2 * E, "not a closed triangulation"
    assert E == 3 * V - 3 * chi
    if p.oriented:
        g = (2 - chi) // 2
    else:
        g = 2 - chi
    return TopologyStats(V, E, F, chi, p.oriented, g)


def edge_frames(p):
    """One :class:`EdgeFrame` per edge, in edge order.

    ``x`` is always the lower vertex index; ``z1`` is the apex of the face
    that traverses ``x -> y`` in its (outward) winding.
    """
    if not p.oriented:
        raise NotOrientable("edge frames need a consistently oriented surface")
    apex = {}
    for f in p.faces:
        for k in range(3):
            apex[(int(f[k]), int(f[(k + 1) % 3]))] = int(f[(k + 2) % 3])
    frames = []
    for n, (i, j) in enumerate(p.edges):
        i, j = int(i), int(j)
        frames.append(EdgeFrame(n, i, j, apex[(i, j)], apex[(j, i)]))
    return frames


def doubled_area(a, b, c):
    return float(np.linalg.norm(np.cross(np.asarray(b) - a, np.asarray(c) - a)))


def is_face_degenerate(p, face):
    i, j, k = p.faces[face]
    a, b, c = p.vertices[i], p.vertices[j], p.vertices[k]
    longest = max(np.dot(b - a, b - a), np.dot(c - b, c - b), np.dot(a - c, a - c))
    return doubled_area(a, b, c) < DEGENERACY_TOL * longest


def degenerate_faces(p):
    return [n for n in range(p.n_faces) if is_face_degenerate(p, n)]
